#include "delta/dsl/validator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "delta/dsl/builtins.hpp"

namespace delta::dsl {

namespace {

// Everything callable/readable from a method body, as seen by the checker.
// When `role_known` is false the role-level lookups (fields, role methods)
// are unknown and checks that depend on them are skipped.
struct Scope {
  bool role_known = true;
  std::set<std::string> fields;
  std::map<std::string, int> methods;  // name -> arity
};

class BodyChecker {
 public:
  BodyChecker(const Scope& scope, std::vector<Diagnostic>& out) : scope_(scope), out_(out) {}

  void check_method(const MethodDef& m) {
    locals_.clear();
    locals_.emplace_back();
    std::set<std::string> seen;
    for (const auto& p : m.params) {
      if (!seen.insert(p).second) {
        report(m.span, "duplicate parameter '" + p + "' in method '" + m.name + "'", DiagCode::duplicate_name);
      }
      locals_.back().insert(p);
    }
    check_block(m.body, false);
  }

 private:
  void report(const Span& span, std::string msg, DiagCode code) {
    out_.push_back(Diagnostic{Severity::error, span, std::move(msg), code});
  }

  bool visible(const std::string& name) const {
    return std::any_of(locals_.begin(), locals_.end(), [&](const auto& s) { return s.count(name) > 0; });
  }

  void check_block(const Block& b, bool push) {
    if (push) locals_.emplace_back();
    for (const auto& s : b) check_stmt(s);
    if (push) locals_.pop_back();
  }

  void check_stmt(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LetStmt>) {
            check_expr(*n.value);
            if (visible(n.name)) {
              report(s.span, "'" + n.name + "' is already declared", DiagCode::duplicate_name);
            }
            locals_.back().insert(n.name);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            check_expr(*n.value);
            check_assign_target(n, s.span);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            check_expr(*n.condition);
            check_block(n.then_block, true);
            if (n.else_block) check_block(*n.else_block, true);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.value) check_expr(*n.value);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            check_expr(*n.expr);
          }
        },
        s.node);
  }

  void check_assign_target(const AssignStmt& a, const Span& span) {
    if (!a.self_path) {
      if (!visible(a.target.front())) {
        report(span, "assignment to undeclared name '" + a.target.front() + "'", DiagCode::unknown_identifier);
      }
      return;
    }
    const auto& segs = a.target;
    if (segs.size() == 2 && segs[0] == "flags") return;
    if (segs.size() == 1 && !is_battler_attribute(segs[0]) && segs[0] != "flags" && segs[0] != "stages") {
      if (!scope_.role_known || scope_.fields.count(segs[0])) return;
      report(span, "unknown field 'self." + segs[0] + "'", DiagCode::unknown_identifier);
      return;
    }
    if (path_readable(PathRoot::self, segs)) {
      report(span, "'self." + join(segs) + "' is read-only", DiagCode::read_only);
    } else {
      report(span, "unknown attribute 'self." + join(segs) + "'", DiagCode::unknown_identifier);
    }
  }

  static std::string join(const std::vector<std::string>& segs) {
    std::string out;
    for (const auto& s : segs) {
      if (!out.empty()) out += '.';
      out += s;
    }
    return out;
  }

  bool path_readable(PathRoot root, const std::vector<std::string>& segs) const {
    if (root == PathRoot::battle) return segs.size() == 1 && is_battle_attribute(segs[0]);
    if (segs.size() == 2 && segs[0] == "flags") return true;
    if (segs.size() == 2 && segs[0] == "stages") return is_stage_stat(segs[1]);
    if (segs.size() != 1) return false;
    if (is_battler_attribute(segs[0])) return true;
    if (root == PathRoot::self && segs[0] != "flags" && segs[0] != "stages") {
      return !scope_.role_known || scope_.fields.count(segs[0]) > 0;
    }
    return false;
  }

  void check_expr(const Expr& e) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, NameExpr>) {
            if (!visible(n.name)) report(e.span, "unknown identifier '" + n.name + "'", DiagCode::unknown_identifier);
          } else if constexpr (std::is_same_v<T, PathExpr>) {
            if (!path_readable(n.root, n.segments)) {
              const char* root = n.root == PathRoot::self ? "self" : n.root == PathRoot::foe ? "foe" : "battle";
              report(e.span, std::string("unknown attribute '") + root + "." + join(n.segments) + "'",
                     DiagCode::unknown_identifier);
            }
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            for (const auto& a : n.args) check_expr(*a);
            check_call(n, e.span);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            check_expr(*n.lhs);
            check_expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, NotExpr>) {
            check_expr(*n.operand);
          }
        },
        e.node);
  }

  void check_call(const CallExpr& c, const Span& span) {
    const int argc = static_cast<int>(c.args.size());
    int arity = -1;
    if (auto b = find_builtin(c.callee)) {
      arity = b->arity;
    } else if (auto it = scope_.methods.find(c.callee); it != scope_.methods.end()) {
      arity = it->second;
    } else if (!scope_.role_known) {
      return;  // may resolve to a role method once merged
    } else {
      report(span, "call to unknown function '" + c.callee + "'", DiagCode::unknown_callable);
      return;
    }
    if (argc != arity) {
      report(span,
             "'" + c.callee + "' expects " + std::to_string(arity) + " argument(s), got " + std::to_string(argc),
             DiagCode::arity);
    }
  }

  const Scope& scope_;
  std::vector<Diagnostic>& out_;
  std::vector<std::set<std::string>> locals_;
};

void check_method_headers(const std::vector<MethodDef>& methods, std::vector<Diagnostic>& out) {
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (!names.insert(m.name).second) {
      out.push_back({Severity::error, m.span, "duplicate method '" + m.name + "'", DiagCode::duplicate_name});
    }
    if (find_builtin(m.name)) {
      out.push_back({Severity::error, m.span, "method '" + m.name + "' shadows a builtin", DiagCode::duplicate_name});
    }
    for (const auto& h : kHooks) {
      if (h.name == m.name && static_cast<int>(m.params.size()) != h.arity) {
        out.push_back({Severity::error, m.span,
                       "hook '" + m.name + "' takes " + std::to_string(h.arity) + " parameter(s)", DiagCode::arity});
      }
    }
    if (is_move_slot(m.name) && !m.params.empty()) {
      out.push_back({Severity::error, m.span, "move slot '" + m.name + "' takes no parameters", DiagCode::arity});
    }
  }
}

void add_hooks(Scope& scope) {
  for (const auto& h : kHooks) scope.methods.emplace(h.name, h.arity);
}

// Names called from anywhere in a method body.
void collect_calls(const Expr& e, std::set<std::string>& out);

void collect_calls(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LetStmt> || std::is_same_v<T, AssignStmt>) {
            collect_calls(*n.value, out);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            collect_calls(*n.condition, out);
            collect_calls(n.then_block, out);
            if (n.else_block) collect_calls(*n.else_block, out);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.value) collect_calls(*n.value, out);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            collect_calls(*n.expr, out);
          }
        },
        s.node);
  }
}

void collect_calls(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CallExpr>) {
          out.insert(n.callee);
          for (const auto& a : n.args) collect_calls(*a, out);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          collect_calls(*n.lhs, out);
          collect_calls(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          collect_calls(*n.operand, out);
        }
      },
      e.node);
}

bool implicitly_called(const std::string& name) { return is_hook(name) || is_move_slot(name); }

// `name` is called by some method of `methods` other than itself.
bool called_by_other(const std::string& name, const std::vector<const MethodDef*>& methods) {
  for (const auto* m : methods) {
    if (m->name == name) continue;
    std::set<std::string> calls;
    collect_calls(m->body, calls);
    if (calls.count(name)) return true;
  }
  return false;
}

}  // namespace

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::vector<Diagnostic> validate(const RoleAst& role) {
  std::vector<Diagnostic> out;
  Scope scope;
  std::set<std::string> field_names;
  for (const auto& f : role.fields) {
    if (!field_names.insert(f.name).second) {
      out.push_back({Severity::error, f.span, "duplicate field '" + f.name + "'", DiagCode::duplicate_name});
    }
    if (is_battler_attribute(f.name) || f.name == "flags" || f.name == "stages") {
      out.push_back(
          {Severity::error, f.span, "field '" + f.name + "' collides with a battler attribute", DiagCode::duplicate_name});
    }
  }
  scope.fields = field_names;
  add_hooks(scope);
  check_method_headers(role.methods, out);
  for (const auto& m : role.methods) scope.methods[m.name] = static_cast<int>(m.params.size());
  for (const auto& m : role.methods) BodyChecker(scope, out).check_method(m);
  return out;
}

std::vector<Diagnostic> validate(const DeltaAst& delta) {
  std::vector<Diagnostic> out;
  if (delta.methods.empty()) {
    out.push_back({Severity::error, Span{}, "an increment needs at least one method", DiagCode::syntax});
  }
  Scope scope;
  scope.role_known = false;
  add_hooks(scope);
  check_method_headers(delta.methods, out);
  for (const auto& m : delta.methods) scope.methods[m.name] = static_cast<int>(m.params.size());
  for (const auto& m : delta.methods) BodyChecker(scope, out).check_method(m);
  return out;
}

std::vector<Diagnostic> validate(const DeltaAst& delta, const RoleAst& role) {
  std::vector<Diagnostic> out;
  if (delta.target != role.name) {
    out.push_back({Severity::error, Span{},
                   "increment targets '" + delta.target + "' but the role is '" + role.name + "'",
                   DiagCode::bad_target});
  }
  if (delta.methods.empty()) {
    out.push_back({Severity::error, Span{}, "an increment needs at least one method", DiagCode::syntax});
  }
  Scope scope;
  for (const auto& f : role.fields) scope.fields.insert(f.name);
  add_hooks(scope);
  check_method_headers(delta.methods, out);
  for (const auto& m : role.methods) scope.methods[m.name] = static_cast<int>(m.params.size());
  for (const auto& m : delta.methods) scope.methods[m.name] = static_cast<int>(m.params.size());
  for (const auto& m : delta.methods) BodyChecker(scope, out).check_method(m);

  // Role methods shadowed by the increment no longer count as callers.
  std::vector<const MethodDef*> merged;
  for (const auto& m : role.methods) {
    if (!delta.find_method(m.name)) merged.push_back(&m);
  }
  for (const auto& m : delta.methods) merged.push_back(&m);

  // Role methods calling something the increment changed arity of are caught
  // here as well: re-check them against the merged scope.
  for (const auto& m : role.methods) {
    if (delta.find_method(m.name)) continue;
    std::vector<Diagnostic> role_diags;
    BodyChecker(scope, role_diags).check_method(m);
    for (auto& d : role_diags) {
      d.message = "in existing method '" + m.name + "': " + d.message;
      out.push_back(std::move(d));
    }
  }

  for (const auto& m : delta.methods) {
    if (implicitly_called(m.name) || called_by_other(m.name, merged)) continue;
    out.push_back({Severity::error, m.span, "method '" + m.name + "' is defined but never called",
                   DiagCode::dangling_method});
  }
  return out;
}

std::vector<std::string> dangling_methods(const RoleAst& role) {
  std::vector<const MethodDef*> all;
  for (const auto& m : role.methods) all.push_back(&m);
  std::vector<std::string> out;
  for (const auto& m : role.methods) {
    if (!implicitly_called(m.name) && !called_by_other(m.name, all)) out.push_back(m.name);
  }
  return out;
}

}  // namespace delta::dsl
