#include "delta/eval/fuzz.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "delta/dsl/builtins.hpp"

namespace delta::eval {

namespace {

struct Sig {
  std::string name;
  int arity = 0;
};

constexpr std::array<const char*, 8> kFieldNames{"charge", "mood", "fury", "streak", "bonus", "phase", "shield", "mode"};
constexpr std::array<const char*, 7> kFlagNames{"protected", "priority", "charged", "rage", "burn", "focus", "marked"};
constexpr std::array<const char*, 8> kHelperNames{"h_rage", "h_focus", "h_aura", "h_scale", "h_shift", "h_guard",
                                                  "h_combo", "h_drain"};
constexpr std::array<const char*, 9> kStrings{"Fire", "Water", "atk", "spe", "Tackle", "burn", "",
                                              "say \\\"hi\\\"", "back\\\\slash"};
constexpr std::array<const char*, 6> kParamNames{"a", "b", "m", "p", "stat", "n"};
constexpr std::array<const char*, 3> kComments{"# tweak", "# TODO balance", "# from the script"};

class Gen {
 public:
  Gen(ProgramFuzzer& f, std::vector<std::string> fields, std::vector<Sig> methods)
      : f_(f), fields_(std::move(fields)), methods_(std::move(methods)) {}

  // Method text, header included, at indent 2.
  std::string method(const Sig& sig, const std::vector<std::string>& params, const std::vector<std::string>& prelude) {
    scopes_.assign(1, {});
    counter_ = 0;
    for (const auto& p : params) scopes_.back().push_back(p);
    std::string out = pad(1) + "fn " + sig.name + sp() + "(";
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," + sp(1) : sp()) + params[i];
    out += sp() + ")" + sp(1) + "{" + trailing() + "\n";
    for (const auto& line : prelude) out += pad(2) + line + "\n";
    const int n = f_.between(prelude.empty() ? 1 : 0, 4);
    for (int i = 0; i < n; ++i) out += stmt(2, 2);
    out += pad(1) + "}\n";
    return out;
  }

  std::string literal() {
    switch (f_.between(0, 5)) {
      case 0: return std::to_string(f_.between(0, 250));
      case 1: return std::to_string(f_.between(-40, -1));
      case 2: return std::to_string(f_.between(0, 9)) + "." + std::to_string(f_.between(0, 99));
      case 3: return std::string("\"") + kStrings[f_.between(0, kStrings.size() - 1)] + "\"";
      case 4: return f_.coin() ? "true" : "false";
      default: return f_.coin(20) ? "9223372036854775807" : std::to_string(f_.between(0, 10));
    }
  }

  // Fully parenthesised when compound so precedence never depends on layout.
  std::string expr(int depth) {
    const int pick = f_.between(0, depth > 0 ? 9 : 4);
    switch (pick) {
      case 0:
      case 1: return maybe_paren(literal());
      case 2: {
        auto locals = visible();
        if (locals.empty()) return literal();
        return maybe_paren(locals[f_.between(0, locals.size() - 1)]);
      }
      case 3:
      case 4: return maybe_paren(path());
      case 5:
      case 6: return call(depth - 1);
      case 7:
      case 8: {
        static constexpr std::array<const char*, 13> ops{"+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=",
                                                         "and", "or"};
        return "(" + sp() + expr(depth - 1) + " " + ops[f_.between(0, ops.size() - 1)] + " " + expr(depth - 1) + sp() +
               ")";
      }
      default: return "(not " + expr(depth - 1) + ")";
    }
  }

  std::string path() {
    switch (f_.between(0, 6)) {
      case 0: return std::string(f_.coin() ? "self." : "foe.") +
                     std::string(dsl::kBattlerAttributes[f_.between(0, dsl::kBattlerAttributes.size() - 1)]);
      case 1: return std::string(f_.coin() ? "self" : "foe") + ".stages." +
                     std::string(dsl::kStageStats[f_.between(0, dsl::kStageStats.size() - 1)]);
      case 2: return std::string(f_.coin() ? "self" : "foe") + ".flags." + kFlagNames[f_.between(0, kFlagNames.size() - 1)];
      case 3: return "battle.turn";
      default:
        if (fields_.empty()) return "self.hp";
        return "self." + fields_[f_.between(0, fields_.size() - 1)];
    }
  }

  std::string call(int depth) {
    std::string name;
    int arity;
    if (!methods_.empty() && f_.coin(35)) {
      const Sig& s = methods_[f_.between(0, methods_.size() - 1)];
      name = s.name;
      arity = s.arity;
    } else {
      const auto& b = dsl::kBuiltins[f_.between(0, dsl::kBuiltins.size() - 1)];
      name = std::string(b.name);
      arity = b.arity;
    }
    return call_text(name, arity, depth);
  }

  // Call with literal arguments only; valid in any scope.
  std::string call_literal(const std::string& name, int arity) {
    std::string out = name + "(";
    for (int i = 0; i < arity; ++i) out += (i ? ", " : "") + literal();
    return out + ")";
  }

  std::string call_text(const std::string& name, int arity, int depth) {
    std::string out = name + "(";
    for (int i = 0; i < arity; ++i) {
      if (i) out += ",";
      // line breaks inside parentheses continue the expression
      out += f_.coin(15) ? "\n" + pad(4) : (i ? " " : "");
      out += expr(std::max(depth, 0));
    }
    return out + ")";
  }

 private:
  std::string stmt(int indent, int depth) {
    std::string out;
    if (f_.coin(8)) out += "\n";
    if (f_.coin(6)) out += pad(indent) + kComments[f_.between(0, kComments.size() - 1)] + "\n";
    out += pad(indent);
    const int pick = f_.between(0, depth > 0 ? 7 : 5);
    auto locals = visible();
    switch (pick) {
      case 0: {
        std::string name = "v" + std::to_string(counter_++);
        out += "let " + name + sp(1) + "=" + sp(1) + expr(2);
        scopes_.back().push_back(name);
        break;
      }
      case 1:
        if (!locals.empty()) {
          out += locals[f_.between(0, locals.size() - 1)] + " = " + expr(2);
          break;
        }
        [[fallthrough]];
      case 2:
        out += std::string("self.flags.") + kFlagNames[f_.between(0, kFlagNames.size() - 1)] + " = " + expr(1);
        break;
      case 3:
        if (!fields_.empty()) {
          out += "self." + fields_[f_.between(0, fields_.size() - 1)] + " = " + expr(2);
          break;
        }
        [[fallthrough]];
      case 4:
        out += call(2);
        break;
      case 5:
        out += "return";
        if (f_.coin(70)) out += " " + expr(2);
        break;
      default: {
        out += "if " + expr(2) + sp(1) + "{" + trailing() + "\n";
        out += inner_block(indent + 1, depth - 1);
        out += pad(indent) + "}";
        if (f_.coin(40)) {
          out += " else {\n" + inner_block(indent + 1, depth - 1) + pad(indent) + "}";
        }
      }
    }
    return out + trailing() + "\n";
  }

  std::string inner_block(int indent, int depth) {
    scopes_.emplace_back();
    std::string out;
    const int n = f_.between(0, 3);
    for (int i = 0; i < n; ++i) out += stmt(indent, depth);
    scopes_.pop_back();
    return out;
  }

  std::vector<std::string> visible() const {
    std::vector<std::string> out;
    for (const auto& s : scopes_) out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  std::string maybe_paren(std::string s) { return f_.coin(10) ? "(" + s + ")" : s; }
  std::string sp(int min = 0) { return std::string(min + (f_.coin(15) ? 1 : 0), ' '); }
  std::string pad(int indent) { return std::string(indent * 2 + (f_.coin(5) ? 1 : 0), ' '); }
  std::string trailing() { return f_.coin(5) ? "  # note" : ""; }

  ProgramFuzzer& f_;
  std::vector<std::string> fields_;
  std::vector<Sig> methods_;
  std::vector<std::vector<std::string>> scopes_;
  int counter_ = 0;
};

std::vector<std::string> param_names(ProgramFuzzer& f, int arity) {
  std::vector<std::string> pool(kParamNames.begin(), kParamNames.end());
  std::vector<std::string> out;
  for (int i = 0; i < arity; ++i) {
    const int k = f.between(0, static_cast<int>(pool.size()) - 1);
    out.push_back(pool[k]);
    pool.erase(pool.begin() + k);
  }
  return out;
}

template <class T>
void shuffle(ProgramFuzzer& f, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[f.between(0, static_cast<int>(i) - 1)]);
}

}  // namespace

std::string ProgramFuzzer::role_source() {
  std::vector<std::string> fields;
  for (const char* n : kFieldNames) {
    if (coin(30)) fields.push_back(n);
  }
  std::vector<Sig> sigs;
  for (const auto& h : dsl::kHooks) {
    if (coin(40)) sigs.push_back({std::string(h.name), h.arity});
  }
  const int slots = between(1, 4);
  int slot_no = 0;
  for (int i = 0; i < slots; ++i) {
    slot_no += coin(80) ? 1 : between(2, 5);
    sigs.push_back({"move_" + std::to_string(slot_no), 0});
  }
  for (const char* h : kHelperNames) {
    if (coin(20)) sigs.push_back({h, between(0, 2)});
  }
  shuffle(*this, sigs);

  Gen g(*this, fields, sigs);
  std::string out = (coin(10) ? "# generated\n" : "") + std::string("role R") + std::to_string(between(0, 999)) + " {\n";
  for (const auto& f : fields) out += "  let " + f + " = " + g.literal() + "\n";
  if (!fields.empty() && coin(50)) out += "\n";
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (i && coin(70)) out += "\n";
    out += g.method(sigs[i], param_names(*this, sigs[i].arity), {});
  }
  return out + "}\n";
}

std::string ProgramFuzzer::delta_source(const dsl::RoleAst& target) {
  std::vector<std::string> fields;
  for (const auto& f : target.fields) fields.push_back(f.name);

  std::vector<Sig> existing;
  std::set<std::string> taken;
  int max_slot = 0;
  for (const auto& m : target.methods) {
    existing.push_back({m.name, static_cast<int>(m.params.size())});
    taken.insert(m.name);
    if (auto idx = dsl::move_slot_index(m.name)) max_slot = std::max(max_slot, *idx);
  }
  for (const auto& h : dsl::kHooks) {
    if (!taken.count(std::string(h.name))) existing.push_back({std::string(h.name), h.arity});
  }

  std::vector<Sig> picked;
  std::set<std::string> names;
  auto add = [&](Sig s) {
    if (names.insert(s.name).second) picked.push_back(std::move(s));
  };
  const int n = between(1, 3);
  for (int i = 0; i < n; ++i) {
    switch (between(0, 3)) {
      case 0: {
        const auto& h = dsl::kHooks[between(0, dsl::kHooks.size() - 1)];
        add({std::string(h.name), h.arity});
        break;
      }
      case 1:
        add(existing[between(0, existing.size() - 1)]);
        break;
      case 2:
        add({"move_" + std::to_string(++max_slot), 0});
        break;
      default: {
        std::string name = kHelperNames[between(0, kHelperNames.size() - 1)];
        if (taken.count(name)) {
          for (const auto& e : existing) {
            if (e.name == name) add(e);
          }
        } else {
          add({name, between(0, 2)});
        }
      }
    }
  }

  // anchor: a hook or move slot of the increment that calls every helper
  auto anchored = [](const Sig& s) { return dsl::is_hook(s.name) || dsl::is_move_slot(s.name); };
  std::vector<std::size_t> helpers;
  std::optional<std::size_t> anchor;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    if (anchored(picked[i])) {
      if (!anchor) anchor = i;
    } else {
      helpers.push_back(i);
    }
  }
  if (!helpers.empty() && !anchor) {
    picked.push_back({"move_" + std::to_string(++max_slot), 0});
    anchor = picked.size() - 1;
  }

  std::vector<Sig> callable = existing;
  for (const auto& s : picked) {
    if (!taken.count(s.name) && !dsl::is_hook(s.name)) callable.push_back(s);
  }
  Gen g(*this, fields, callable);

  std::string out = "increment " + target.name + " {\n";
  for (std::size_t i = 0; i < picked.size(); ++i) {
    std::vector<std::string> prelude;
    if (anchor && i == *anchor) {
      for (std::size_t h : helpers) prelude.push_back(g.call_literal(picked[h].name, picked[h].arity));
    }
    if (i && coin(70)) out += "\n";
    // hook overrides re-use the hook's arity; overrides of role methods keep theirs
    out += g.method(picked[i], param_names(*this, picked[i].arity), prelude);
  }
  return out + "}\n";
}

}  // namespace delta::eval
