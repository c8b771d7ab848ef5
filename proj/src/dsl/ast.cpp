#include "delta/dsl/ast.hpp"

#include <algorithm>

#include "delta/dsl/builtins.hpp"
#include "delta/dsl/diagnostic.hpp"

namespace delta::dsl {

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::mod: return "%";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::logical_and: return "and";
    case BinaryOp::logical_or: return "or";
  }
  return "?";
}

const MethodDef* RoleAst::find_method(std::string_view n) const {
  auto it = std::find_if(methods.begin(), methods.end(), [&](const MethodDef& m) { return m.name == n; });
  return it == methods.end() ? nullptr : &*it;
}

const FieldDef* RoleAst::find_field(std::string_view n) const {
  auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldDef& f) { return f.name == n; });
  return it == fields.end() ? nullptr : &*it;
}

const MethodDef* DeltaAst::find_method(std::string_view n) const {
  auto it = std::find_if(methods.begin(), methods.end(), [&](const MethodDef& m) { return m.name == n; });
  return it == methods.end() ? nullptr : &*it;
}

ExprRef make_literal(Literal v) { return Expr{LiteralExpr{std::move(v)}, {}}; }
ExprRef make_int(std::int64_t v) { return make_literal(Literal{v}); }
ExprRef make_string(std::string v) { return make_literal(Literal{std::move(v)}); }
ExprRef make_name(std::string n) { return Expr{NameExpr{std::move(n)}, {}}; }
ExprRef make_path(PathRoot root, std::vector<std::string> segments) {
  return Expr{PathExpr{root, std::move(segments)}, {}};
}
ExprRef make_call(std::string callee, std::vector<ExprRef> args) {
  return Expr{CallExpr{std::move(callee), std::move(args)}, {}};
}
ExprRef make_binary(BinaryOp op, ExprRef lhs, ExprRef rhs) {
  return Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}, {}};
}
ExprRef make_not(ExprRef operand) { return Expr{NotExpr{std::move(operand)}, {}}; }

Stmt make_expr_stmt(ExprRef e) { return Stmt{ExprStmt{std::move(e)}, {}}; }
Stmt make_return(ExprRef e) { return Stmt{ReturnStmt{std::move(e)}, {}}; }
Stmt make_let(std::string name, ExprRef value) { return Stmt{LetStmt{std::move(name), std::move(value)}, {}}; }

// diagnostics

const char* to_string(DiagCode code) {
  switch (code) {
    case DiagCode::syntax: return "syntax";
    case DiagCode::unknown_identifier: return "unknown_identifier";
    case DiagCode::unknown_callable: return "unknown_callable";
    case DiagCode::duplicate_name: return "duplicate_name";
    case DiagCode::arity: return "arity";
    case DiagCode::read_only: return "read_only";
    case DiagCode::dangling_method: return "dangling_method";
    case DiagCode::bad_target: return "bad_target";
  }
  return "unknown";
}

std::string format(const Diagnostic& d) {
  std::string out = d.severity == Severity::error ? "error" : "warning";
  if (d.span.line > 0) out += " at " + std::to_string(d.span.line) + ":" + std::to_string(d.span.column);
  out += ": ";
  out += d.message;
  return out;
}

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "no diagnostics";
  std::string out = format(diagnostics.front());
  if (diagnostics.size() > 1) out += " (+" + std::to_string(diagnostics.size() - 1) + " more)";
  return out;
}

// builtins

std::optional<BuiltinInfo> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

bool is_hook(std::string_view name) {
  return std::any_of(kHooks.begin(), kHooks.end(), [&](const HookInfo& h) { return h.name == name; });
}

std::optional<int> move_slot_index(std::string_view name) {
  constexpr std::string_view prefix = "move_";
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto digits = name.substr(prefix.size());
  if (digits.size() > 6 || digits.front() == '0') return std::nullopt;
  int value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

bool is_move_slot(std::string_view name) { return move_slot_index(name).has_value(); }

bool is_battler_attribute(std::string_view name) {
  return std::find(kBattlerAttributes.begin(), kBattlerAttributes.end(), name) != kBattlerAttributes.end();
}

bool is_stage_stat(std::string_view name) {
  return std::find(kStageStats.begin(), kStageStats.end(), name) != kStageStats.end();
}

bool is_battle_attribute(std::string_view name) {
  return std::find(kBattleAttributes.begin(), kBattleAttributes.end(), name) != kBattleAttributes.end();
}

}  // namespace delta::dsl
