#include "delta/dsl/printer.hpp"

#include <charconv>
#include <cstdio>

namespace delta::dsl {

namespace {

// Binding strength; higher binds tighter.
constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;
constexpr int kPrecCmp = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecAtom = 10;

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::logical_or: return kPrecOr;
    case BinaryOp::logical_and: return kPrecAnd;
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge:
    case BinaryOp::eq:
    case BinaryOp::ne: return kPrecCmp;
    case BinaryOp::add:
    case BinaryOp::sub: return kPrecAdd;
    case BinaryOp::mul:
    case BinaryOp::div:
    case BinaryOp::mod: return kPrecMul;
  }
  return kPrecAtom;
}

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return precedence(b->op);
  if (std::holds_alternative<NotExpr>(e.node)) return kPrecNot;
  return kPrecAtom;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

void emit_expr(std::string& out, const Expr& e);

void emit_operand(std::string& out, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    out += '(';
    emit_expr(out, e);
    out += ')';
  } else {
    emit_expr(out, e);
  }
}

void emit_expr(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralExpr>) {
          out += print_literal(n.value);
        } else if constexpr (std::is_same_v<T, NameExpr>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, PathExpr>) {
          out += n.root == PathRoot::self ? "self" : n.root == PathRoot::foe ? "foe" : "battle";
          for (const auto& s : n.segments) {
            out += '.';
            out += s;
          }
        } else if constexpr (std::is_same_v<T, CallExpr>) {
          out += n.callee;
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            emit_expr(out, *n.args[i]);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          const int p = precedence(n.op);
          emit_operand(out, *n.lhs, p);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          emit_operand(out, *n.rhs, p + 1);  // left-associative
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          out += "not ";
          emit_operand(out, *n.operand, kPrecNot);
        }
      },
      e.node);
}

void indent_to(std::string& out, int indent) { out.append(static_cast<std::size_t>(indent) * 2, ' '); }

void emit_block(std::string& out, const Block& b, int indent);

void emit_stmt(std::string& out, const Stmt& s, int indent) {
  indent_to(out, indent);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LetStmt>) {
          out += "let " + n.name + " = ";
          emit_expr(out, *n.value);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          if (n.self_path) out += "self.";
          for (std::size_t i = 0; i < n.target.size(); ++i) {
            if (i) out += '.';
            out += n.target[i];
          }
          out += " = ";
          emit_expr(out, *n.value);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out += "if ";
          emit_expr(out, *n.condition);
          out += ' ';
          emit_block(out, n.then_block, indent);
          if (n.else_block) {
            out += " else ";
            emit_block(out, *n.else_block, indent);
          }
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          out += "return";
          if (n.value) {
            out += ' ';
            emit_expr(out, *n.value);
          }
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          emit_expr(out, *n.expr);
        }
      },
      s.node);
  out += '\n';
}

void emit_block(std::string& out, const Block& b, int indent) {
  if (b.empty()) {
    out += "{}";
    return;
  }
  out += "{\n";
  for (const auto& s : b) emit_stmt(out, s, indent + 1);
  indent_to(out, indent);
  out += '}';
}

void emit_methods(std::string& out, const std::vector<MethodDef>& methods, bool blank_before_first) {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i > 0 || blank_before_first) out += '\n';
    out += print_method(methods[i], 1);
  }
}

}  // namespace

std::string print_literal(const Literal& lit) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[400];
          auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
          std::string s(buf, p);
          if (s.find('.') == std::string::npos) s += ".0";
          return s;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return quote(v);
        }
      },
      lit.value);
}

std::string print_expr(const Expr& expr) {
  std::string out;
  emit_expr(out, expr);
  return out;
}

std::string print_signature(const MethodDef& m) {
  std::string out = "fn " + m.name + "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i) out += ", ";
    out += m.params[i];
  }
  out += ')';
  return out;
}

std::string print_method(const MethodDef& m, int indent) {
  std::string out;
  indent_to(out, indent);
  out += print_signature(m);
  out += ' ';
  emit_block(out, m.body, indent);
  out += '\n';
  return out;
}

std::string print(const RoleAst& role) {
  std::string out = "role " + role.name + " {";
  if (role.fields.empty() && role.methods.empty()) return out + "}\n";
  out += '\n';
  for (const auto& f : role.fields) out += "  let " + f.name + " = " + print_literal(f.value) + "\n";
  emit_methods(out, role.methods, !role.fields.empty());
  out += "}\n";
  return out;
}

std::string print(const DeltaAst& delta) {
  std::string out = "increment " + delta.target + " {\n";
  emit_methods(out, delta.methods, false);
  out += "}\n";
  return out;
}

std::string print(const Program& program) {
  return std::visit([](const auto& ast) { return print(ast); }, program);
}

}  // namespace delta::dsl
