#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "delta/dsl/diagnostic.hpp"

namespace delta::dsl {

// Immutable shared node handle with deep (structural) equality. ASTs are
// values: once built they are never mutated, so sharing subtrees is safe.
template <class T>
class Ref {
 public:
  Ref() = default;
  Ref(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}  // NOLINT

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }
  explicit operator bool() const { return static_cast<bool>(ptr_); }

  friend bool operator==(const Ref& a, const Ref& b) {
    if (a.ptr_ == b.ptr_) return true;
    if (!a.ptr_ || !b.ptr_) return false;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::shared_ptr<const T> ptr_;
};

struct Literal {
  std::variant<std::int64_t, double, bool, std::string> value;

  bool operator==(const Literal&) const = default;
};

enum class BinaryOp { add, sub, mul, div, mod, lt, le, gt, ge, eq, ne, logical_and, logical_or };

const char* to_string(BinaryOp op);

// Which object a dotted path starts from.
enum class PathRoot { self, foe, battle };

struct Expr;
using ExprRef = Ref<Expr>;

struct LiteralExpr {
  Literal value;
  bool operator==(const LiteralExpr&) const = default;
};

// A bare identifier: parameter or local binding.
struct NameExpr {
  std::string name;
  bool operator==(const NameExpr&) const = default;
};

// self.a.b / foe.a / battle.turn
struct PathExpr {
  PathRoot root = PathRoot::self;
  std::vector<std::string> segments;
  bool operator==(const PathExpr&) const = default;
};

struct CallExpr {
  std::string callee;
  std::vector<ExprRef> args;
  bool operator==(const CallExpr&) const = default;
};

struct BinaryExpr {
  BinaryOp op = BinaryOp::add;
  ExprRef lhs;
  ExprRef rhs;
  bool operator==(const BinaryExpr&) const = default;
};

struct NotExpr {
  ExprRef operand;
  bool operator==(const NotExpr&) const = default;
};

struct Expr {
  std::variant<LiteralExpr, NameExpr, PathExpr, CallExpr, BinaryExpr, NotExpr> node;
  Span span;

  // Spans are positional metadata, not structure.
  bool operator==(const Expr& o) const { return node == o.node; }
};

struct Stmt;
using Block = std::vector<Stmt>;

struct LetStmt {
  std::string name;
  ExprRef value;
  bool operator==(const LetStmt&) const = default;
};

// Target is either a local (`x = ...`, path of size 1 with self_path false)
// or a self path (`self.flags.protected = ...`).
struct AssignStmt {
  bool self_path = false;
  std::vector<std::string> target;
  ExprRef value;
  bool operator==(const AssignStmt&) const = default;
};

struct IfStmt {
  ExprRef condition;
  Block then_block;
  std::optional<Block> else_block;
  bool operator==(const IfStmt&) const;
};

struct ReturnStmt {
  ExprRef value;  // empty for a bare `return`
  bool operator==(const ReturnStmt&) const = default;
};

struct ExprStmt {
  ExprRef expr;
  bool operator==(const ExprStmt&) const = default;
};

struct Stmt {
  std::variant<LetStmt, AssignStmt, IfStmt, ReturnStmt, ExprStmt> node;
  Span span;

  bool operator==(const Stmt& o) const { return node == o.node; }
};

inline bool IfStmt::operator==(const IfStmt& o) const {
  return condition == o.condition && then_block == o.then_block && else_block == o.else_block;
}

struct FieldDef {
  std::string name;
  Literal value;
  Span span;

  bool operator==(const FieldDef& o) const { return name == o.name && value == o.value; }
};

struct MethodDef {
  std::string name;
  std::vector<std::string> params;
  Block body;
  Span span;

  bool operator==(const MethodDef& o) const {
    return name == o.name && params == o.params && body == o.body;
  }
};

struct RoleAst {
  std::string name;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;

  bool operator==(const RoleAst&) const = default;

  const MethodDef* find_method(std::string_view n) const;
  const FieldDef* find_field(std::string_view n) const;
};

struct DeltaAst {
  std::string target;
  std::vector<MethodDef> methods;

  bool operator==(const DeltaAst&) const = default;

  const MethodDef* find_method(std::string_view n) const;
};

using Program = std::variant<RoleAst, DeltaAst>;

// Helpers for building nodes in code (rule-based initialisation, generators).
ExprRef make_literal(Literal v);
ExprRef make_int(std::int64_t v);
ExprRef make_string(std::string v);
ExprRef make_name(std::string n);
ExprRef make_path(PathRoot root, std::vector<std::string> segments);
ExprRef make_call(std::string callee, std::vector<ExprRef> args);
ExprRef make_binary(BinaryOp op, ExprRef lhs, ExprRef rhs);
ExprRef make_not(ExprRef operand);

Stmt make_expr_stmt(ExprRef e);
Stmt make_return(ExprRef e = {});
Stmt make_let(std::string name, ExprRef value);

}  // namespace delta::dsl
