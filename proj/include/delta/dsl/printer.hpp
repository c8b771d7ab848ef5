#pragma once

#include <string>

#include "delta/dsl/ast.hpp"

namespace delta::dsl {

// Canonical text. Declaration order is preserved, one statement per line,
// two-space indentation, minimal parentheses.
std::string print(const RoleAst& role);
std::string print(const DeltaAst& delta);
std::string print(const Program& program);

std::string print_method(const MethodDef& method, int indent = 0);
std::string print_signature(const MethodDef& method);
std::string print_expr(const Expr& expr);
std::string print_literal(const Literal& lit);

}  // namespace delta::dsl
