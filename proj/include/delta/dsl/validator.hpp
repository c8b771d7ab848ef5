#pragma once

#include <string>
#include <vector>

#include "delta/dsl/ast.hpp"
#include "delta/dsl/diagnostic.hpp"

namespace delta::dsl {

std::vector<Diagnostic> validate(const RoleAst& role);

// Context-free checks only: anything that depends on the role the increment
// will land on (calls into role methods, role fields, dangling helpers) is
// deferred.
std::vector<Diagnostic> validate(const DeltaAst& delta);

// Full check of an increment against the role it targets, including the
// dangling-method rule: every method the increment defines must be a hook,
// a move slot, or be called from some other method of the merged program.
std::vector<Diagnostic> validate(const DeltaAst& delta, const RoleAst& role);

// Role methods that are neither hooks, move slots, nor called by any other
// role method.
std::vector<std::string> dangling_methods(const RoleAst& role);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace delta::dsl
