#pragma once

#include <string>
#include <string_view>

#include "delta/dsl/ast.hpp"

namespace delta::dsl {

enum class Origin { seed, proxy_response, file, api };

struct SourceText {
  std::string text;
  Origin origin = Origin::file;
};

// Grammar only; throws SyntaxError.
Program parse_syntax(std::string_view text);

// Grammar plus context-free validation (scoping, duplicates, builtin arity,
// attribute paths). Role programs are validated completely; increments are
// validated completely once merged against a role, see validate(delta, role).
// Throws SyntaxError or ValidationError.
Program parse(const SourceText& src);

// Convenience wrappers that also check the program kind.
RoleAst parse_role(std::string_view text, Origin origin = Origin::file);
DeltaAst parse_delta(std::string_view text, Origin origin = Origin::file);

}  // namespace delta::dsl
