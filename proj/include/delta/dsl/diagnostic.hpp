#pragma once

#include <string>
#include <vector>

namespace delta::dsl {

struct Span {
  int line = 0;  // 1-based; 0 means "no source position"
  int column = 0;
  int length = 0;

  bool operator==(const Span&) const = default;
};

enum class Severity { error, warning };

// Stable codes so callers (the filter chain, the service) can branch on the
// kind of problem without matching message text.
enum class DiagCode {
  syntax,
  unknown_identifier,
  unknown_callable,
  duplicate_name,
  arity,
  read_only,
  dangling_method,
  bad_target,
};

struct Diagnostic {
  Severity severity = Severity::error;
  Span span;
  std::string message;
  DiagCode code = DiagCode::syntax;
};

const char* to_string(DiagCode code);
std::string format(const Diagnostic& d);
std::string summarize(const std::vector<Diagnostic>& diagnostics);

}  // namespace delta::dsl
