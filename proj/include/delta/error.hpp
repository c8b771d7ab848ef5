#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "delta/dsl/diagnostic.hpp"

namespace delta {

// Root of every error raised by the engine. Runtime failures inside role code
// are not exceptions at the API surface; they surface as battle outcomes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DiagnosticError : public Error {
 public:
  DiagnosticError(const std::string& what, std::vector<dsl::Diagnostic> diagnostics)
      : Error(what + ": " + dsl::summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<dsl::Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<dsl::Diagnostic> diagnostics_;
};

class SyntaxError : public DiagnosticError {
 public:
  explicit SyntaxError(std::vector<dsl::Diagnostic> d) : DiagnosticError("syntax error", std::move(d)) {}
};

class ValidationError : public DiagnosticError {
 public:
  explicit ValidationError(std::vector<dsl::Diagnostic> d)
      : DiagnosticError("validation error", std::move(d)) {}
};

class ScriptError : public Error {
 public:
  using Error::Error;
};

class TargetMismatch : public Error {
 public:
  TargetMismatch(const std::string& delta_target, const std::string& role)
      : Error("increment targets '" + delta_target + "' but the engine holds '" + role + "'") {}
};

class UnknownEntry : public Error {
 public:
  explicit UnknownEntry(std::vector<std::string> names)
      : Error("unknown engine entries: " + join(names)), names_(std::move(names)) {}

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  static std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
      if (!out.empty()) out += ", ";
      out += n;
    }
    return out;
  }
  std::vector<std::string> names_;
};

class ProxyError : public Error {
 public:
  enum class Kind { transport, timeout, bad_status };

  ProxyError(Kind kind, const std::string& message, int status = 0)
      : Error(message), kind_(kind), status_(status) {}

  Kind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }

 private:
  Kind kind_;
  int status_;
};

// The proxy answered, but its answer is not a usable increment.
class NonExecutableDelta : public Error {
 public:
  enum class Stage { extract, parse, validate };

  NonExecutableDelta(Stage stage, const std::string& message, std::string raw_response)
      : Error(message), stage_(stage), raw_(std::move(raw_response)) {}

  Stage stage() const noexcept { return stage_; }
  const std::string& raw_response() const noexcept { return raw_; }

 private:
  Stage stage_;
  std::string raw_;
};

class EmptyResponse : public Error {
 public:
  EmptyResponse() : Error("empty proxy response") {}
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

}  // namespace delta
