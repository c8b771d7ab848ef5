#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "delta/dsl/diagnostic.hpp"
#include "json.hpp"

namespace delta::battle {

struct None {
  bool operator==(const None&) const = default;
};

// Runtime value of the role language.
using Value = std::variant<None, std::int64_t, double, bool, std::string>;

std::string describe(const Value& v);

inline constexpr int kStepBudget = 10000;
inline constexpr int kMaxCallDepth = 32;

enum class RuntimeErrorKind {
  unknown_identifier,
  type_mismatch,
  divide_by_zero,
  budget_exceeded,
  depth_exceeded,
  domain_violation,
};

const char* to_string(RuntimeErrorKind k);

enum class SideId { A, B };

inline SideId other(SideId s) { return s == SideId::A ? SideId::B : SideId::A; }
inline int index(SideId s) { return s == SideId::A ? 0 : 1; }
const char* to_string(SideId s);

// Failure inside role code, attributed to the side whose method was running.
struct RuntimeError {
  RuntimeErrorKind kind = RuntimeErrorKind::type_mismatch;
  SideId side = SideId::A;
  std::string method;
  dsl::Span span;
  std::string message;

  bool operator==(const RuntimeError&) const = default;

  nlohmann::json to_json() const;
};

}  // namespace delta::battle
