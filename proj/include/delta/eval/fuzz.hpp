#pragma once

#include <cstdint>
#include <string>

#include "delta/battle/rng.hpp"
#include "delta/dsl/ast.hpp"

namespace delta::eval {

// Random grammar-conforming program text. Everything emitted parses and
// validates; layout (spacing, comments, redundant parentheses, line breaks
// inside argument lists) is randomized so the text is rarely canonical.
class ProgramFuzzer {
 public:
  explicit ProgramFuzzer(std::uint64_t seed) : rng_(seed) {}

  // A role with fields, hook overrides, move slots and helpers.
  std::string role_source();

  // An increment valid against `target`: overrides keep arity, and every new
  // helper is called from a move slot of the same increment.
  std::string delta_source(const dsl::RoleAst& target);

  // Random in [lo, hi].
  int between(int lo, int hi) { return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool coin(int percent = 50) { return static_cast<int>(rng_.below(100)) < percent; }

 private:
  battle::Rng rng_;
};

}  // namespace delta::eval
