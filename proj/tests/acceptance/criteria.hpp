#pragma once

#include <string>

namespace delta::acceptance {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// One check per headline requirement. Sizes are parameters so unit tests can
// run smaller versions of the same code.
Verdict dsl_roundtrip(int programs = 1000);
Verdict merge_laws(int pairs = 500);
Verdict damage_oracle();
Verdict battle_determinism(int battles = 100);
Verdict exe_semantics(int n_opponents = 100);
Verdict sample_arithmetic(int pools = 50);
Verdict scaling_harness(int runs = 100);
Verdict toi_monotonicity(int pairs = 500);
Verdict filter_chain();
Verdict crash_replay();

}  // namespace delta::acceptance
