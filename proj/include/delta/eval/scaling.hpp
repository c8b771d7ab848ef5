#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delta/battle/battle.hpp"
#include "delta/core/engine.hpp"
#include "delta/eval/database.hpp"
#include "delta/proxy/neural_proxy.hpp"
#include "json.hpp"

namespace delta::eval {

enum class FailureKind { none, parse, validate, smoke_battle, proxy };
const char* to_string(FailureKind k);

struct ScalingStep {
  std::size_t engine_size = 0;   // tokens of the printed state after the step
  std::size_t context_size = 0;  // tokens phase B saw
  std::size_t full_size = 0;     // tokens of every method before the step
  std::size_t method_count = 0;  // methods before the step
  std::string instruction;
};

struct ScalingTrace {
  std::uint64_t run_id = 0;
  int steps_completed = 0;
  std::size_t engine_size_at_failure = 0;  // size of the last good state
  FailureKind failure_kind = FailureKind::none;
  std::string failure_message;
  std::vector<ScalingStep> steps;
  std::optional<core::EngineState> final_state;  // last executable state

  nlohmann::json to_json() const;
};

struct ScalingOptions {
  int max_steps = 40;
  bool retrieval = true;
};

// One battle against a fixed reference opponent in which every move slot of
// `state` is played once (fresh HP per slot). Returns the first error
// attributed to the role.
std::optional<battle::RuntimeError> smoke_battle(const core::EngineState& state);

// Starts from synth_opponent(seed) and asks `proxy` for one database-drawn
// instruction per step until an increment is not executable or max_steps
// steps succeed.
ScalingTrace scaling_run(proxy::NeuralProxy& proxy, const Database& db, std::uint64_t seed,
                         const ScalingOptions& options = {});

inline constexpr std::size_t kSizeBucket = 1000;

struct ScalingHistogram {
  std::map<int, int> by_steps;           // steps completed → failed runs
  std::map<std::size_t, int> by_size;    // bucket lower edge → failed runs
  int maxed = 0;
  int total = 0;

  std::string steps_csv() const;  // steps,count
  std::string size_csv() const;   // bucket_start,bucket_end,count
  nlohmann::json to_json() const;
};

// Throws delta::Error on an empty trace list.
ScalingHistogram scaling_histogram(const std::vector<ScalingTrace>& traces);

// One row per run.
std::string traces_csv(const std::vector<ScalingTrace>& traces);

}  // namespace delta::eval
