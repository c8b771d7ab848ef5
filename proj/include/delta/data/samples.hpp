#pragma once

#include <string>
#include <vector>

#include "delta/data/bundle.hpp"
#include "delta/data/interest.hpp"
#include "json.hpp"

namespace delta::data {

// One incremental-prediction example: given the instruction and the context
// retrieved from the state before step t, predict the increment.
struct TrainingSample {
  std::string role_id;
  std::size_t step = 0;  // 1-based
  std::string instruction;
  std::string context;
  std::string delta_source;
  std::string full_code_after;
  InterestVector toi;  // of the state after the step
  std::string source;  // provenance of the role

  nlohmann::json to_json() const;
  static TrainingSample from_json(const nlohmann::json& j);
};

// One sample per history entry. The context is what retrieval returns from
// the state before the step for the recorded phase-A names, or for the
// existing methods the increment replaces when none were recorded. Each
// sample is checked to merge back into its stated result. Throws delta::Error
// on an empty history.
std::vector<TrainingSample> split_samples(const RoleBundle& role);

std::vector<TrainingSample> split_all(const std::vector<RoleBundle>& roles);

// One JSON object per line.
std::string to_jsonl(const std::vector<TrainingSample>& samples);

}  // namespace delta::data
