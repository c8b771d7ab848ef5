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

struct RoleEntry {
  std::string id;
  core::EngineState state;
};

struct ExeRoleResult {
  bool passed = true;
  int opponents_fought = 0;
  std::optional<battle::RuntimeError> first_error;
  std::optional<int> failing_opponent;  // index into the opponent list
};

struct ExeReport {
  std::map<std::string, ExeRoleResult> per_role;  // ordered by role id
  double exe_percent = 0;
  int n_opponents = 0;
  std::uint64_t seed = 0;

  std::size_t passed() const;
  nlohmann::json to_json() const;
};

struct ExeOptions {
  int n_opponents = 100;
  std::uint64_t seed = 0;
  int max_turns = battle::kMaxTurns;
  unsigned workers = 0;  // 0: one per hardware thread
  const Database* db = nullptr;  // null: the bundled database
  // Fixed opponent list replacing the synthesized one (n_opponents is then
  // its size).
  const std::vector<core::EngineState>* opponents = nullptr;
};

// The opponent list shared by every tested role.
std::vector<core::EngineState> exe_opponents(std::uint64_t seed, int n, const Database& db);

// Each role fights every opponent once as side A, both sides playing uniform
// random moves. A role passes iff no runtime error is attributed to it;
// errors of the opponent end that battle without counting against the role.
// The first error stops the role's run. Throws delta::Error on an empty role
// list or duplicate ids.
ExeReport exe_rate(const std::vector<RoleEntry>& roles, const ExeOptions& options = {});

enum class Verdict { equivalent, different };

class Judge {
 public:
  virtual ~Judge() = default;
  // nullopt abstains. A thrown ProxyError also counts as an abstention.
  virtual std::optional<Verdict> judge(const core::EngineState& candidate, const core::EngineState& reference) = 0;
};

// Equal canonical print of the full programs. Stricter than a model judge:
// renaming a helper already makes two roles different.
class MockJudge : public Judge {
 public:
  std::optional<Verdict> judge(const core::EngineState& candidate, const core::EngineState& reference) override;
};

// Sends both printed programs with a fixed rubric and reads the first
// EQUIVALENT / DIFFERENT token of the answer.
class LlmJudge : public Judge {
 public:
  explicit LlmJudge(proxy::TextGenerator& generator) : generator_(generator) {}
  std::optional<Verdict> judge(const core::EngineState& candidate, const core::EngineState& reference) override;

  static proxy::PromptBundle rubric_prompt(const core::EngineState& candidate, const core::EngineState& reference);

 private:
  proxy::TextGenerator& generator_;
};

struct AccPair {
  std::string id;
  core::EngineState candidate;
  core::EngineState reference;
};

struct AccReport {
  std::map<std::string, bool> per_role;  // judged pairs only
  std::vector<std::string> abstained;
  std::vector<std::string> excluded;     // candidate failed Exe
  std::size_t denominator = 0;
  double acc_percent = 0;

  nlohmann::json to_json() const;
};

// Judges every pair whose candidate is executable per `exe` (all pairs when
// `exe` is null). acc_percent is over judged pairs only.
AccReport acc_rate(const std::vector<AccPair>& pairs, Judge& judge, const ExeReport* exe = nullptr);

}  // namespace delta::eval
