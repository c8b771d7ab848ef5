#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "delta/battle/battle.hpp"
#include "json.hpp"

namespace delta::service {

// "random" | [move indices, cycled] | "interactive"
struct PolicySpec {
  enum class Kind { random, scripted, interactive };
  Kind kind = Kind::random;
  std::vector<int> moves;

  // Throws delta::Error.
  static PolicySpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct BattleRequest {
  core::EngineState a{dsl::RoleAst{}};
  core::EngineState b{dsl::RoleAst{}};
  std::string label_a;
  std::string label_b;
  std::uint64_t seed = 0;
  PolicySpec policy_a;
  PolicySpec policy_b;
  int max_turns = battle::kMaxTurns;
};

enum class ActionResult { accepted, not_found, not_interactive, already_submitted, invalid_move, finished };

// Runs battles on a fixed number of worker threads; further battles queue.
// Events are published per turn so readers can follow a battle live.
class BattleManager {
 public:
  BattleManager(int max_concurrent, std::chrono::milliseconds interactive_timeout);
  ~BattleManager();
  BattleManager(const BattleManager&) = delete;
  BattleManager& operator=(const BattleManager&) = delete;

  // Throws delta::Error when a role cannot enter battle.
  std::string start(BattleRequest request);

  std::optional<nlohmann::json> status(const std::string& id) const;

  // Event lines from index `from` on. Blocks up to `wait` for new events
  // while the battle runs. Returns nullopt for an unknown id; `finished`
  // tells whether the log is complete.
  std::optional<std::vector<std::string>> events(const std::string& id, std::size_t from,
                                                 std::chrono::milliseconds wait, bool& finished);

  // Move for the current turn of an interactive side. One per side per turn.
  ActionResult submit(const std::string& id, battle::SideId side, int move);

  // Blocks until the battle ends or `timeout` passes; true when it ended.
  bool wait_finished(const std::string& id, std::chrono::milliseconds timeout);

 private:
  struct Session;

  void worker();
  void run(Session& s);
  std::shared_ptr<Session> find(const std::string& id) const;

  std::chrono::milliseconds interactive_timeout_;
  mutable std::mutex mu_;
  std::condition_variable queue_cv_;
  std::deque<std::shared_ptr<Session>> queue_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace delta::service
