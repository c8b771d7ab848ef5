#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "delta/battle/rng.hpp"
#include "delta/battle/runtime.hpp"
#include "delta/battle/types.hpp"
#include "delta/core/engine.hpp"
#include "json.hpp"

namespace delta::battle {

inline constexpr int kLevel = 50;
inline constexpr int kMaxTurns = 100;
inline constexpr int kMinStage = -6;
inline constexpr int kMaxStage = 6;

struct Stats {
  int atk = 0;
  int def = 0;
  int spa = 0;
  int spd = 0;
  int spe = 0;

  bool operator==(const Stats&) const = default;
};

// One battler: the role's code plus its live battle attributes.
struct BattleRole {
  std::shared_ptr<const core::EngineState> engine;
  dsl::RoleAst program;  // engine->full_program()
  std::string name;
  int level = kLevel;
  int hp = 1;
  int max_hp = 1;
  Stats stats;
  std::map<std::string, int> stages;  // atk def spa spd spe, clamped to [-6, 6]
  std::vector<Type> types;
  std::map<std::string, std::int64_t> flags;
  std::map<std::string, Value> fields;  // role `let` fields, writable per battle

  int stage(const std::string& stat) const;
  // Stat after stage multipliers: (2+s)/2 for s >= 0, 2/(2-s) below, floored.
  int effective(const std::string& stat) const;
  bool has_type(Type t) const;
  std::int64_t flag(const std::string& name) const;
};

// Level-50 stats from base values: hp = B + 60, others B + 5. Reads the
// species/type/base-stat fields init_engine writes; throws delta::Error when
// they are missing or malformed.
BattleRole make_battle_role(const core::EngineState& state);

enum class EventKind { move_used, damage, boost, type_change, flag_set, heal, status, faint, runtime_error, rng_draw };

const char* to_string(EventKind k);

struct Event {
  int turn = 0;
  std::string actor;  // "A", "B" or "battle"
  EventKind kind = EventKind::move_used;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Event&) const = default;

  nlohmann::json to_json() const;
  // Single-line JSON with sorted keys.
  std::string to_line() const;
};

enum class Outcome { ongoing, win_a, win_b, draw, error_a, error_b };

const char* to_string(Outcome o);

struct BattleState {
  std::array<BattleRole, 2> sides;
  int turn = 1;
  Rng rng;
  std::vector<Event> log;
  Outcome outcome = Outcome::ongoing;
  std::optional<RuntimeError> error;

  BattleState(BattleRole a, BattleRole b, std::uint64_t seed);

  BattleRole& side(SideId s) { return sides[index(s)]; }
  const BattleRole& side(SideId s) const { return sides[index(s)]; }
  bool over() const { return outcome != Outcome::ongoing; }

  // Logged draw in [0, bound).
  std::uint64_t draw(std::uint64_t bound, const std::string& purpose, const std::string& actor = "battle");
};

// Closed-form damage: floor(floor(floor(2*L/5 + 2) * P * A / D) / 50 + 2),
// then STAB 3/2 and the type multiplier, each floored. At least 1 unless the
// multiplier is 0, in which case exactly 0.
std::int64_t damage_formula(std::int64_t power, std::int64_t attack, std::int64_t defense, bool stab,
                            Multiplier mult, int level = kLevel);

// Interpret `method` (no arguments) for side `actor`. On a runtime error the
// battle ends with the erring side's error outcome.
void invoke(BattleState& b, SideId actor, const std::string& method);

// Chooses the move index N (for `move_N`) a side plays this turn.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int choose(BattleState& b, SideId side) = 0;
};

// Uniform over the side's own move slots, one logged draw per turn.
class RandomPolicy : public Policy {
 public:
  int choose(BattleState& b, SideId side) override;
};

// Plays the listed move indices in order, cycling.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<int> moves);
  int choose(BattleState& b, SideId side) override;

 private:
  std::vector<int> moves_;
  std::size_t next_ = 0;
};

class FunctionPolicy : public Policy {
 public:
  explicit FunctionPolicy(std::function<int(BattleState&, SideId)> f) : f_(std::move(f)) {}
  int choose(BattleState& b, SideId side) override { return f_(b, side); }

 private:
  std::function<int(BattleState&, SideId)> f_;
};

// Move slot indices a side can play, ascending.
std::vector<int> move_indices(const BattleRole& r);

// One turn. Order: a positive `priority` flag first, then stage-adjusted
// speed, ties broken by one draw. Throws delta::Error when an index does not
// name a move slot of that side or the battle is over.
void step(BattleState& b, int move_a, int move_b);

struct BattleLog {
  std::vector<Event> events;
  Outcome outcome = Outcome::draw;
  int turns = 0;
  std::optional<RuntimeError> error;

  // One event per line.
  std::string to_jsonl() const;
};

BattleLog run_battle(const core::EngineState& a, const core::EngineState& b, Policy& policy_a, Policy& policy_b,
                     std::uint64_t seed, int max_turns = kMaxTurns);

BattleLog run_battle(BattleState state, Policy& policy_a, Policy& policy_b, int max_turns = kMaxTurns);

}  // namespace delta::battle
