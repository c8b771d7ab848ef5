#include "delta/battle/battle.hpp"

#include <algorithm>

#include "delta/dsl/builtins.hpp"
#include "delta/error.hpp"

namespace delta::battle {

std::string describe(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, None>) return "nothing";
        else if constexpr (std::is_same_v<T, std::int64_t>) return "integer " + std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return "decimal " + std::to_string(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else return "string \"" + x + "\"";
      },
      v);
}

const char* to_string(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::unknown_identifier: return "unknownIdentifier";
    case RuntimeErrorKind::type_mismatch: return "typeMismatch";
    case RuntimeErrorKind::divide_by_zero: return "divideByZero";
    case RuntimeErrorKind::budget_exceeded: return "budgetExceeded";
    case RuntimeErrorKind::depth_exceeded: return "depthExceeded";
    case RuntimeErrorKind::domain_violation: return "domainViolation";
  }
  return "?";
}

const char* to_string(SideId s) { return s == SideId::A ? "A" : "B"; }

nlohmann::json RuntimeError::to_json() const {
  return {{"kind", to_string(kind)}, {"side", to_string(side)},    {"method", method},
          {"line", span.line},       {"column", span.column},     {"message", message}};
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::move_used: return "move_used";
    case EventKind::damage: return "damage";
    case EventKind::boost: return "boost";
    case EventKind::type_change: return "type_change";
    case EventKind::flag_set: return "flag_set";
    case EventKind::heal: return "heal";
    case EventKind::status: return "status";
    case EventKind::faint: return "faint";
    case EventKind::runtime_error: return "runtime_error";
    case EventKind::rng_draw: return "rng_draw";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::ongoing: return "ongoing";
    case Outcome::win_a: return "winA";
    case Outcome::win_b: return "winB";
    case Outcome::draw: return "draw";
    case Outcome::error_a: return "errorA";
    case Outcome::error_b: return "errorB";
  }
  return "?";
}

nlohmann::json Event::to_json() const {
  return {{"turn", turn}, {"actor", actor}, {"kind", to_string(kind)}, {"payload", payload}};
}

std::string Event::to_line() const { return to_json().dump(); }

std::string BattleLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    out += e.to_line();
    out += '\n';
  }
  return out;
}

// -- roles -------------------------------------------------------------------

int BattleRole::stage(const std::string& stat) const {
  auto it = stages.find(stat);
  return it == stages.end() ? 0 : it->second;
}

int BattleRole::effective(const std::string& stat) const {
  int base = 0;
  if (stat == "atk") base = stats.atk;
  else if (stat == "def") base = stats.def;
  else if (stat == "spa") base = stats.spa;
  else if (stat == "spd") base = stats.spd;
  else if (stat == "spe") base = stats.spe;
  const int s = stage(stat);
  return s >= 0 ? base * (2 + s) / 2 : base * 2 / (2 - s);
}

bool BattleRole::has_type(Type t) const { return std::find(types.begin(), types.end(), t) != types.end(); }

std::int64_t BattleRole::flag(const std::string& name) const {
  auto it = flags.find(name);
  return it == flags.end() ? 0 : it->second;
}

namespace {

std::int64_t int_field(const dsl::RoleAst& r, const char* name) {
  const dsl::FieldDef* f = r.find_field(name);
  if (!f || !std::holds_alternative<std::int64_t>(f->value.value)) {
    throw Error("role " + r.name + ": field '" + name + "' must be an integer");
  }
  const auto v = std::get<std::int64_t>(f->value.value);
  if (v < 1 || v > 255) throw Error("role " + r.name + ": field '" + name + "' must lie in [1, 255]");
  return v;
}

std::string str_field(const dsl::RoleAst& r, const char* name) {
  const dsl::FieldDef* f = r.find_field(name);
  if (!f || !std::holds_alternative<std::string>(f->value.value)) {
    throw Error("role " + r.name + ": field '" + name + "' must be a string");
  }
  return std::get<std::string>(f->value.value);
}

}  // namespace

BattleRole make_battle_role(const core::EngineState& state) {
  BattleRole r;
  r.engine = std::make_shared<const core::EngineState>(state);
  r.program = state.full_program();
  r.name = state.role().name;
  const auto& role = state.role();

  auto t1 = parse_type(str_field(role, "primary_type"));
  if (!t1) throw Error("role " + role.name + ": invalid primary_type");
  r.types.push_back(*t1);
  const std::string second = role.find_field("secondary_type") ? str_field(role, "secondary_type") : std::string();
  if (!second.empty()) {
    auto t2 = parse_type(second);
    if (!t2) throw Error("role " + role.name + ": invalid secondary_type");
    if (*t2 != *t1) r.types.push_back(*t2);
  }

  r.max_hp = r.hp = static_cast<int>(int_field(role, "hp_base")) + 60;
  r.stats.atk = static_cast<int>(int_field(role, "atk_base")) + 5;
  r.stats.def = static_cast<int>(int_field(role, "def_base")) + 5;
  r.stats.spa = static_cast<int>(int_field(role, "spa_base")) + 5;
  r.stats.spd = static_cast<int>(int_field(role, "spd_base")) + 5;
  r.stats.spe = static_cast<int>(int_field(role, "spe_base")) + 5;
  for (auto s : dsl::kStageStats) r.stages[std::string(s)] = 0;
  for (const auto& f : role.fields) {
    r.fields[f.name] = std::visit([](const auto& x) -> Value { return x; }, f.value.value);
  }
  if (move_indices(r).empty()) throw Error("role " + role.name + " has no move slots");
  return r;
}

std::vector<int> move_indices(const BattleRole& r) {
  std::vector<int> out;
  for (const auto& m : r.program.methods) {
    if (auto i = dsl::move_slot_index(m.name)) out.push_back(*i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -- state -------------------------------------------------------------------

BattleState::BattleState(BattleRole a, BattleRole b, std::uint64_t seed)
    : sides{std::move(a), std::move(b)}, rng(seed) {}

std::uint64_t BattleState::draw(std::uint64_t bound, const std::string& purpose, const std::string& actor) {
  const std::uint64_t v = rng.below(bound);
  log.push_back(Event{turn, actor, EventKind::rng_draw,
                      {{"purpose", purpose}, {"bound", bound}, {"value", v}, {"draw", rng.draws()}}});
  return v;
}

std::int64_t damage_formula(std::int64_t power, std::int64_t attack, std::int64_t defense, bool stab,
                            Multiplier mult, int level) {
  if (mult.is_zero()) return 0;
  const std::int64_t base = 2 * level / 5 + 2;
  std::int64_t d = base * power * attack / defense / 50 + 2;
  if (stab) d = d * 3 / 2;
  d = d * mult.num / mult.den;
  return std::max<std::int64_t>(d, 1);
}

// -- turns -------------------------------------------------------------------

namespace {

constexpr std::array<const char*, 2> kResidual{"burn", "poison"};

// Marks the outcome when someone is down. Returns true if the battle ended.
bool faint_check(BattleState& b) {
  const bool a_down = b.sides[0].hp <= 0;
  const bool b_down = b.sides[1].hp <= 0;
  if (!a_down && !b_down) return false;
  if (a_down) b.log.push_back(Event{b.turn, "A", EventKind::faint, {{"target", "A"}}});
  if (b_down) b.log.push_back(Event{b.turn, "B", EventKind::faint, {{"target", "B"}}});
  b.outcome = a_down && b_down ? Outcome::draw : a_down ? Outcome::win_b : Outcome::win_a;
  return true;
}

int order_speed(const BattleRole& r) {
  int s = r.effective("spe");
  if (r.flag("paralysis") > 0) s /= 2;
  return s;
}

void end_of_turn(BattleState& b) {
  for (SideId id : {SideId::A, SideId::B}) {
    auto& r = b.side(id);
    for (const char* status : kResidual) {
      if (r.flag(status) <= 0 || r.hp <= 0) continue;
      const int amount = std::min(r.hp, std::max(1, r.max_hp / 8));
      r.hp -= amount;
      b.log.push_back(Event{b.turn, to_string(id), EventKind::damage,
                            {{"target", to_string(id)}, {"amount", amount}, {"hp", r.hp}, {"residual", status}}});
    }
  }
  if (faint_check(b)) return;
  // every flag except `protected` (consumed by a blocked attack) counts down
  for (auto& r : b.sides) {
    for (auto it = r.flags.begin(); it != r.flags.end();) {
      if (it->first != "protected" && --it->second <= 0) {
        it = r.flags.erase(it);
      } else {
        ++it;
      }
    }
  }
}

}  // namespace

void step(BattleState& b, int move_a, int move_b) {
  if (b.over()) throw Error("battle is over");
  const std::array<int, 2> moves{move_a, move_b};
  for (SideId id : {SideId::A, SideId::B}) {
    const auto slots = move_indices(b.side(id));
    if (std::find(slots.begin(), slots.end(), moves[index(id)]) == slots.end()) {
      throw Error(std::string("side ") + to_string(id) + " has no move_" + std::to_string(moves[index(id)]));
    }
  }

  SideId first = SideId::A;
  const bool pa = b.sides[0].flag("priority") > 0;
  const bool pb = b.sides[1].flag("priority") > 0;
  if (pa != pb) {
    first = pa ? SideId::A : SideId::B;
  } else {
    const int sa = order_speed(b.sides[0]);
    const int sb = order_speed(b.sides[1]);
    if (sa != sb) first = sa > sb ? SideId::A : SideId::B;
    else first = b.draw(2, "speed_tie") == 0 ? SideId::A : SideId::B;
  }

  for (SideId actor : {first, other(first)}) {
    auto& r = b.side(actor);
    if (r.flag("sleep") > 0) {
      b.log.push_back(Event{b.turn, to_string(actor), EventKind::status,
                            {{"target", to_string(actor)}, {"status", "sleep"}, {"skipped", true}}});
      continue;
    }
    const std::string slot = "move_" + std::to_string(moves[index(actor)]);
    b.log.push_back(Event{b.turn, to_string(actor), EventKind::move_used, {{"move", slot}}});
    invoke(b, actor, slot);
    if (b.over() || faint_check(b)) return;
  }
  end_of_turn(b);
  if (!b.over()) ++b.turn;
}

// -- policies ----------------------------------------------------------------

int RandomPolicy::choose(BattleState& b, SideId side) {
  const auto slots = move_indices(b.side(side));
  return slots[b.draw(slots.size(), "policy", to_string(side))];
}

ScriptedPolicy::ScriptedPolicy(std::vector<int> moves) : moves_(std::move(moves)) {
  if (moves_.empty()) throw Error("scripted policy needs at least one move");
}

int ScriptedPolicy::choose(BattleState&, SideId) {
  const int m = moves_[next_ % moves_.size()];
  ++next_;
  return m;
}

// -- battles -----------------------------------------------------------------

BattleLog run_battle(BattleState b, Policy& policy_a, Policy& policy_b, int max_turns) {
  while (!b.over() && b.turn <= max_turns) {
    const int ma = policy_a.choose(b, SideId::A);
    const int mb = policy_b.choose(b, SideId::B);
    step(b, ma, mb);
  }
  BattleLog log;
  log.turns = std::min(b.turn, max_turns);
  log.outcome = b.over() ? b.outcome : Outcome::draw;
  log.error = b.error;
  log.events = std::move(b.log);
  return log;
}

BattleLog run_battle(const core::EngineState& a, const core::EngineState& b, Policy& policy_a, Policy& policy_b,
                     std::uint64_t seed, int max_turns) {
  return run_battle(BattleState(make_battle_role(a), make_battle_role(b), seed), policy_a, policy_b, max_turns);
}

}  // namespace delta::battle
