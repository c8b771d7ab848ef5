#include <gtest/gtest.h>

#include <sstream>

#include "delta/battle/battle.hpp"
#include "delta/core/engine.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/error.hpp"
#include "support/test_support.hpp"

namespace delta::battle {
namespace {

using testing::role_state;

std::vector<Type> types_of(const std::string& s) {
  std::vector<Type> out;
  std::stringstream in(s);
  std::string t;
  while (std::getline(in, t, '/')) out.push_back(*parse_type(t));
  return out;
}

std::vector<const Event*> of_kind(const std::vector<Event>& log, EventKind k) {
  std::vector<const Event*> out;
  for (const auto& e : log) {
    if (e.kind == k) out.push_back(&e);
  }
  return out;
}

TEST(TypeChart, Examples) {
  const auto& c = TypeChart::standard();
  EXPECT_EQ(c.multiplier(Type::Water, {Type::Fire}), (Multiplier{2, 1}));
  EXPECT_EQ(c.multiplier(Type::Normal, {Type::Normal}), (Multiplier{1, 1}));
  EXPECT_TRUE(c.multiplier(Type::Electric, {Type::Ground}).is_zero());
  EXPECT_EQ(c.multiplier(Type::Water, {Type::Grass, Type::Dragon}), (Multiplier{1, 4}));
  EXPECT_EQ(c.multiplier(Type::Fighting, {Type::Normal, Type::Ice}), (Multiplier{4, 1}));
}

TEST(TypeChart, RejectsMalformedCsv) {
  EXPECT_THROW(TypeChart::from_csv("attacker,Normal\nNormal,1\n"), Error);
}

struct OracleRow {
  int power, attack, defense;
  std::string attacker, move_type, defender;
  bool stab;
  std::string mult;
  std::int64_t expected;
};

std::vector<OracleRow> oracle_rows() {
  std::stringstream in(testing::read_fixture("damage_oracle.csv"));
  std::string line;
  std::getline(in, line);
  std::vector<OracleRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<std::string> c;
    std::string cell;
    while (std::getline(ls, cell, ',')) c.push_back(cell);
    rows.push_back({std::stoi(c[0]), std::stoi(c[1]), std::stoi(c[2]), c[3], c[4], c[5], c[6] == "1", c[7],
                    std::stoll(c[8])});
  }
  return rows;
}

Multiplier parse_mult(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return {std::stoi(s), 1};
  return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
}

// Damage of one deal_damage call through the interpreter, stats pinned.
std::int64_t engine_damage(const OracleRow& r, int coded_power, const std::string& extra = "") {
  auto a = make_battle_role(role_state("Att", r.attacker,
                                       "  fn move_1() {\n    deal_damage(\"Hit\", " + std::to_string(coded_power) +
                                           ", \"" + r.move_type + "\", \"physical\")\n  }\n" + extra));
  auto d = make_battle_role(role_state("Def", r.defender, "  fn move_1() {\n    heal(0)\n  }"));
  a.stats.atk = r.attack;
  d.stats.def = r.defense;
  d.hp = d.max_hp = 100000;
  BattleState b(a, d, 1);
  invoke(b, SideId::A, "move_1");
  auto hits = of_kind(b.log, EventKind::damage);
  EXPECT_EQ(hits.size(), 1u);
  return hits.empty() ? -1 : hits[0]->payload["amount"].get<std::int64_t>();
}

TEST(Damage, MatchesOracleTable) {
  auto rows = oracle_rows();
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    SCOPED_TRACE(r.power);
    const Multiplier m = parse_mult(r.mult);
    EXPECT_EQ(TypeChart::standard().multiplier(*parse_type(r.move_type), types_of(r.defender)), m);
    EXPECT_EQ(damage_formula(r.power, r.attack, r.defense, r.stab, m), r.expected);
    EXPECT_EQ(engine_damage(r, r.power), r.expected);
  }
}

TEST(Damage, MinimumAndImmunity) {
  EXPECT_EQ(damage_formula(0, 10, 255, false, {1, 4}), 1);
  EXPECT_EQ(damage_formula(250, 999, 1, true, {0, 1}), 0);
}

TEST(Damage, HookOverrideDoublesPower) {
  // the first oracle row has power 50; code 25 and let get_power double it
  const auto row = oracle_rows().at(0);
  EXPECT_EQ(engine_damage(row, 25, "  fn get_power(m, b) {\n    return b * 2\n  }"), row.expected);
  EXPECT_NE(engine_damage(row, 25), row.expected);
}

TEST(Step, SpeedOrdering) {
  auto fast = role_state("Fast", "Normal", "  fn move_1() {\n    deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n  }", 90);
  auto slow = role_state("Slow", "Normal", "  fn move_1() {\n    deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n  }", 60);
  BattleState b(make_battle_role(fast), make_battle_role(slow), 7);
  step(b, 1, 1);
  std::vector<std::pair<std::string, EventKind>> got;
  for (const auto& e : b.log) got.emplace_back(e.actor, e.kind);
  EXPECT_EQ(got, (std::vector<std::pair<std::string, EventKind>>{{"A", EventKind::move_used},
                                                                {"A", EventKind::damage},
                                                                {"B", EventKind::move_used},
                                                                {"B", EventKind::damage}}));
  EXPECT_EQ(b.turn, 2);
}

TEST(Step, SpeedTieDrawsOnce) {
  auto r = role_state("Same", "Normal", "  fn move_1() {\n    heal(1)\n  }");
  BattleState b(make_battle_role(r), make_battle_role(r), 3);
  step(b, 1, 1);
  auto draws = of_kind(b.log, EventKind::rng_draw);
  ASSERT_EQ(draws.size(), 1u);
  EXPECT_EQ(draws[0]->payload["purpose"], "speed_tie");
  EXPECT_EQ(b.rng.draws(), 1u);
}

TEST(Step, ProtectedBlocksNextAttack) {
  auto att = role_state("Att", "Normal", "  fn move_1() {\n    deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n  }", 90);
  auto def = role_state("Def", "Normal", "  fn move_1() {\n    heal(0)\n  }", 60);
  BattleState b(make_battle_role(att), make_battle_role(def), 1);
  b.sides[1].flags["protected"] = 1;
  step(b, 1, 1);
  auto hits = of_kind(b.log, EventKind::damage);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0]->payload["amount"], 0);
  EXPECT_EQ(hits[0]->payload["blocked"], true);
  EXPECT_EQ(b.sides[1].flag("protected"), 0);
  EXPECT_EQ(b.sides[1].hp, b.sides[1].max_hp);
  step(b, 1, 1);
  EXPECT_LT(b.sides[1].hp, b.sides[1].max_hp);
}

TEST(Step, RayquazalizeProtectsAndSwitchesTypes) {
  auto bug = core::merge(dsl::parse_delta(testing::kRayquazalize), core::init_engine(testing::green_bug_script()));
  auto foe = role_state("Foe", "Normal", "  fn move_1() {\n    deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n  }", 40);
  BattleState b(make_battle_role(bug), make_battle_role(foe), 1);
  step(b, 3, 1);
  EXPECT_EQ(b.sides[0].types, (std::vector<Type>{Type::Dragon, Type::Flying}));
  EXPECT_EQ(b.sides[0].hp, b.sides[0].max_hp);
  auto hits = of_kind(b.log, EventKind::damage);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0]->payload["blocked"], true);
}

TEST(Step, DivideByZeroEndsBattle) {
  auto bad = role_state("Bad", "Normal", "  fn move_1() {\n    let x = 1 / 0\n  }", 90);
  auto ok = role_state("Ok", "Normal", "  fn move_1() {\n    heal(1)\n  }", 60);
  BattleState b(make_battle_role(bad), make_battle_role(ok), 1);
  step(b, 1, 1);
  EXPECT_EQ(b.outcome, Outcome::error_a);
  ASSERT_TRUE(b.error);
  EXPECT_EQ(b.error->kind, RuntimeErrorKind::divide_by_zero);
  EXPECT_EQ(b.error->method, "move_1");
  EXPECT_EQ(b.error->span.line, 12);
  auto errs = of_kind(b.log, EventKind::runtime_error);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0]->payload["kind"], "divideByZero");
  EXPECT_THROW(step(b, 1, 1), Error);
}

TEST(Step, RejectsUnknownMoveIndex) {
  auto r = role_state("R", "Normal", "  fn move_1() {\n    heal(1)\n  }");
  BattleState b(make_battle_role(r), make_battle_role(r), 1);
  EXPECT_THROW(step(b, 2, 1), Error);
}

RuntimeErrorKind error_of(const std::string& methods) {
  auto bad = role_state("Bad", "Normal", methods, 90);
  auto ok = role_state("Ok", "Normal", "  fn move_1() {\n    heal(1)\n  }", 60);
  BattleState b(make_battle_role(bad), make_battle_role(ok), 1);
  step(b, 1, 1);
  EXPECT_TRUE(b.error.has_value());
  return b.error ? b.error->kind : RuntimeErrorKind::type_mismatch;
}

TEST(Interpreter, ErrorKinds) {
  EXPECT_EQ(error_of("  fn move_1() {\n    spin()\n  }\n  fn spin() {\n    spin()\n  }"),
            RuntimeErrorKind::depth_exceeded);
  EXPECT_EQ(error_of("  fn move_1() {\n    fan(20)\n  }\n  fn fan(n) {\n    if n > 0 {\n      fan(n - 1)\n"
                     "      fan(n - 1)\n    }\n  }"),
            RuntimeErrorKind::budget_exceeded);
  EXPECT_EQ(error_of("  fn move_1() {\n    let x = \"a\" + 1\n  }"), RuntimeErrorKind::type_mismatch);
  EXPECT_EQ(error_of("  fn move_1() {\n    if 3 {\n      heal(1)\n    }\n  }"), RuntimeErrorKind::type_mismatch);
  EXPECT_EQ(error_of("  fn move_1() {\n    deal_damage(\"X\", -5, \"Normal\", \"physical\")\n  }"),
            RuntimeErrorKind::domain_violation);
  EXPECT_EQ(error_of("  fn move_1() {\n    set_types(\"Plasma\", \"\")\n  }"), RuntimeErrorKind::domain_violation);
  EXPECT_EQ(error_of("  fn move_1() {\n    let x = 9223372036854775807 + 1\n  }"), RuntimeErrorKind::domain_violation);
  EXPECT_EQ(error_of("  fn move_1() {\n    let x = 5 % 0\n  }"), RuntimeErrorKind::divide_by_zero);
  EXPECT_EQ(error_of("  fn move_1() {\n    deal_damage(\"X\", 40, \"Normal\", \"physical\")\n  }\n"
                     "  fn get_power(m, b) {\n    return m\n  }"),
            RuntimeErrorKind::type_mismatch);
}

TEST(Interpreter, ArithmeticAndFields) {
  auto r = role_state("R", "Normal",
                      "  let charge = 0\n"
                      "  fn move_1() {\n    self.charge = self.charge + 7 / 2 - -7 / 2 + 7 % -3\n"
                      "    if self.charge == 6 and not (1.5 > 2) {\n      self.flags.ok = max(1, abs(-3))\n    }\n  }");
  BattleState b(make_battle_role(r), make_battle_role(r), 1);
  invoke(b, SideId::A, "move_1");
  EXPECT_FALSE(b.error) << b.error->message;
  // 7/2 = 3, -7/2 = -4, 7 % -3 = -2 (floor semantics)
  EXPECT_EQ(std::get<std::int64_t>(b.sides[0].fields["charge"]), 5);
  EXPECT_EQ(b.sides[0].flag("ok"), 0);
}

TEST(Interpreter, StagesClampAndFoeHookDecides) {
  auto r = role_state("R", "Normal",
                      "  fn move_1() {\n    boost_self(\"atk\", 10)\n    boost_foe(\"def\", -1)\n  }");
  auto stubborn = role_state("S", "Normal",
                             "  fn move_1() {\n    heal(0)\n  }\n  fn set_boost(stat, n) {\n    if n > 0 {\n"
                             "      boost_self(stat, n)\n    }\n  }");
  BattleState b(make_battle_role(r), make_battle_role(stubborn), 1);
  invoke(b, SideId::A, "move_1");
  EXPECT_EQ(b.sides[0].stage("atk"), 6);
  EXPECT_EQ(b.sides[1].stage("def"), 0);  // its set_boost ignores drops
  EXPECT_EQ(b.sides[0].effective("atk"), b.sides[0].stats.atk * 8 / 2);
  for (const auto* e : of_kind(b.log, EventKind::boost)) {
    EXPECT_LE(e->payload["stage"].get<int>(), kMaxStage);
  }
  BattleState c(make_battle_role(r), make_battle_role(r), 1);
  invoke(c, SideId::A, "move_1");
  EXPECT_EQ(c.sides[1].stage("def"), -1);
  EXPECT_EQ(c.sides[1].effective("def"), c.sides[1].stats.def * 2 / 3);
}

TEST(Interpreter, ErrorInFoeHookIsFoes) {
  auto r = role_state("R", "Normal", "  fn move_1() {\n    boost_foe(\"def\", -1)\n  }");
  auto broken = role_state("S", "Normal",
                           "  fn move_1() {\n    heal(0)\n  }\n  fn set_boost(stat, n) {\n    let x = n / 0\n  }");
  BattleState b(make_battle_role(r), make_battle_role(broken), 1);
  invoke(b, SideId::A, "move_1");
  ASSERT_TRUE(b.error);
  EXPECT_EQ(b.error->side, SideId::B);
  EXPECT_EQ(b.error->method, "set_boost");
  EXPECT_EQ(b.outcome, Outcome::error_b);
}

TEST(Interpreter, StatusAndResidual) {
  auto r = role_state("R", "Normal", "  fn move_1() {\n    inflict_status(\"burn\", 3)\n  }", 90);
  auto t = role_state("T", "Normal", "  fn move_1() {\n    heal(0)\n  }", 60);
  BattleState b(make_battle_role(r), make_battle_role(t), 1);
  step(b, 1, 1);
  EXPECT_EQ(b.sides[1].hp, b.sides[1].max_hp - b.sides[1].max_hp / 8);
  EXPECT_EQ(b.sides[1].flag("burn"), 2);
}

TEST(RunBattle, DeterministicAcrossRuns) {
  auto a = core::init_engine(testing::green_bug_script());
  auto b = role_state("Foe", "Fire",
                      "  fn move_1() {\n    deal_damage(\"Ember\", 40, \"Fire\", \"special\")\n"
                      "    if chance(30) {\n      inflict_status(\"burn\", 3)\n    }\n  }\n"
                      "  fn move_2() {\n    boost_self(\"spa\", 1)\n  }");
  RandomPolicy p1, p2, p3, p4;
  auto l1 = run_battle(a, b, p1, p2, 42);
  auto l2 = run_battle(a, b, p3, p4, 42);
  EXPECT_EQ(l1.to_jsonl(), l2.to_jsonl());
  EXPECT_NE(l1.outcome, Outcome::ongoing);
  EXPECT_LE(l1.turns, kMaxTurns);
}

TEST(RunBattle, ImmuneAttackerDrawsAtCap) {
  auto a = role_state("A", "Normal", "  fn move_1() {\n    deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n  }");
  auto g = role_state("G", "Ghost", "  fn move_1() {\n    boost_self(\"def\", 0)\n  }");
  RandomPolicy pa, pb;
  auto log = run_battle(a, g, pa, pb, 5);
  EXPECT_EQ(log.outcome, Outcome::draw);
  EXPECT_EQ(log.turns, 100);
  EXPECT_EQ(log.events.back().turn, 100);
}

TEST(RunBattle, SeedsOnlyChangeRngDependentEvents) {
  auto a = role_state("A", "Water",
                      "  fn move_1() {\n    deal_damage(\"Surf\", 60, \"Water\", \"special\")\n"
                      "    if chance(50) {\n      set_foe_flag(\"soaked\", 1)\n    }\n  }", 90);
  auto b = role_state("B", "Fire", "  fn move_1() {\n    deal_damage(\"Ember\", 40, \"Fire\", \"special\")\n  }", 70);
  auto strip = [](const BattleLog& l) {
    std::string out;
    for (const auto& e : l.events) {
      if (e.kind != EventKind::rng_draw && e.kind != EventKind::flag_set) out += e.to_line() + "\n";
    }
    return out;
  };
  int differing = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    ScriptedPolicy p1({1}), p2({1}), p3({1}), p4({1});
    auto x = run_battle(a, b, p1, p2, 1000 + s);
    auto y = run_battle(a, b, p3, p4, 2000 + s);
    EXPECT_EQ(strip(x), strip(y));
    differing += x.to_jsonl() != y.to_jsonl();
  }
  EXPECT_GT(differing, 0);
}

TEST(RunBattle, ConservationInvariants) {
  auto a = core::init_engine(testing::green_bug_script());
  auto b = role_state("Foe", "Grass",
                      "  fn move_1() {\n    deal_damage(\"Leech\", 30, \"Grass\", \"special\")\n    heal(10)\n  }\n"
                      "  fn move_2() {\n    recoil(5)\n    boost_foe(\"atk\", -2)\n  }");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomPolicy pa, pb;
    auto log = run_battle(a, b, pa, pb, seed);
    for (const auto& e : log.events) {
      if (e.payload.contains("hp")) EXPECT_GE(e.payload["hp"].get<int>(), 0);
      if (e.kind == EventKind::boost) {
        EXPECT_LE(std::abs(e.payload["stage"].get<int>()), 6);
      }
    }
  }
}

}  // namespace
}  // namespace delta::battle
