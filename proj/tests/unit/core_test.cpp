#include <gtest/gtest.h>

#include "delta/core/engine.hpp"
#include "delta/core/evolve.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"
#include "delta/proxy/prompts.hpp"
#include "delta/proxy/scripted.hpp"
#include "support/test_support.hpp"

namespace delta::core {
namespace {

using testing::green_bug_script;
using testing::kRayquazalize;

std::vector<std::string> method_list(const dsl::RoleAst& r) {
  std::vector<std::string> out;
  for (const auto& m : r.methods) out.push_back(m.name);
  return out;
}

TEST(InitEngine, GreenBugHasTwoMoveSlots) {
  auto s = init_engine(green_bug_script());
  EXPECT_EQ(s.step(), 0u);
  EXPECT_EQ(s.role().name, "GreenBug");
  EXPECT_EQ(method_list(s.role()), (std::vector<std::string>{"move_1", "move_2"}));
  EXPECT_EQ(s.move_slots(), (std::vector<std::string>{"move_1", "move_2"}));
  ASSERT_NE(s.lookup("get_power"), nullptr);
  EXPECT_EQ(dsl::print_method(*s.lookup("move_1"), 0),
            "fn move_1() {\n  deal_damage(\"Tackle\", 40, \"Normal\", \"physical\")\n}\n");
}

TEST(InitEngine, FourMoves) {
  auto script = green_bug_script();
  script.moves.push_back({"Bite", "", 60, std::nullopt, std::nullopt});
  script.moves.push_back({"Sting", "", std::nullopt, MoveCategory::special, std::nullopt});
  auto s = init_engine(script);
  EXPECT_EQ(s.move_slots(), (std::vector<std::string>{"move_1", "move_2", "move_3", "move_4"}));
  // absent power and type fall back to 40 and the primary type
  EXPECT_EQ(dsl::print_method(*s.lookup("move_4"), 0),
            "fn move_4() {\n  deal_damage(\"Sting\", 40, \"Bug\", \"special\")\n}\n");
}

TEST(InitEngine, RejectsBadScripts) {
  auto script = green_bug_script();
  script.moves.clear();
  EXPECT_THROW(init_engine(script), ScriptError);
  script = green_bug_script();
  script.stats.spe = 0;
  EXPECT_THROW(init_engine(script), ScriptError);
  script = green_bug_script();
  script.types = {"Bug", "Bug"};
  EXPECT_THROW(init_engine(script), ScriptError);
  script = green_bug_script();
  script.types = {"Plasma"};
  EXPECT_THROW(init_engine(script), ScriptError);
}

TEST(RoleScriptJson, MissingStatsIsScriptError) {
  auto j = green_bug_script().to_json();
  EXPECT_EQ(RoleScript::from_json(j), green_bug_script());
  j["stats"].erase("spd");
  EXPECT_THROW(RoleScript::from_json(j), ScriptError);
}

TEST(Merge, RayquazalizeAddsTwoMethods) {
  auto s0 = init_engine(green_bug_script());
  auto s1 = merge(dsl::parse_delta(kRayquazalize), s0, {"learn Rayquazalize", Author::player});
  EXPECT_EQ(s1.step(), 1u);
  EXPECT_EQ(method_list(s1.role()), (std::vector<std::string>{"move_1", "move_2", "move_3", "rayquazalize"}));
  EXPECT_EQ(replay(s1.initial_role(), s1.history()), s1.role());
}

TEST(Merge, IdempotentOnContent) {
  auto d = dsl::parse_delta(kRayquazalize);
  auto once = merge(d, init_engine(green_bug_script()));
  auto twice = merge(d, once);
  EXPECT_EQ(once.role(), twice.role());
  EXPECT_EQ(twice.step(), 2u);
}

TEST(Merge, HookOverrideShadowsDefault) {
  auto s0 = init_engine(green_bug_script());
  auto d = dsl::parse_delta("increment GreenBug {\n  fn get_power(m, b) {\n    return b * 2\n  }\n}");
  auto s1 = merge(d, s0);
  EXPECT_EQ(*s1.lookup("get_power"), d.methods[0]);
  EXPECT_EQ(s1.base_hooks(), default_hooks());
  // the hook keeps its skeleton position
  EXPECT_EQ(skeleton(s1).names(), skeleton(s0).names());
}

TEST(Merge, Errors) {
  auto s0 = init_engine(green_bug_script());
  EXPECT_THROW(merge(dsl::parse_delta("increment Other { fn move_1() { heal(1) } }"), s0), TargetMismatch);
  EXPECT_THROW(merge(dsl::parse_delta("increment GreenBug { fn rage() { heal(1) } }"), s0), ValidationError);
}

TEST(Skeleton, FreshGreenBug) {
  auto sk = skeleton(init_engine(green_bug_script()));
  EXPECT_EQ(sk.names(), (std::vector<std::string>{"get_power", "set_boost", "type_change", "move_1", "move_2"}));
  EXPECT_EQ(sk.entries[0].params, (std::vector<std::string>{"m", "b"}));
}

TEST(Skeleton, GainsMergedNamesAndIsSmaller) {
  auto s1 = merge(dsl::parse_delta(kRayquazalize), init_engine(green_bug_script()));
  auto names = skeleton(s1).names();
  EXPECT_NE(std::find(names.begin(), names.end(), "rayquazalize"), names.end());
  EXPECT_EQ(names, s1.method_names());
  EXPECT_LT(skeleton(s1).render().size(), print_state(s1).size());
}

TEST(Retrieve, HooksAndDenseCase) {
  auto s0 = init_engine(green_bug_script());
  auto ctx = retrieve(s0, {"get_power", "set_boost"});
  ASSERT_EQ(ctx.entries.size(), 2u);
  EXPECT_EQ(ctx.entries[0], default_hooks()[0]);
  EXPECT_EQ(ctx.entries[1], default_hooks()[1]);
  EXPECT_EQ(retrieve(s0, s0.method_names()).render(), full_listing(s0));
  EXPECT_LT(ctx.render().size(), full_listing(s0).size());
}

TEST(Retrieve, OverriddenHookWins) {
  auto s0 = init_engine(green_bug_script());
  auto d = dsl::parse_delta(
      "increment GreenBug {\n  fn type_change(a, b) {\n    set_types(a, b)\n    boost_self(\"spe\", 1)\n  }\n}");
  auto ctx = retrieve(merge(d, s0), {"type_change"});
  ASSERT_EQ(ctx.entries.size(), 1u);
  EXPECT_EQ(ctx.entries[0], d.methods[0]);
}

TEST(Retrieve, UnknownEntryListsAll) {
  auto s0 = init_engine(green_bug_script());
  try {
    retrieve(s0, {"move_1", "nope", "zap"});
    FAIL();
  } catch (const UnknownEntry& e) {
    EXPECT_EQ(e.names(), (std::vector<std::string>{"nope", "zap"}));
  }
  EXPECT_THROW(retrieve(s0, {}), Error);
}

// Records what phase B saw.
class SpyProxy : public proxy::NeuralProxy {
 public:
  std::vector<std::string> names;
  std::string answer;
  RetrievedContext seen;

  std::vector<std::string> select_entries(const Skeleton&, const Instruction&) override { return names; }
  std::string generate_delta(const RetrievedContext& c, const Instruction&) override {
    seen = c;
    return answer;
  }
};

TEST(EvolveStep, RayquazalizeViaScriptedProxy) {
  proxy::ScriptedProxy p({{"learn a move Rayquazalize*", {"type_change", "move_1"}, kRayquazalize}});
  auto s0 = init_engine(green_bug_script());
  auto r = evolve_step(
      s0, {"learn a move Rayquazalize that switches types and protects from the next attack", Author::player}, p);
  EXPECT_EQ(r.delta.methods.size(), 2u);
  EXPECT_EQ(r.state.step(), 1u);
  EXPECT_EQ(r.state.history()[0].selected, (std::vector<std::string>{"type_change", "move_1"}));
  EXPECT_EQ(r.context.entries.size(), 2u);
}

TEST(EvolveStep, GarbageIsNonExecutable) {
  proxy::ScriptedProxy p({{"never", {}, ""}}, proxy::ScriptedProxy::Fallback::failure);
  auto s0 = init_engine(green_bug_script());
  try {
    evolve_step(s0, {"anything", Author::player}, p);
    FAIL();
  } catch (const NonExecutableDelta& e) {
    EXPECT_EQ(e.stage(), NonExecutableDelta::Stage::parse);
    EXPECT_EQ(e.raw_response(), proxy::ScriptedProxy::kUnparseable);
  }
}

TEST(EvolveStep, PhaseBSeesExactlySelectedBodies) {
  SpyProxy p;
  p.names = {"get_power", "set_boost"};
  p.answer = "```\nincrement GreenBug {\n  fn get_power(m, b) {\n    return b + 10\n  }\n}\n```";
  auto s0 = init_engine(green_bug_script());
  auto r = evolve_step(s0, {"hit harder", Author::player}, p);
  ASSERT_EQ(p.seen.entries.size(), 2u);
  EXPECT_EQ(p.seen.entries[0].name, "get_power");
  EXPECT_EQ(p.seen.entries[1].name, "set_boost");
  auto prompt = proxy::build_delta_prompt(p.seen, {"hit harder", Author::player});
  EXPECT_NE(prompt.user.find(dsl::print_method(default_hooks()[0], 0)), std::string::npos);
  EXPECT_NE(prompt.user.find(dsl::print_method(default_hooks()[1], 0)), std::string::npos);
  EXPECT_EQ(prompt.user.find("fn type_change"), std::string::npos);
  EXPECT_EQ(prompt.user.find("fn move_1"), std::string::npos);
}

TEST(EvolveStep, PhaseARepairDropsUnknownNamesOnce) {
  SpyProxy p;
  p.names = {"get_power", "hallucinated"};
  p.answer = "increment GreenBug { fn get_power(m, b) { return b } }";
  auto r = evolve_step(init_engine(green_bug_script()), {"x", Author::player}, p);
  EXPECT_EQ(r.selected, (std::vector<std::string>{"get_power"}));
  EXPECT_EQ(r.dropped, (std::vector<std::string>{"hallucinated"}));

  p.names = {"ghost"};
  EXPECT_THROW(evolve_step(init_engine(green_bug_script()), {"x", Author::player}, p), UnknownEntry);
}

TEST(EvolveStep, DanglingHelperIsValidateFailure) {
  SpyProxy p;
  p.names = {"move_1"};
  p.answer = "increment GreenBug { fn rage() { boost_self(\"atk\", 1) } }";
  try {
    evolve_step(init_engine(green_bug_script()), {"x", Author::player}, p);
    FAIL();
  } catch (const NonExecutableDelta& e) {
    EXPECT_EQ(e.stage(), NonExecutableDelta::Stage::validate);
  }
}

TEST(EvolveStep, Deterministic) {
  proxy::ScriptedProxy p({{"never", {}, ""}}, proxy::ScriptedProxy::Fallback::grow);
  auto s0 = init_engine(green_bug_script());
  Instruction x{"Ember: sets the foe alight", Author::fuzzer};
  auto a = evolve_step(s0, x, p);
  auto b = evolve_step(s0, x, p);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(a.raw_response, b.raw_response);
}

TEST(Rebuild, ReproducesState) {
  proxy::ScriptedProxy p({{"never", {}, ""}}, proxy::ScriptedProxy::Fallback::grow);
  auto s = init_engine(green_bug_script());
  for (const char* t : {"Ember", "Surf", "Gust", "Ember"}) s = evolve_step(s, {t, Author::pipeline}, p).state;
  EXPECT_EQ(rebuild(s.initial_role(), s.history()), s);
}

}  // namespace
}  // namespace delta::core
