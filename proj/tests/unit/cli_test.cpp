#include <gtest/gtest.h>

#include <fstream>

#include "delta/data/pool.hpp"
#include "delta/data/samples.hpp"
#include "delta/data/bundle.hpp"
#include "delta/dsl/printer.hpp"
#include "json.hpp"
#include "support/test_support.hpp"

namespace delta {
namespace {

using nlohmann::json;
using testing::run_process;
using testing::TempDir;
namespace fs = std::filesystem;

std::pair<int, std::string> cli(std::vector<std::string> args) {
  args.insert(args.begin(), DELTA_CLI_PATH);
  return run_process(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Output with the server's access log and other chatter removed: from the
// first line starting with `{` on.
json json_out(const std::string& out) { return json::parse(out.substr(out.find('{'))); }

TEST(Cli, EvalExeOnSeeds) {
  TempDir dir("cli-exe");
  const auto [code, out] = cli({"eval", "exe", "--opponents", "10", "--seed", "1", "--out", dir.path().string()});
  ASSERT_EQ(code, 0) << out;
  EXPECT_NE(out.find("Exe 100.0% (20/20 roles, 10 opponents"), std::string::npos) << out;
  const auto report = json::parse(slurp(dir.path() / "exe.json"));
  EXPECT_EQ(report.at("exePercent"), 100.0);
  EXPECT_EQ(slurp(dir.path() / "exe.csv").rfind("role_id,passed,opponents_fought,failing_opponent\n", 0), 0u);
}

TEST(Cli, EvalScaleWritesHistogram) {
  TempDir dir("cli-scale");
  const auto cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"proxy_kind": "scripted",
    "scripted_proxy": {"rules": [], "fallback": "grow", "fail_from_step": 3}})";
  const auto [code, out] = cli({"eval", "scale", "--runs", "5", "--max-steps", "10", "--config", cfg.string(), "--out",
                                (dir.path() / "out").string()});
  ASSERT_EQ(code, 0) << out;
  EXPECT_EQ(slurp(dir.path() / "out" / "steps.csv"), "steps,count\n3,5\n");
  EXPECT_EQ(json::parse(slurp(dir.path() / "out" / "traces.json")).size(), 5u);
  const auto csv = slurp(dir.path() / "out" / "traces.csv");
  EXPECT_EQ(csv.rfind("run_id,steps_completed,engine_size_at_failure,failure_kind\n", 0), 0u);
}

TEST(Cli, EvalAccWithMockJudge) {
  TempDir dir("cli-acc");
  const auto& seeds = data::seed_roles();
  json pairs = json::array();
  pairs.push_back({{"id", "same"}, {"candidate", dsl::print(seeds[0].state.role())},
                   {"reference", dsl::print(seeds[0].state.role())}});
  pairs.push_back({{"id", "other"}, {"candidate", dsl::print(seeds[1].state.role())},
                   {"reference", dsl::print(seeds[2].state.role())}});
  std::ofstream(dir.path() / "pairs.json") << pairs.dump();
  const auto [code, out] = cli({"eval", "acc", "--pairs", (dir.path() / "pairs.json").string(), "--opponents", "5"});
  ASSERT_EQ(code, 0) << out;
  EXPECT_NE(out.find("Acc 50.0% (denominator 2"), std::string::npos) << out;
}

TEST(Cli, DataPipelineRoundTrip) {
  TempDir dir("cli-data");
  const auto pool = (dir.path() / "pool").string();
  auto [code, out] = cli({"data", "generate", "--pool", pool, "--count", "4", "--mode", "codesign", "--seed", "3"});
  ASSERT_EQ(code, 0) << out;
  const auto report = json_out(out);
  auto loaded = data::SamplePool::load(pool);
  ASSERT_EQ(loaded.pending_ids().size(), report.at("pending").get<std::size_t>());
  ASSERT_FALSE(loaded.pending_ids().empty()) << out;
  const std::string pending = loaded.pending_ids().front();
  const std::size_t before = loaded.size();

  std::tie(code, out) = cli({"data", "approve", "--pool", pool, "--id", pending});
  ASSERT_EQ(code, 0) << out;
  EXPECT_EQ(data::SamplePool::load(pool).size(), before + 1);

  std::tie(code, out) = cli({"data", "tag", "--pool", pool});
  ASSERT_EQ(code, 0) << out;
  EXPECT_NE(out.find(pending), std::string::npos);

  const auto samples = dir.path() / "samples.jsonl";
  std::tie(code, out) = cli({"data", "split", "--pool", pool, "--out", samples.string()});
  ASSERT_EQ(code, 0) << out;
  std::size_t expect = 0;
  for (const auto& b : data::SamplePool::load(pool).instances()) expect += b.state.history().size();
  const auto text = slurp(samples);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), expect);

  std::tie(code, out) = cli({"data", "approve", "--pool", pool, "--id", "no-such-id"});
  EXPECT_NE(code, 0);
}

TEST(Cli, RoleAndBattleCommands) {
  TempDir dir("cli-role");
  const auto data = (dir.path() / "data").string();
  std::ofstream(dir.path() / "script.json") << testing::green_bug_script().to_json().dump();
  std::ofstream(dir.path() / "cfg.json") << R"({"proxy_kind": "scripted", "scripted_proxy": {"rules": [], "fallback": "grow"}})";

  auto [code, out] = cli({"role", "create", "--data", data, "--script", (dir.path() / "script.json").string()});
  ASSERT_EQ(code, 0) << out;
  const std::string id = json_out(out).at("roleId");

  std::tie(code, out) = cli({"role", "evolve", "--data", data, "--id", id, "--instruction",
                             "Learn the move Gust: wind.", "--config", (dir.path() / "cfg.json").string()});
  ASSERT_EQ(code, 0) << out;
  EXPECT_EQ(json_out(out).at("step"), 1);

  std::tie(code, out) = cli({"role", "show", "--data", data, "--id", id, "--full"});
  ASSERT_EQ(code, 0) << out;
  EXPECT_EQ(out.rfind("role GreenBug {", 0), 0u);

  std::tie(code, out) = cli({"role", "list", "--data", data});
  EXPECT_NE(out.find(id + "\tGreenBug\tstep 1"), std::string::npos) << out;

  const std::vector<std::string> battle = {"battle", "run", "--roles", data, "--a", id, "--opponent-seed", "4",
                                           "--seed", "9"};
  const auto first = cli(battle);
  const auto second = cli(battle);
  ASSERT_EQ(first.first, 0) << first.second;
  EXPECT_EQ(first.second, second.second);
  EXPECT_NE(first.second.find("\"outcome\""), std::string::npos);

  std::tie(code, out) = cli({"fsck", "--data", data});
  EXPECT_EQ(code, 0) << out;
  // Break the chain.
  const auto log = fs::path(data) / "roles" / id / "events.jsonl";
  auto text = slurp(log);
  text.replace(text.find("\"seq\":1"), 7, "\"seq\":2");
  std::ofstream(log, std::ios::binary) << text;
  std::tie(code, out) = cli({"fsck", "--data", data});
  EXPECT_EQ(code, 1) << out;
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(cli({}).first, 0);
  EXPECT_NE(cli({"eval", "exe", "--opponents", "0"}).first, 0);
  EXPECT_NE(cli({"role", "show", "--data", "/nonexistent-dir-x", "--id", "r1"}).first, 0);
}

}  // namespace
}  // namespace delta
