#include "acceptance/criteria.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "delta/battle/battle.hpp"
#include "delta/core/evolve.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/data/bundle.hpp"
#include "delta/data/filter.hpp"
#include "delta/data/interest.hpp"
#include "delta/data/samples.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"
#include "delta/eval/fuzz.hpp"
#include "delta/eval/metrics.hpp"
#include "delta/eval/opponents.hpp"
#include "delta/eval/scaling.hpp"
#include "delta/proxy/scripted.hpp"
#include "delta/service/store.hpp"
#include "httplib.h"
#include "support/test_support.hpp"

namespace delta::acceptance {

using nlohmann::json;

namespace {

Verdict fail(std::string why) { return {false, std::move(why)}; }

std::vector<std::string> method_names(const dsl::RoleAst& r) {
  std::vector<std::string> out;
  for (const auto& m : r.methods) out.push_back(m.name);
  return out;
}

// A fuzzed role with `prior` merged increments.
core::EngineState fuzz_state(eval::ProgramFuzzer& fz, int prior) {
  core::EngineState s(dsl::parse_role(fz.role_source()));
  for (int i = 0; i < prior; ++i) {
    s = core::merge(dsl::parse_delta(fz.delta_source(s.role())), s, {"prior " + std::to_string(i), core::Author::fuzzer});
  }
  return s;
}

}  // namespace

Verdict dsl_roundtrip(int programs) {
  int roles = 0, deltas = 0;
  for (int i = 0; i < programs; ++i) {
    eval::ProgramFuzzer fz(static_cast<std::uint64_t>(i));
    const std::string role_src = fz.role_source();
    try {
      const auto a = dsl::parse_role(role_src);
      if (dsl::parse_role(dsl::print(a)) != a) return fail("role roundtrip differs, seed " + std::to_string(i));
      ++roles;
      // Every other seed also checks an increment against that role.
      if (i % 2 == 1) {
        const auto d = dsl::parse_delta(fz.delta_source(a));
        if (dsl::parse_delta(dsl::print(d)) != d) return fail("increment roundtrip differs, seed " + std::to_string(i));
        ++deltas;
      }
    } catch (const Error& e) {
      return fail("seed " + std::to_string(i) + ": " + e.what());
    }
  }
  return {true, std::to_string(roles) + " roles + " + std::to_string(deltas) + " increments"};
}

Verdict merge_laws(int pairs) {
  for (int i = 0; i < pairs; ++i) {
    const auto tag = "pair " + std::to_string(i);
    eval::ProgramFuzzer fz(0x3e7000u + static_cast<std::uint64_t>(i));
    const auto s = fuzz_state(fz, i % 3);
    const auto d = dsl::parse_delta(fz.delta_source(s.role()));
    const auto r = core::merge(d, s, {tag, core::Author::fuzzer});

    // Name union, existing order kept, new names appended in delta order.
    auto expect = method_names(s.role());
    for (const auto& m : d.methods) {
      if (std::find(expect.begin(), expect.end(), m.name) == expect.end()) expect.push_back(m.name);
    }
    if (method_names(r.role()) != expect) return fail(tag + ": method names are not the ordered union");
    for (const auto& m : d.methods) {
      if (!r.role().find_method(m.name) || *r.role().find_method(m.name) != m) {
        return fail(tag + ": merged body of " + m.name + " differs from the increment");
      }
    }
    // Idempotence on content.
    if (core::merge(d, r).role() != r.role()) return fail(tag + ": merging twice changed the code");
    // Untouched methods are byte-identical.
    for (const auto& m : s.role().methods) {
      if (d.find_method(m.name)) continue;
      if (dsl::print_method(*r.role().find_method(m.name)) != dsl::print_method(m)) {
        return fail(tag + ": untouched method " + m.name + " changed");
      }
    }
    if (r.role().fields != s.role().fields) return fail(tag + ": fields changed");
    // Replay from history.
    if (core::replay(r.initial_role(), r.history()) != r.role()) return fail(tag + ": replay differs");
    if (core::rebuild(r.initial_role(), r.history()) != r) return fail(tag + ": rebuild differs");
  }
  return {true, std::to_string(pairs) + " pairs, 4 laws each"};
}

Verdict damage_oracle() {
  std::stringstream in(testing::read_fixture("damage_oracle.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  bool saw_min = false, saw_immune = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    const std::int64_t expected = std::stoll(c[8]);
    const auto a_src = "  fn move_1() {\n    deal_damage(\"Hit\", " + c[0] + ", \"" + c[4] + "\", \"physical\")\n  }\n";
    auto a = battle::make_battle_role(testing::role_state("Att", c[3], a_src));
    auto d = battle::make_battle_role(testing::role_state("Def", c[5], "  fn move_1() {\n    heal(0)\n  }"));
    a.stats.atk = std::stoi(c[1]);
    d.stats.def = std::stoi(c[2]);
    d.hp = d.max_hp = 100000;
    battle::BattleState b(a, d, 1);
    battle::invoke(b, battle::SideId::A, "move_1");
    std::optional<std::int64_t> got;
    for (const auto& e : b.log) {
      if (e.kind == battle::EventKind::damage) got = e.payload.at("amount").get<std::int64_t>();
    }
    ++rows;
    if (got != expected) {
      return fail("row " + std::to_string(rows) + ": engine " + (got ? std::to_string(*got) : "none") +
                  ", oracle " + std::to_string(expected));
    }
    saw_min |= expected == 1 && c[7] != "0";
    saw_immune |= c[7] == "0" && expected == 0;
  }
  if (rows != 10) return fail("expected 10 oracle rows, found " + std::to_string(rows));
  if (!saw_min || !saw_immune) return fail("oracle lacks the min-1 or immunity row");
  return {true, "10/10 rows exact, incl. min-1 and immunity"};
}

Verdict battle_determinism(int battles) {
  const auto& seeds = data::seed_roles();
  auto run_all = [&] {
    std::vector<std::string> logs;
    for (int i = 0; i < battles; ++i) {
      const auto& a = seeds[static_cast<std::size_t>(i) % seeds.size()].state;
      const auto b = eval::synth_opponent(eval::mix_seed(0xd7, static_cast<std::uint64_t>(i)));
      battle::RandomPolicy pa, pb;
      logs.push_back(battle::run_battle(a, b, pa, pb, static_cast<std::uint64_t>(i)).to_jsonl());
    }
    return logs;
  };
  const auto first = run_all();
  const auto second = run_all();
  std::size_t bytes = 0;
  for (int i = 0; i < battles; ++i) {
    if (first[static_cast<std::size_t>(i)] != second[static_cast<std::size_t>(i)]) {
      return fail("battle " + std::to_string(i) + " diverged");
    }
    bytes += first[static_cast<std::size_t>(i)].size();
  }
  return {true, std::to_string(battles) + " battles, " + std::to_string(bytes) + " log bytes identical"};
}

Verdict exe_semantics(int n_opponents) {
  // Rebuild each seed role through evolve_step with a scripted proxy that
  // answers its recorded increments.
  std::vector<eval::RoleEntry> evolved;
  for (const auto& seed : data::seed_roles()) {
    core::EngineState state(seed.state.initial_role());
    std::vector<proxy::ScriptedProxy::Rule> rules;
    std::set<std::string> seen;
    for (const auto& h : seed.state.history()) {
      if (!seen.insert(h.instruction.text).second) return fail(seed.id + ": repeated instruction");
      std::vector<std::string> select;
      for (const auto& m : h.delta.methods) {
        if (state.lookup(m.name)) select.push_back(m.name);
      }
      if (select.empty()) select.push_back(core::skeleton(state).entries.front().name);
      rules.push_back({h.instruction.text, select, dsl::print(h.delta)});
      state = core::merge(h.delta, state, h.instruction);
    }
    proxy::ScriptedProxy proxy(rules);
    core::EngineState s(seed.state.initial_role());
    for (const auto& h : seed.state.history()) s = core::evolve_step(s, h.instruction, proxy).state;
    if (s.role() != seed.state.role()) return fail(seed.id + ": scripted evolution diverged from the seed");
    evolved.push_back({seed.id, s});
  }
  if (evolved.size() != 20) return fail("expected 20 seed roles");
  const auto all = eval::exe_rate(evolved, {.n_opponents = n_opponents, .seed = 2024});
  if (all.exe_percent != 100.0) return fail("20 seeds: Exe " + std::to_string(all.exe_percent));

  std::vector<eval::RoleEntry> five(evolved.begin(), evolved.begin() + 4);
  five.push_back({"div0", testing::role_state("DivZero", "Normal", "  fn move_1() {\n    let x = 1 / 0\n  }")});
  const auto mixed = eval::exe_rate(five, {.n_opponents = n_opponents, .seed = 2024});
  if (mixed.exe_percent != 80.0) return fail("5 roles: Exe " + std::to_string(mixed.exe_percent));
  if (mixed.per_role.at("div0").first_error->kind != battle::RuntimeErrorKind::divide_by_zero) {
    return fail("div0 failed for the wrong reason");
  }

  // An opponent that errs on its first move ends battles as errorB and must
  // not count against the tested role.
  const auto bad = testing::role_state("Crasher", "Normal", "  fn move_1() {\n    let x = 1 / 0\n  }", 250);
  std::vector<core::EngineState> opponents{bad};
  for (int j = 0; j < 4; ++j) opponents.push_back(eval::synth_opponent(static_cast<std::uint64_t>(j)));
  battle::RandomPolicy pa, pb;
  const auto direct = battle::run_battle(evolved.front().state, bad, pa, pb, 1);
  if (direct.outcome != battle::Outcome::error_b) return fail("crasher did not end the battle as errorB");
  const auto attributed = eval::exe_rate({evolved.front()}, {.seed = 3, .opponents = &opponents});
  if (attributed.exe_percent != 100.0) return fail("erring opponent failed the tested role");

  return {true, "20 seeds 100.0; 4+div0 80.0; errorB not charged to A"};
}

Verdict sample_arithmetic(int pools) {
  auto fuzz_role = [](const std::string& id, std::uint64_t seed, int steps) {
    eval::ProgramFuzzer fz(seed);
    return data::RoleBundle{id, testing::green_bug_script(), fuzz_state(fz, steps)};
  };
  std::vector<data::RoleBundle> hard;
  std::size_t total = 0;
  for (int i = 0; i < 16; ++i) {
    hard.push_back(fuzz_role("hard-" + std::to_string(i), 500 + static_cast<std::uint64_t>(i), i < 7 ? 6 : 5));
    total += hard.back().state.history().size();
  }
  if (total != 87) return fail("fixture history sums to " + std::to_string(total));
  const auto samples = data::split_all(hard);
  if (samples.size() != 87) return fail("16 roles gave " + std::to_string(samples.size()) + " samples");

  battle::Rng rng(4242);
  for (int p = 0; p < pools; ++p) {
    std::vector<data::RoleBundle> roles;
    std::size_t sum = 0;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      roles.push_back(fuzz_role("p" + std::to_string(p) + "-" + std::to_string(i), rng.below(1u << 30),
                                1 + static_cast<int>(rng.below(6))));
      sum += roles.back().state.history().size();
    }
    if (data::split_all(roles).size() != sum) return fail("pool " + std::to_string(p) + " breaks the law");
  }
  return {true, "16 roles -> 87 samples (5.44/role); law holds on " + std::to_string(pools) + " pools"};
}

Verdict scaling_harness(int runs) {
  std::vector<eval::ScalingTrace> traces;
  std::map<int, int> expect;
  std::size_t sparse_checks = 0;
  for (int run = 0; run < runs; ++run) {
    const int k = run % 9 + 1;
    proxy::ScriptedProxy p({}, proxy::ScriptedProxy::Fallback::grow);
    p.fail_from_step(static_cast<std::size_t>(k));
    traces.push_back(eval::scaling_run(p, eval::Database::standard(), static_cast<std::uint64_t>(run)));
    ++expect[k];
    const auto& t = traces.back();
    if (t.steps_completed != k) return fail("run " + std::to_string(run) + " stopped at " + std::to_string(t.steps_completed));
    for (const auto& s : t.steps) {
      if (s.method_count > 5) {
        ++sparse_checks;
        if (s.context_size >= s.full_size) return fail("run " + std::to_string(run) + ": context not sparse");
      }
    }
  }
  const auto h = eval::scaling_histogram(traces);
  if (h.by_steps != expect) return fail("histogram buckets differ from the configured failure steps");
  // Longer runs so the sparsity check also covers large engines.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    proxy::ScriptedProxy p({}, proxy::ScriptedProxy::Fallback::grow);
    const auto t = eval::scaling_run(p, eval::Database::standard(), 0x5ca1e + seed, {.max_steps = 40});
    for (const auto& s : t.steps) {
      if (s.method_count > 5) {
        ++sparse_checks;
        if (s.context_size >= s.full_size) return fail("long run: context not sparse");
      }
    }
  }
  return {true, std::to_string(runs) + " runs in bucket k; " + std::to_string(sparse_checks) + " sparse steps"};
}

Verdict toi_monotonicity(int pairs) {
  for (int i = 0; i < pairs; ++i) {
    eval::ProgramFuzzer fz(0x701u + static_cast<std::uint64_t>(i));
    const auto y = fuzz_state(fz, i % 2);
    const auto d = dsl::parse_delta(fz.delta_source(y.role()));
    const auto next = core::merge(d, y);
    const auto before = data::tag_interest(y), after = data::tag_interest(next);
    if (!after.dominates(before)) return fail("pair " + std::to_string(i) + ": a tag disappeared");
    if (after != (before | data::tag_methods(d.methods))) return fail("pair " + std::to_string(i) + ": not the OR");
  }
  for (int i = 0; i < pairs; ++i) {
    eval::ProgramFuzzer fz(0x702u + static_cast<std::uint64_t>(i));
    auto role = dsl::parse_role(fz.role_source());
    const auto v = data::tag_interest(core::EngineState(role));
    battle::Rng rng(static_cast<std::uint64_t>(i));
    for (std::size_t j = role.methods.size(); j > 1; --j) std::swap(role.methods[j - 1], role.methods[rng.below(j)]);
    if (data::tag_interest(core::EngineState(role)) != v) return fail("reordering changed role " + std::to_string(i));
  }
  return {true, std::to_string(pairs) + " merges dominate; " + std::to_string(pairs) + " shuffles stable"};
}

Verdict filter_chain() {
  const auto script = core::RoleScript::from_json(json::parse(testing::read_fixture("filter/script.json")));
  const std::vector<std::pair<std::string, data::RejectReason>> cases = {
      {"compile", data::RejectReason::compile},
      {"dangling", data::RejectReason::dangling},
      {"interest", data::RejectReason::interest},
  };
  std::string seen;
  for (const auto& [name, reason] : cases) {
    const auto r = data::filter_source(script, testing::read_fixture("filter/" + name + ".dsl"));
    if (r.verdict != data::FilterVerdict::reject || r.reason != reason) {
      return fail(name + " fixture: got " + data::to_string(r.verdict) + "/" + data::to_string(r.reason));
    }
    seen += (seen.empty() ? "" : ", ") + std::string(data::to_string(r.reason));
  }
  const auto ok = data::filter_source(script, testing::read_fixture("filter/accept.dsl"));
  if (ok.verdict != data::FilterVerdict::accept) return fail("control fixture was not accepted: " + ok.detail);
  return {true, "reject codes " + seen + "; control accepted"};
}

Verdict crash_replay() {
  testing::TempDir dir("accept-crash");
  const auto cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"proxy_kind": "scripted", "scripted_proxy": {"rules": [], "fallback": "grow"}})";
  const auto data_dir = dir.path() / "data";
  const std::string instruction = "Learn the move Gust: a gale of wind.";
  std::string id, code_before;
  {
    testing::ChildProcess child(testing::serve_argv(data_dir, cfg), {{"DELTA_CRASH_POINT", "after_event"}});
    httplib::Client c("127.0.0.1", testing::start_server(child));
    auto created = c.Post("/api/roles", testing::green_bug_script().to_json().dump(), "application/json");
    if (!created || created->status != 201) return fail("create failed");
    id = json::parse(created->body).at("roleId");
    code_before = json::parse(created->body).at("code");
    auto res = c.Post("/api/roles/" + id + "/evolve", json{{"instruction", instruction}}.dump(), "application/json");
    if (res) return fail("service answered instead of dying");
    const auto code = child.wait(std::chrono::seconds(10));
    if (code != 86) return fail("service did not stop at the crash point");
  }
  const auto [rc, out] = testing::run_process({DELTA_CLI_PATH, "fsck", "--data", data_dir.string()});
  if (rc != 0) return fail("fsck failed: " + out);

  testing::ChildProcess child(testing::serve_argv(data_dir, cfg));
  httplib::Client c("127.0.0.1", testing::start_server(child));
  auto got = c.Get("/api/roles/" + id);
  if (!got || got->status != 200) return fail("role missing after restart");
  const auto view = json::parse(got->body);
  if (view.at("step") != 1 || view.at("history").size() != 1 || view["history"][0]["instruction"] != instruction) {
    return fail("post-evolve state not recovered");
  }
  if (view.at("code") == code_before) return fail("code did not change");
  std::ifstream snap(data_dir / "roles" / id / "snapshot.dsl", std::ios::binary);
  const std::string snapshot((std::istreambuf_iterator<char>(snap)), std::istreambuf_iterator<char>());
  if (snapshot != view.at("code")) return fail("snapshot not refreshed on restart");
  return {true, "killed after event write; fsck ok; GET shows step 1"};
}

}  // namespace delta::acceptance
