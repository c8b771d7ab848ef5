#include <pthread.h>
#include <signal.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "delta/battle/battle.hpp"
#include "delta/core/evolve.hpp"
#include "delta/data/codesign.hpp"
#include "delta/data/corpus.hpp"
#include "delta/data/interest.hpp"
#include "delta/data/pool.hpp"
#include "delta/data/samples.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"
#include "delta/eval/metrics.hpp"
#include "delta/eval/opponents.hpp"
#include "delta/eval/scaling.hpp"
#include "delta/proxy/http_chat.hpp"
#include "delta/service/server.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace delta;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

// "seeds" (or empty): the bundled seed roles. A directory holding roles/: a
// service data dir. Otherwise a directory of role bundle *.json files.
std::vector<data::RoleBundle> load_bundles(const std::string& where) {
  if (where.empty() || where == "seeds") return data::seed_roles();
  const fs::path dir(where);
  std::vector<data::RoleBundle> out;
  if (fs::is_directory(dir / "roles")) {
    service::RoleStore store(dir);
    for (const auto& r : store.list()) out.push_back({r.id, r.script, r.state});
    return out;
  }
  if (!fs::is_directory(dir)) throw Error("no role directory " + where);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.push_back(data::RoleBundle::from_json(json::parse(slurp(f))));
    } catch (const json::exception& e) {
      throw Error(f.string() + ": " + e.what());
    }
  }
  return out;
}

// Bundles plus bare *.dsl role sources (id = file stem).
std::vector<eval::RoleEntry> load_entries(const std::string& where) {
  std::vector<eval::RoleEntry> out;
  for (auto& b : load_bundles(where)) out.push_back({b.id, b.state});
  if (!where.empty() && where != "seeds" && !fs::is_directory(fs::path(where) / "roles")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(where)) {
      if (e.path().extension() == ".dsl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      out.push_back({f.stem().string(), core::EngineState(dsl::parse_role(slurp(f)))});
    }
  }
  return out;
}

service::ServiceConfig load_config(const std::string& file) { return service::ServiceConfig::load(file); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental role engines: service, battles, evaluation and data pipeline."};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the REST API");
  std::string config_file, listen, data_dir;
  serve->add_option("--config", config_file, "Service config JSON");
  serve->add_option("--listen", listen, "host:port (port 0 picks a free port)");
  serve->add_option("--data", data_dir, "Data directory");

  // role
  auto* role = app.add_subcommand("role", "Create, evolve and inspect stored roles");
  role->require_subcommand(1);
  std::string role_id, script_file, instruction;
  bool no_retrieval = false, show_full = false;
  auto* role_create = role->add_subcommand("create", "Create a role from a script JSON file");
  role_create->add_option("--data", data_dir)->required();
  role_create->add_option("--script", script_file)->required()->check(CLI::ExistingFile);
  auto* role_evolve = role->add_subcommand("evolve", "One evolution step");
  role_evolve->add_option("--data", data_dir)->required();
  role_evolve->add_option("--id", role_id)->required();
  role_evolve->add_option("--instruction", instruction)->required();
  role_evolve->add_option("--config", config_file);
  role_evolve->add_flag("--no-retrieval", no_retrieval, "Give the proxy every method");
  auto* role_show = role->add_subcommand("show", "Print a role");
  role_show->add_option("--data", data_dir)->required();
  role_show->add_option("--id", role_id)->required();
  role_show->add_flag("--full", show_full, "Print the full program instead of JSON");
  auto* role_list = role->add_subcommand("list", "List stored roles");
  role_list->add_option("--data", data_dir)->required();

  // battle
  auto* battle_cmd = app.add_subcommand("battle", "Battles");
  battle_cmd->require_subcommand(1);
  auto* battle_run = battle_cmd->add_subcommand("run", "Run one battle and print its event log");
  std::string role_a, role_b, policy_a = "random", policy_b = "random", out_path;
  std::uint64_t seed = 0, opponent_seed = 0;
  int max_turns = battle::kMaxTurns;
  battle_run->add_option("--roles", data_dir, "Where roles live (see eval exe --roles)")->default_val("seeds");
  battle_run->add_option("--a", role_a, "Role id for side A")->required();
  battle_run->add_option("--b", role_b, "Role id for side B (default: synthesized opponent)");
  battle_run->add_option("--opponent-seed", opponent_seed);
  battle_run->add_option("--seed", seed);
  battle_run->add_option("--policy-a", policy_a, "random or comma-separated move indices");
  battle_run->add_option("--policy-b", policy_b);
  battle_run->add_option("--max-turns", max_turns)->check(CLI::Range(1, 1000));
  battle_run->add_option("--out", out_path, "Write the JSON-lines log here");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Metrics");
  eval_cmd->require_subcommand(1);
  std::string roles_dir = "seeds", out_dir, pairs_file, judge_kind = "mock";
  int n_opponents = 100, runs = 100, max_steps = 40;
  unsigned workers = 0;
  bool dense = false;
  auto* eval_exe = eval_cmd->add_subcommand("exe", "Executability against synthesized opponents");
  eval_exe->add_option("--roles", roles_dir, "seeds, a service data dir, or a directory of role files");
  eval_exe->add_option("--opponents", n_opponents)->check(CLI::PositiveNumber);
  eval_exe->add_option("--seed", seed);
  eval_exe->add_option("--workers", workers);
  eval_exe->add_option("--out", out_dir);
  auto* eval_acc = eval_cmd->add_subcommand("acc", "Accuracy of candidate roles against references");
  eval_acc->add_option("--pairs", pairs_file, "JSON [{id, candidate, reference}] with role sources")
      ->required()
      ->check(CLI::ExistingFile);
  eval_acc->add_option("--judge", judge_kind)->check(CLI::IsMember({"mock", "llm"}));
  eval_acc->add_option("--config", config_file);
  eval_acc->add_option("--opponents", n_opponents)->check(CLI::PositiveNumber);
  eval_acc->add_option("--seed", seed);
  eval_acc->add_option("--out", out_dir);
  auto* eval_scale = eval_cmd->add_subcommand("scale", "Repeated evolution until the first failure");
  eval_scale->add_option("--runs", runs)->check(CLI::PositiveNumber);
  eval_scale->add_option("--max-steps", max_steps)->check(CLI::PositiveNumber);
  eval_scale->add_option("--seed", seed);
  eval_scale->add_option("--config", config_file);
  eval_scale->add_flag("--dense", dense, "Give the proxy every method");
  eval_scale->add_option("--out", out_dir);

  // data
  auto* data_cmd = app.add_subcommand("data", "Data pipeline");
  data_cmd->require_subcommand(1);
  std::string prototypes_dir, pool_dir, mode = "codesign", generator = "template";
  std::size_t count = 1, threshold = 2;
  bool reject = false;
  std::string note;
  auto* data_generate = data_cmd->add_subcommand("generate", "Design and code new roles into a pool");
  data_generate->add_option("--prototypes", prototypes_dir, "Directory of prototype .txt files (default: bundled)");
  data_generate->add_option("--pool", pool_dir)->required();
  data_generate->add_option("--count", count);
  data_generate->add_option("--mode", mode)->check(CLI::IsMember({"codesign", "synthetic"}));
  data_generate->add_option("--threshold", threshold);
  data_generate->add_option("--seed", seed);
  data_generate->add_option("--generator", generator)->check(CLI::IsMember({"template", "llm"}));
  data_generate->add_option("--config", config_file);
  auto* data_tag = data_cmd->add_subcommand("tag", "Tags of interest per role");
  data_tag->add_option("--roles", roles_dir);
  data_tag->add_option("--pool", pool_dir, "Use the admitted instances of a pool");
  auto* data_split = data_cmd->add_subcommand("split", "Split roles into per-step training samples");
  data_split->add_option("--roles", roles_dir);
  data_split->add_option("--pool", pool_dir, "Use the admitted instances of a pool");
  data_split->add_option("--out", out_path)->required();
  auto* data_approve = data_cmd->add_subcommand("approve", "Sign off (or decline) a pending pool instance");
  data_approve->add_option("--pool", pool_dir)->required();
  data_approve->add_option("--id", role_id)->required();
  data_approve->add_flag("--reject", reject);
  data_approve->add_option("--note", note);

  // fsck
  auto* fsck_cmd = app.add_subcommand("fsck", "Verify a service data directory");
  fsck_cmd->add_option("--data", data_dir)->required();

  CLI11_PARSE(app, argc, argv);

  auto load_pool = [&]() {
    return fs::exists(fs::path(pool_dir) / "events.jsonl") ? data::SamplePool::load(pool_dir)
                                                          : data::SamplePool::from_seeds();
  };
  auto pool_or_roles = [&]() {
    return pool_dir.empty() ? load_bundles(roles_dir) : data::SamplePool::load(pool_dir).instances();
  };

  try {
    if (*serve) {
      auto cfg = load_config(config_file);
      if (!listen.empty()) cfg.listen_address = listen;
      if (!data_dir.empty()) cfg.data_dir = data_dir;
      // Signals are taken by a dedicated thread; every other thread inherits the mask.
      sigset_t stop_signals;
      sigemptyset(&stop_signals);
      sigaddset(&stop_signals, SIGINT);
      sigaddset(&stop_signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
      service::Server server(cfg);
      const int port = server.bind();
      std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        server.stop();
      });
      std::cout << "listening on " << cfg.host() << ":" << port << std::endl;
      server.run();
      if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
      }
      return 0;
    }

    if (*role_create) {
      service::RoleStore store(data_dir);
      const auto r = store.create(core::RoleScript::from_json(json::parse(slurp(script_file))));
      std::cout << service::role_json(r).dump(2) << "\n";
      return 0;
    }
    if (*role_evolve) {
      service::RoleStore store(data_dir);
      const auto before = store.get(role_id);
      if (!before) throw Error("no role " + role_id);
      auto proxy = load_config(config_file).make_proxy();
      const core::Instruction x{instruction, core::Author::player};
      core::EvolveOptions opts;
      opts.retrieval = !no_retrieval;
      try {
        auto result = core::evolve_step(before->state, x, *proxy, opts);
        const auto after = store.append(role_id, before->state.step(), result.state, x);
        std::cout << json{{"roleId", role_id},
                          {"step", after.state.step()},
                          {"delta", result.delta_source},
                          {"selected", result.selected}}
                         .dump(2)
                  << "\n";
      } catch (const NonExecutableDelta& e) {
        std::cerr << "error: " << e.what() << "\n--- raw response ---\n" << e.raw_response() << "\n";
        return 3;
      }
      return 0;
    }
    if (*role_show) {
      service::RoleStore store(data_dir);
      const auto r = store.get(role_id);
      if (!r) throw Error("no role " + role_id);
      if (show_full) {
        std::cout << core::print_state(r->state);
      } else {
        std::cout << service::role_json(*r).dump(2) << "\n";
      }
      return 0;
    }
    if (*role_list) {
      service::RoleStore store(data_dir);
      for (const auto& r : store.list()) {
        std::cout << r.id << "\t" << r.state.role().name << "\tstep " << r.state.step() << "\n";
      }
      return 0;
    }

    if (*battle_run) {
      auto roles = load_entries(data_dir);
      auto find = [&](const std::string& id) -> const core::EngineState& {
        for (const auto& e : roles) {
          if (e.id == id) return e.state;
        }
        throw Error("no role " + id);
      };
      auto make_policy = [](const std::string& spec) -> std::unique_ptr<battle::Policy> {
        if (spec == "random") return std::make_unique<battle::RandomPolicy>();
        std::vector<int> moves;
        std::stringstream ss(spec);
        for (std::string tok; std::getline(ss, tok, ',');) moves.push_back(std::stoi(tok));
        return std::make_unique<battle::ScriptedPolicy>(moves);
      };
      const auto& a = find(role_a);
      const auto b = role_b.empty() ? eval::synth_opponent(opponent_seed) : find(role_b);
      auto pa = make_policy(policy_a);
      auto pb = make_policy(policy_b);
      const auto log = battle::run_battle(a, b, *pa, *pb, seed, max_turns);
      if (out_path.empty()) {
        std::cout << log.to_jsonl();
      } else {
        write_out(out_path, log.to_jsonl());
      }
      json summary = {{"outcome", battle::to_string(log.outcome)}, {"turns", log.turns}, {"events", log.events.size()}};
      if (log.error) summary["error"] = log.error->to_json();
      std::cerr << summary.dump() << "\n";
      return 0;
    }

    if (*eval_exe) {
      eval::ExeOptions opts;
      opts.n_opponents = n_opponents;
      opts.seed = seed;
      opts.workers = workers;
      const auto report = eval::exe_rate(load_entries(roles_dir), opts);
      if (!out_dir.empty()) {
        write_out(fs::path(out_dir) / "exe.json", report.to_json().dump(2) + "\n");
        std::string csv = "role_id,passed,opponents_fought,failing_opponent\n";
        for (const auto& [id, r] : report.per_role) {
          csv += id + "," + (r.passed ? "1" : "0") + "," + std::to_string(r.opponents_fought) + "," +
                 (r.failing_opponent ? std::to_string(*r.failing_opponent) : "") + "\n";
        }
        write_out(fs::path(out_dir) / "exe.csv", csv);
      }
      std::printf("Exe %.1f%% (%zu/%zu roles, %d opponents, seed %llu)\n", report.exe_percent, report.passed(),
                  report.per_role.size(), report.n_opponents, static_cast<unsigned long long>(report.seed));
      return 0;
    }
    if (*eval_acc) {
      const auto j = json::parse(slurp(pairs_file));
      std::vector<eval::AccPair> pairs;
      std::vector<eval::RoleEntry> candidates;
      for (const auto& p : j) {
        eval::AccPair pair{p.at("id").get<std::string>(),
                           core::EngineState(dsl::parse_role(p.at("candidate").get<std::string>())),
                           core::EngineState(dsl::parse_role(p.at("reference").get<std::string>()))};
        candidates.push_back({pair.id, pair.candidate});
        pairs.push_back(std::move(pair));
      }
      eval::ExeOptions opts;
      opts.n_opponents = n_opponents;
      opts.seed = seed;
      const auto exe = eval::exe_rate(candidates, opts);
      std::unique_ptr<proxy::HttpChatProxy> llm;
      std::unique_ptr<eval::Judge> judge;
      if (judge_kind == "llm") {
        llm = std::make_unique<proxy::HttpChatProxy>(load_config(config_file).proxy);
        judge = std::make_unique<eval::LlmJudge>(*llm);
      } else {
        judge = std::make_unique<eval::MockJudge>();
      }
      const auto report = eval::acc_rate(pairs, *judge, &exe);
      if (!out_dir.empty()) write_out(fs::path(out_dir) / "acc.json", report.to_json().dump(2) + "\n");
      std::printf("Acc %.1f%% (denominator %zu, %zu abstained, %zu excluded)\n", report.acc_percent,
                  report.denominator, report.abstained.size(), report.excluded.size());
      return 0;
    }
    if (*eval_scale) {
      auto proxy = load_config(config_file).make_proxy();
      eval::ScalingOptions opts;
      opts.max_steps = max_steps;
      opts.retrieval = !dense;
      std::vector<eval::ScalingTrace> traces;
      for (int i = 0; i < runs; ++i) {
        traces.push_back(eval::scaling_run(*proxy, eval::Database::standard(), eval::mix_seed(seed, i), opts));
        traces.back().run_id = i;
      }
      const auto hist = eval::scaling_histogram(traces);
      if (!out_dir.empty()) {
        const fs::path d(out_dir);
        write_out(d / "traces.csv", eval::traces_csv(traces));
        write_out(d / "steps.csv", hist.steps_csv());
        write_out(d / "size.csv", hist.size_csv());
        write_out(d / "histogram.json", hist.to_json().dump(2) + "\n");
        json all = json::array();
        for (const auto& t : traces) all.push_back(t.to_json());
        write_out(d / "traces.json", all.dump(2) + "\n");
      }
      std::cout << hist.steps_csv();
      std::printf("%zu/%zu runs reached %d steps\n", hist.maxed, hist.total, max_steps);
      return 0;
    }

    if (*data_generate) {
      auto pool = load_pool();
      const auto protos = prototypes_dir.empty() ? data::bundled_prototypes() : data::load_prototypes(prototypes_dir);
      data::GenerateOptions opts;
      opts.count = count;
      opts.mode = data::parse_generate_mode(mode);
      opts.threshold = threshold;
      opts.seed = seed;
      data::TemplateGenerator templ;
      std::unique_ptr<proxy::HttpChatProxy> llm;
      proxy::TextGenerator* gen = &templ;
      if (generator == "llm") {
        llm = std::make_unique<proxy::HttpChatProxy>(load_config(config_file).proxy);
        gen = llm.get();
      }
      const auto report = data::generate_roles(protos, pool, *gen, *gen, opts);
      pool.save(pool_dir);
      std::cout << report.to_json().dump(2) << "\n";
      return 0;
    }
    if (*data_tag) {
      for (const auto& b : pool_or_roles()) {
        const auto toi = data::tag_interest(b.state);
        std::cout << b.id << "\t" << toi.magnitude() << "\t" << toi.to_string() << "\n";
      }
      return 0;
    }
    if (*data_split) {
      const auto samples = data::split_all(pool_or_roles());
      write_out(out_path, data::to_jsonl(samples));
      std::cout << samples.size() << " samples\n";
      return 0;
    }
    if (*data_approve) {
      auto pool = data::SamplePool::load(pool_dir);
      if (reject) {
        pool.decline(role_id, note);
      } else {
        pool.approve(role_id);
      }
      pool.save(pool_dir);
      std::cout << (reject ? "declined " : "approved ") << role_id << "\n";
      return 0;
    }

    if (*fsck_cmd) {
      const auto report = service::fsck(data_dir);
      std::cout << report.to_json().dump(2) << "\n";
      return report.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
