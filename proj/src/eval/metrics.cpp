#include "delta/eval/metrics.hpp"

#include <atomic>
#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>
#include <thread>

#include "delta/core/retrieval.hpp"
#include "delta/error.hpp"
#include "delta/eval/opponents.hpp"

namespace delta::eval {

using nlohmann::json;

namespace {

std::uint64_t id_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t ExeReport::passed() const {
  std::size_t n = 0;
  for (const auto& [id, r] : per_role) n += r.passed;
  return n;
}

json ExeReport::to_json() const {
  json roles = json::object();
  for (const auto& [id, r] : per_role) {
    json j = {{"passed", r.passed}, {"opponentsFought", r.opponents_fought}};
    j["firstError"] = r.first_error ? r.first_error->to_json() : json(nullptr);
    if (r.failing_opponent) j["failingOpponent"] = *r.failing_opponent;
    roles[id] = j;
  }
  return {{"perRole", roles}, {"exePercent", exe_percent}, {"nOpponents", n_opponents}, {"seed", seed}};
}

std::vector<core::EngineState> exe_opponents(std::uint64_t seed, int n, const Database& db) {
  std::vector<core::EngineState> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.push_back(synth_opponent(mix_seed(seed, static_cast<std::uint64_t>(j)), db));
  return out;
}

ExeReport exe_rate(const std::vector<RoleEntry>& roles, const ExeOptions& options) {
  if (roles.empty()) throw Error("exe_rate: no roles");
  const int n_opponents = options.opponents ? static_cast<int>(options.opponents->size()) : options.n_opponents;
  if (n_opponents < 1) throw Error("exe_rate: need at least one opponent");
  std::set<std::string> ids;
  for (const auto& r : roles) {
    if (!ids.insert(r.id).second) throw Error("exe_rate: duplicate role id " + r.id);
  }
  const Database& db = options.db ? *options.db : Database::standard();
  std::vector<battle::BattleRole> opponents;
  for (const auto& o : options.opponents ? *options.opponents : exe_opponents(options.seed, n_opponents, db)) {
    opponents.push_back(battle::make_battle_role(o));
  }

  std::vector<ExeRoleResult> results(roles.size());
  parallel_for(roles.size(), options.workers, [&](std::size_t i) {
    const battle::BattleRole tested = battle::make_battle_role(roles[i].state);
    ExeRoleResult& res = results[i];
    for (int j = 0; j < n_opponents; ++j) {
      const std::uint64_t seed = mix_seed(mix_seed(options.seed, id_hash(roles[i].id)), static_cast<std::uint64_t>(j));
      battle::RandomPolicy pa, pb;
      auto log = battle::run_battle(battle::BattleState(tested, opponents[static_cast<std::size_t>(j)], seed), pa, pb,
                                    options.max_turns);
      ++res.opponents_fought;
      if (log.outcome == battle::Outcome::error_a) {
        res.passed = false;
        res.first_error = log.error;
        res.failing_opponent = j;
        break;
      }
    }
  });

  ExeReport report;
  report.n_opponents = n_opponents;
  report.seed = options.seed;
  for (std::size_t i = 0; i < roles.size(); ++i) report.per_role.emplace(roles[i].id, results[i]);
  report.exe_percent = 100.0 * static_cast<double>(report.passed()) / static_cast<double>(roles.size());
  return report;
}

std::optional<Verdict> MockJudge::judge(const core::EngineState& candidate, const core::EngineState& reference) {
  return core::print_state(candidate) == core::print_state(reference) ? Verdict::equivalent : Verdict::different;
}

proxy::PromptBundle LlmJudge::rubric_prompt(const core::EngineState& candidate, const core::EngineState& reference) {
  proxy::PromptBundle p;
  p.system = "You review code for creatures in a turn-based battle game.";
  p.user =
      "Compare two programs written in the same role language. They are EQUIVALENT if every move and hook behaves "
      "the same in battle for every input, even when names, layout or the order of declarations differ. Otherwise "
      "they are DIFFERENT.\n\nProgram A (candidate):\n```\n" +
      core::print_state(candidate) + "```\n\nProgram B (reference):\n```\n" + core::print_state(reference) +
      "```\n\nAnswer with one word: EQUIVALENT or DIFFERENT.\n";
  p.max_tokens = 8;
  p.temperature = 0.0;
  p.template_version = "judge/1";
  return p;
}

std::optional<Verdict> LlmJudge::judge(const core::EngineState& candidate, const core::EngineState& reference) {
  std::string answer = generator_.complete(rubric_prompt(candidate, reference));
  for (auto& c : answer) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  const auto eq = answer.find("EQUIVALENT");
  const auto diff = answer.find("DIFFERENT");
  if (eq == std::string::npos && diff == std::string::npos) return std::nullopt;
  return eq < diff ? Verdict::equivalent : Verdict::different;
}

json AccReport::to_json() const {
  return {{"perRole", per_role},       {"abstained", abstained},   {"excluded", excluded},
          {"denominator", denominator}, {"accPercent", acc_percent}};
}

AccReport acc_rate(const std::vector<AccPair>& pairs, Judge& judge, const ExeReport* exe) {
  AccReport report;
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    if (exe) {
      auto it = exe->per_role.find(p.id);
      if (it == exe->per_role.end() || !it->second.passed) {
        report.excluded.push_back(p.id);
        continue;
      }
    }
    std::optional<Verdict> v;
    try {
      v = judge.judge(p.candidate, p.reference);
    } catch (const ProxyError&) {
      v.reset();
    }
    if (!v) {
      report.abstained.push_back(p.id);
      continue;
    }
    const bool ok = *v == Verdict::equivalent;
    report.per_role[p.id] = ok;
    correct += ok;
  }
  report.denominator = report.per_role.size();
  report.acc_percent =
      report.denominator ? 100.0 * static_cast<double>(correct) / static_cast<double>(report.denominator) : 0.0;
  return report;
}

}  // namespace delta::eval
