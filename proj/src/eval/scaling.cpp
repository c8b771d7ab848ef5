#include "delta/eval/scaling.hpp"

#include <sstream>

#include "delta/battle/rng.hpp"
#include "delta/core/evolve.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/error.hpp"
#include "delta/eval/opponents.hpp"

namespace delta::eval {

using nlohmann::json;

namespace {

constexpr std::uint64_t kReferenceSeed = 0x5eed;
constexpr std::uint64_t kSmokeSeed = 7;

const battle::BattleRole& reference_opponent() {
  static const battle::BattleRole ref = battle::make_battle_role(synth_opponent(kReferenceSeed));
  return ref;
}

}  // namespace

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::none: return "none";
    case FailureKind::parse: return "parse";
    case FailureKind::validate: return "validate";
    case FailureKind::smoke_battle: return "smokeBattle";
    case FailureKind::proxy: return "proxy";
  }
  return "?";
}

json ScalingTrace::to_json() const {
  json st = json::array();
  for (const auto& s : steps) {
    st.push_back({{"engineSize", s.engine_size},
                  {"contextSize", s.context_size},
                  {"fullSize", s.full_size},
                  {"methodCount", s.method_count},
                  {"instruction", s.instruction}});
  }
  json j = {{"runId", run_id},
            {"stepsCompleted", steps_completed},
            {"engineSizeAtFailure", engine_size_at_failure},
            {"failureKind", to_string(failure_kind)},
            {"steps", st}};
  if (!failure_message.empty()) j["failureMessage"] = failure_message;
  if (final_state) j["finalState"] = core::print_state(*final_state);
  return j;
}

std::optional<battle::RuntimeError> smoke_battle(const core::EngineState& state) {
  const battle::BattleRole role = battle::make_battle_role(state);
  const battle::BattleRole& foe = reference_opponent();
  const int foe_move = battle::move_indices(foe).front();
  for (int slot : battle::move_indices(role)) {
    battle::BattleState b(role, foe, kSmokeSeed);
    battle::step(b, slot, foe_move);
    if (b.outcome == battle::Outcome::error_a) return b.error;
  }
  return std::nullopt;
}

ScalingTrace scaling_run(proxy::NeuralProxy& proxy, const Database& db, std::uint64_t seed,
                         const ScalingOptions& options) {
  if (db.instruction_count() == 0) throw Error("scaling_run: empty database");
  ScalingTrace trace;
  trace.run_id = seed;
  core::EngineState state = synth_opponent(seed, db);
  battle::Rng rng(mix_seed(seed, 0x1ab));

  auto fail = [&](FailureKind kind, const std::string& message) {
    trace.failure_kind = kind;
    trace.failure_message = message;
    trace.engine_size_at_failure = core::token_count(core::print_state(state));
  };

  for (int i = 0; i < options.max_steps; ++i) {
    const std::string text = db.instruction(static_cast<std::size_t>(rng.below(db.instruction_count())));
    ScalingStep rec;
    rec.instruction = text;
    rec.method_count = state.method_names().size();
    rec.full_size = core::token_count(core::full_listing(state));
    std::optional<core::EvolveResult> res;
    try {
      res = core::evolve_step(state, {text, core::Author::pipeline}, proxy, {options.retrieval});
    } catch (const NonExecutableDelta& e) {
      fail(e.stage() == NonExecutableDelta::Stage::validate ? FailureKind::validate : FailureKind::parse, e.what());
      break;
    } catch (const UnknownEntry& e) {
      fail(FailureKind::validate, e.what());
      break;
    } catch (const ProxyError& e) {
      fail(FailureKind::proxy, e.what());
      break;
    }
    if (auto err = smoke_battle(res->state)) {
      fail(FailureKind::smoke_battle, err->message);
      break;
    }
    rec.context_size = core::token_count(res->context.render());
    rec.engine_size = core::token_count(core::print_state(res->state));
    trace.steps.push_back(std::move(rec));
    state = std::move(res->state);
    ++trace.steps_completed;
  }
  trace.final_state = state;
  return trace;
}

std::string ScalingHistogram::steps_csv() const {
  std::ostringstream out;
  out << "steps,count\n";
  for (const auto& [s, n] : by_steps) out << s << ',' << n << '\n';
  return out.str();
}

std::string ScalingHistogram::size_csv() const {
  std::ostringstream out;
  out << "bucket_start,bucket_end,count\n";
  for (const auto& [b, n] : by_size) out << b << ',' << b + kSizeBucket << ',' << n << '\n';
  return out.str();
}

json ScalingHistogram::to_json() const {
  json steps = json::object(), sizes = json::object();
  for (const auto& [s, n] : by_steps) steps[std::to_string(s)] = n;
  for (const auto& [b, n] : by_size) sizes[std::to_string(b)] = n;
  return {{"bySteps", steps}, {"bySize", sizes}, {"maxed", maxed}, {"total", total}, {"bucketWidth", kSizeBucket}};
}

ScalingHistogram scaling_histogram(const std::vector<ScalingTrace>& traces) {
  if (traces.empty()) throw Error("scaling_histogram: no traces");
  ScalingHistogram h;
  h.total = static_cast<int>(traces.size());
  for (const auto& t : traces) {
    if (t.failure_kind == FailureKind::none) {
      ++h.maxed;
      continue;
    }
    ++h.by_steps[t.steps_completed];
    ++h.by_size[t.engine_size_at_failure / kSizeBucket * kSizeBucket];
  }
  return h;
}

std::string traces_csv(const std::vector<ScalingTrace>& traces) {
  std::ostringstream out;
  out << "run_id,steps_completed,engine_size_at_failure,failure_kind\n";
  for (const auto& t : traces) {
    out << t.run_id << ',' << t.steps_completed << ',' << t.engine_size_at_failure << ',' << to_string(t.failure_kind)
        << '\n';
  }
  return out.str();
}

}  // namespace delta::eval
