#include "delta/service/battles.hpp"

#include "delta/error.hpp"

namespace delta::service {

using nlohmann::json;
using battle::SideId;

PolicySpec PolicySpec::from_json(const json& j) {
  PolicySpec p;
  if (j.is_null()) return p;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "random") return p;
    if (s == "interactive") {
      p.kind = Kind::interactive;
      return p;
    }
    throw Error("unknown policy '" + s + "'");
  }
  if (j.is_array() && !j.empty()) {
    p.kind = Kind::scripted;
    for (const auto& m : j) {
      if (!m.is_number_integer()) throw Error("scripted policy moves must be integers");
      p.moves.push_back(m.get<int>());
    }
    return p;
  }
  throw Error("policy must be \"random\", \"interactive\" or a non-empty move list");
}

json PolicySpec::to_json() const {
  switch (kind) {
    case Kind::random: return "random";
    case Kind::interactive: return "interactive";
    case Kind::scripted: return moves;
  }
  return nullptr;
}

struct BattleManager::Session {
  std::string id;
  BattleRequest request;
  std::optional<battle::BattleState> state;

  mutable std::mutex mu;
  std::condition_variable cv;
  std::string status = "queued";  // queued running finished aborted
  std::vector<std::string> lines;
  int turn = 0;
  battle::Outcome outcome = battle::Outcome::ongoing;
  std::optional<battle::RuntimeError> error;
  std::array<bool, 2> awaiting{false, false};
  std::array<std::optional<int>, 2> pending;
  std::array<int, 2> timeouts{0, 0};
  std::array<std::vector<int>, 2> slots;  // fixed for the whole battle

  bool done() const { return status == "finished" || status == "aborted"; }
};

BattleManager::BattleManager(int max_concurrent, std::chrono::milliseconds interactive_timeout)
    : interactive_timeout_(interactive_timeout) {
  if (max_concurrent < 1) throw Error("max_concurrent_battles must be at least 1");
  for (int i = 0; i < max_concurrent; ++i) workers_.emplace_back([this] { worker(); });
}

BattleManager::~BattleManager() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    for (auto& [id, s] : sessions_) all.push_back(s);
  }
  queue_cv_.notify_all();
  for (auto& s : all) s->cv.notify_all();
  for (auto& t : workers_) t.join();
}

std::string BattleManager::start(BattleRequest request) {
  auto s = std::make_shared<Session>();
  s->state.emplace(battle::make_battle_role(request.a), battle::make_battle_role(request.b), request.seed);
  for (const auto* p : {&request.policy_a, &request.policy_b}) {
    for (int m : p->moves) {
      const auto& side = s->state->side(p == &request.policy_a ? SideId::A : SideId::B);
      const auto slots = battle::move_indices(side);
      if (std::find(slots.begin(), slots.end(), m) == slots.end()) {
        throw Error("scripted move " + std::to_string(m) + " is not a move slot of " + side.name);
      }
    }
  }
  s->slots = {battle::move_indices(s->state->side(SideId::A)), battle::move_indices(s->state->side(SideId::B))};
  s->request = std::move(request);
  {
    std::lock_guard lock(mu_);
    s->id = "b" + std::to_string(next_id_++);
    sessions_.emplace(s->id, s);
    queue_.push_back(s);
  }
  queue_cv_.notify_one();
  return s->id;
}

std::shared_ptr<BattleManager::Session> BattleManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void BattleManager::worker() {
  for (;;) {
    std::shared_ptr<Session> s;
    {
      std::unique_lock lock(mu_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      s = queue_.front();
      queue_.pop_front();
    }
    run(*s);
  }
}

void BattleManager::run(Session& s) {
  auto& b = *s.state;
  std::size_t published = 0;
  auto publish = [&](std::unique_lock<std::mutex>&) {
    for (; published < b.log.size(); ++published) s.lines.push_back(b.log[published].to_line());
    s.turn = b.turn;
    s.outcome = b.outcome;
    s.error = b.error;
  };
  {
    std::unique_lock lock(s.mu);
    s.status = "running";
  }
  s.cv.notify_all();

  battle::RandomPolicy random;
  std::array<std::unique_ptr<battle::ScriptedPolicy>, 2> scripted;
  const std::array<const PolicySpec*, 2> specs{&s.request.policy_a, &s.request.policy_b};
  for (int i = 0; i < 2; ++i) {
    if (specs[i]->kind == PolicySpec::Kind::scripted) scripted[i] = std::make_unique<battle::ScriptedPolicy>(specs[i]->moves);
  }

  auto choose = [&](SideId side) -> std::optional<int> {
    const int i = battle::index(side);
    switch (specs[i]->kind) {
      case PolicySpec::Kind::random: return random.choose(b, side);
      case PolicySpec::Kind::scripted: return scripted[i]->choose(b, side);
      case PolicySpec::Kind::interactive: break;
    }
    std::unique_lock lock(s.mu);
    s.awaiting[i] = true;
    s.cv.notify_all();
    const bool got = s.cv.wait_for(lock, interactive_timeout_, [&] {
      std::lock_guard g(mu_);
      return stopping_ || s.pending[i].has_value();
    });
    s.awaiting[i] = false;
    {
      std::lock_guard g(mu_);
      if (stopping_) return std::nullopt;
    }
    if (got) {
      const int m = *s.pending[i];
      s.pending[i].reset();
      return m;
    }
    ++s.timeouts[i];
    lock.unlock();
    return random.choose(b, side);
  };

  while (!b.over() && b.turn <= s.request.max_turns) {
    const auto ma = choose(SideId::A);
    const auto mb = ma ? choose(SideId::B) : std::nullopt;
    if (!ma || !mb) {
      std::unique_lock lock(s.mu);
      publish(lock);
      s.status = "aborted";
      s.cv.notify_all();
      return;
    }
    battle::step(b, *ma, *mb);
    std::unique_lock lock(s.mu);
    publish(lock);
    s.cv.notify_all();
  }
  std::unique_lock lock(s.mu);
  publish(lock);
  if (!b.over()) s.outcome = battle::Outcome::draw;
  s.turn = std::min(b.turn, s.request.max_turns);
  s.status = "finished";
  s.cv.notify_all();
}

std::optional<json> BattleManager::status(const std::string& id) const {
  auto s = find(id);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mu);
  json awaiting = json::array();
  if (s->awaiting[0]) awaiting.push_back("A");
  if (s->awaiting[1]) awaiting.push_back("B");
  json j = {{"battleId", s->id},
            {"status", s->status},
            {"roleA", s->request.label_a},
            {"roleB", s->request.label_b},
            {"seed", s->request.seed},
            {"policyA", s->request.policy_a.to_json()},
            {"policyB", s->request.policy_b.to_json()},
            {"turn", s->turn},
            {"outcome", s->outcome == battle::Outcome::ongoing ? json(nullptr) : json(battle::to_string(s->outcome))},
            {"eventCount", s->lines.size()},
            {"awaiting", awaiting},
            {"interactiveTimeouts", {{"A", s->timeouts[0]}, {"B", s->timeouts[1]}}}};
  j["error"] = s->error ? s->error->to_json() : json(nullptr);
  return j;
}

std::optional<std::vector<std::string>> BattleManager::events(const std::string& id, std::size_t from,
                                                              std::chrono::milliseconds wait, bool& finished) {
  auto s = find(id);
  if (!s) return std::nullopt;
  std::unique_lock lock(s->mu);
  s->cv.wait_for(lock, wait, [&] { return s->done() || s->lines.size() > from; });
  finished = s->done();
  if (from >= s->lines.size()) return std::vector<std::string>{};
  return std::vector<std::string>(s->lines.begin() + static_cast<std::ptrdiff_t>(from), s->lines.end());
}

ActionResult BattleManager::submit(const std::string& id, SideId side, int move) {
  auto s = find(id);
  if (!s) return ActionResult::not_found;
  const int i = battle::index(side);
  const auto& spec = i == 0 ? s->request.policy_a : s->request.policy_b;
  if (spec.kind != PolicySpec::Kind::interactive) return ActionResult::not_interactive;
  std::lock_guard lock(s->mu);
  if (s->done()) return ActionResult::finished;
  const auto& slots = s->slots[i];
  if (std::find(slots.begin(), slots.end(), move) == slots.end()) return ActionResult::invalid_move;
  if (s->pending[i]) return ActionResult::already_submitted;
  s->pending[i] = move;
  s->cv.notify_all();
  return ActionResult::accepted;
}

bool BattleManager::wait_finished(const std::string& id, std::chrono::milliseconds timeout) {
  auto s = find(id);
  if (!s) return false;
  std::unique_lock lock(s->mu);
  return s->cv.wait_for(lock, timeout, [&] { return s->done(); });
}

}  // namespace delta::service
