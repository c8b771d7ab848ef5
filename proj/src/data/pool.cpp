#include "delta/data/pool.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "delta/error.hpp"

namespace delta::data {

using nlohmann::json;
namespace fs = std::filesystem;

SamplePool::SamplePool(const SamplePool& o) {
  std::lock_guard lock(o.mu_);
  instances_ = o.instances_;
  pending_ = o.pending_;
  events_ = o.events_;
}

SamplePool& SamplePool::operator=(const SamplePool& o) {
  if (this == &o) return *this;
  std::scoped_lock lock(mu_, o.mu_);
  instances_ = o.instances_;
  pending_ = o.pending_;
  events_ = o.events_;
  return *this;
}

SamplePool SamplePool::from_seeds(const FilterOptions& options) {
  SamplePool pool;
  FilterOptions o = options;
  o.human_checkpoint = false;
  for (const auto& s : seed_roles()) {
    auto r = pool.submit(s, o, true);
    if (r.verdict != FilterVerdict::accept) throw Error("seed " + s.id + " fails the filter: " + r.detail);
  }
  return pool;
}

std::size_t SamplePool::size() const {
  std::lock_guard lock(mu_);
  return instances_.size();
}

std::vector<RoleBundle> SamplePool::instances() const {
  std::lock_guard lock(mu_);
  return instances_;
}

std::vector<std::string> SamplePool::pending_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, b] : pending_) out.push_back(id);
  return out;
}

std::vector<json> SamplePool::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<RoleBundle> SamplePool::sample(std::size_t k, battle::Rng& rng) const {
  std::lock_guard lock(mu_);
  if (instances_.size() < k) {
    throw Error("sample pool holds " + std::to_string(instances_.size()) + " instances, need " + std::to_string(k));
  }
  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(instances_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<RoleBundle> out;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(instances_[idx[i]]);
  }
  return out;
}

bool SamplePool::known(const std::string& id) const {
  return pending_.count(id) ||
         std::any_of(instances_.begin(), instances_.end(), [&](const RoleBundle& b) { return b.id == id; });
}

void SamplePool::append(json event) {
  event["seq"] = events_.size();
  events_.push_back(std::move(event));
}

FilterResult SamplePool::submit(const RoleBundle& bundle, const FilterOptions& options, bool seed) {
  FilterResult r = filter_instance(bundle.script, bundle.state, options);
  std::lock_guard lock(mu_);
  if (known(bundle.id)) throw Error("sample pool: duplicate id " + bundle.id);
  json ev = {{"id", bundle.id}, {"filter", r.to_json()}, {"threshold", options.threshold}};
  switch (r.verdict) {
    case FilterVerdict::accept:
      ev["kind"] = seed ? "seed" : "admit";
      ev["bundle"] = bundle.to_json();
      instances_.push_back(bundle);
      break;
    case FilterVerdict::pending:
      ev["kind"] = "pending";
      ev["bundle"] = bundle.to_json();
      pending_.emplace(bundle.id, bundle);
      break;
    case FilterVerdict::reject:
      ev["kind"] = "reject";
      ev["reason"] = to_string(r.reason);
      break;
  }
  append(std::move(ev));
  return r;
}

void SamplePool::record_rejection(const std::string& id, RejectReason reason, const std::string& detail) {
  std::lock_guard lock(mu_);
  append({{"kind", "reject"}, {"id", id}, {"reason", to_string(reason)}, {"detail", detail}});
}

void SamplePool::approve(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = pending_.find(id);
  if (it == pending_.end()) throw Error("sample pool: nothing pending under id " + id);
  instances_.push_back(std::move(it->second));
  pending_.erase(it);
  append({{"kind", "approve"}, {"id", id}});
}

void SamplePool::decline(const std::string& id, const std::string& note) {
  std::lock_guard lock(mu_);
  auto it = pending_.find(id);
  if (it == pending_.end()) throw Error("sample pool: nothing pending under id " + id);
  pending_.erase(it);
  append({{"kind", "reject"}, {"id", id}, {"reason", "human"}, {"detail", note}});
}

SamplePool SamplePool::replay(const std::vector<json>& events) {
  SamplePool pool;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const json& ev = events[i];
    try {
      if (ev.at("seq").get<std::size_t>() != i) throw Error("out-of-order event");
      const std::string kind = ev.at("kind").get<std::string>();
      const std::string id = ev.at("id").get<std::string>();
      if (kind == "seed" || kind == "admit" || kind == "pending") {
        RoleBundle b = RoleBundle::from_json(ev.at("bundle"));
        if (b.id != id) throw Error("bundle id differs from event id");
        if (pool.known(id)) throw Error("duplicate id");
        FilterOptions o{ev.value("threshold", std::size_t{2}), false};
        auto r = filter_instance(b.script, b.state, o);
        if (r.verdict != FilterVerdict::accept) throw Error("admitted instance fails the filter: " + r.detail);
        if (kind == "pending") {
          pool.pending_.emplace(id, std::move(b));
        } else {
          pool.instances_.push_back(std::move(b));
        }
      } else if (kind == "approve") {
        auto it = pool.pending_.find(id);
        if (it == pool.pending_.end()) throw Error("approval of an unknown instance");
        pool.instances_.push_back(std::move(it->second));
        pool.pending_.erase(it);
      } else if (kind == "reject") {
        pool.pending_.erase(id);
      } else {
        throw Error("unknown event kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error("pool event " + std::to_string(i) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("pool event " + std::to_string(i) + ": " + e.what());
    }
    pool.events_.push_back(ev);
  }
  return pool;
}

void SamplePool::save(const fs::path& dir) const {
  fs::create_directories(dir);
  const fs::path tmp = dir / "events.jsonl.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto& ev : events()) out << ev.dump() << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / "events.jsonl");
}

SamplePool SamplePool::load(const fs::path& dir) {
  std::ifstream in(dir / "events.jsonl", std::ios::binary);
  if (!in) throw Error("no pool event log in " + dir.string());
  std::vector<json> events;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      events.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error("pool event log line " + std::to_string(events.size() + 1) + ": " + e.what());
    }
  }
  return replay(events);
}

}  // namespace delta::data
