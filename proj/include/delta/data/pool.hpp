#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "delta/battle/rng.hpp"
#include "delta/data/bundle.hpp"
#include "delta/data/filter.hpp"
#include "json.hpp"

namespace delta::data {

// Admitted instances plus a queue awaiting human sign-off. Every change is an
// event; replaying the events rebuilds the same pool. Writers are serialized.
//
// Event kinds: seed, admit, pending, approve, reject (a filter rejection or a
// declined pending instance).
class SamplePool {
 public:
  SamplePool() = default;
  SamplePool(const SamplePool& o);
  SamplePool& operator=(const SamplePool& o);

  // The bundled seed roles, each admitted through the filter.
  static SamplePool from_seeds(const FilterOptions& options = {});

  std::size_t size() const;
  std::vector<RoleBundle> instances() const;
  std::vector<std::string> pending_ids() const;
  std::vector<nlohmann::json> events() const;

  // `k` distinct instances, uniform over the whole pool (seeds included).
  // Throws delta::Error when the pool holds fewer than `k`.
  std::vector<RoleBundle> sample(std::size_t k, battle::Rng& rng) const;

  // Filters and records `bundle`: accept admits it, pending queues it.
  // Throws delta::Error on a duplicate id.
  FilterResult submit(const RoleBundle& bundle, const FilterOptions& options = {}, bool seed = false);
  // Records a rejection that happened before filtering (generation failed).
  void record_rejection(const std::string& id, RejectReason reason, const std::string& detail);

  void approve(const std::string& id);
  void decline(const std::string& id, const std::string& note = {});

  // Throws delta::Error on an inconsistent log (unknown ids, an admitted
  // bundle the filter rejects, a bundle whose code does not rebuild).
  static SamplePool replay(const std::vector<nlohmann::json>& events);

  // DIR/events.jsonl, rewritten atomically.
  void save(const std::filesystem::path& dir) const;
  static SamplePool load(const std::filesystem::path& dir);

 private:
  void append(nlohmann::json event);
  bool known(const std::string& id) const;

  mutable std::mutex mu_;
  std::vector<RoleBundle> instances_;
  std::map<std::string, RoleBundle> pending_;
  std::vector<nlohmann::json> events_;
};

}  // namespace delta::data
