#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "delta/core/engine.hpp"
#include "json.hpp"

namespace delta::service {

std::string sha256_hex(std::string_view data);

// Chain: h0 = sha256("genesis\n" + initial code),
//        ht = sha256(h(t-1) + "\n" + delta source + "\n" + code after t).
std::string genesis_hash(const dsl::RoleAst& initial);
std::string chain_hash(const std::string& prev, const std::string& delta_source, const std::string& code_after);

struct RoleEvent {
  std::size_t seq = 0;  // 1-based step number
  std::string timestamp;
  std::string instruction;
  core::Author author = core::Author::player;
  std::string delta_source;
  std::vector<std::string> selected;
  std::string prev_hash;
  std::string hash;  // of the resulting code

  nlohmann::json to_json() const;
  static RoleEvent from_json(const nlohmann::json& j);
};

struct RoleRecord {
  std::string id;
  core::RoleScript script;
  std::string created_at;
  core::EngineState state{dsl::RoleAst{}};
  std::vector<RoleEvent> events;

  std::string head_hash() const;
};

// Per-role directory DATA/roles/<id>/ holding
//   script.json   {"id", "script", "createdAt", "genesisHash"}
//   events.jsonl  one RoleEvent per line, append-only, fsync'd per event
//   snapshot.dsl  printed current code; a cache, rewritten after each event
// The event log is the source of truth: loading replays it from the script.
class RoleStore {
 public:
  explicit RoleStore(std::filesystem::path data_dir);

  RoleRecord create(const core::RoleScript& script);
  std::optional<RoleRecord> get(const std::string& id) const;
  std::vector<RoleRecord> list() const;

  // Persists one evolution step of `id` whose state was `expected_step` long.
  // The event reaches disk (fsync) before this returns. Throws delta::Error
  // when the role moved on meanwhile.
  RoleRecord append(const std::string& id, std::size_t expected_step, const core::EngineState& next,
                    const core::Instruction& instruction);

  // Exclusive lock serializing evolution of one role.
  std::shared_ptr<std::timed_mutex> role_lock(const std::string& id);

  const std::filesystem::path& data_dir() const { return dir_; }

  // Replays and verifies one role directory. A final line without a newline
  // (an interrupted write) is dropped; `torn_tail` reports its size.
  static RoleRecord load_record(const std::filesystem::path& role_dir, std::size_t* torn_tail = nullptr);

 private:
  std::filesystem::path role_dir(const std::string& id) const;

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, RoleRecord> roles_;
  std::map<std::string, std::shared_ptr<std::timed_mutex>> locks_;
};

struct FsckReport {
  struct Issue {
    std::string role;
    bool error = true;  // false: warning
    std::string message;
  };
  std::size_t roles_checked = 0;
  std::vector<Issue> issues;

  bool ok() const;
  nlohmann::json to_json() const;
};

// Read-only check of every role under DATA/roles: script, hash chain, replay,
// and snapshot agreement (a stale snapshot is a warning).
FsckReport fsck(const std::filesystem::path& data_dir);

// Crash-test hook: when DELTA_CRASH_POINT equals `point`, the process exits
// at once without cleanup.
void crash_point(const char* point);

}  // namespace delta::service
