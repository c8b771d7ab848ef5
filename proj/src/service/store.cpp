#include "delta/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"

namespace delta::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string genesis_hash(const dsl::RoleAst& initial) { return sha256_hex("genesis\n" + dsl::print(initial)); }

std::string chain_hash(const std::string& prev, const std::string& delta_source, const std::string& code_after) {
  return sha256_hex(prev + "\n" + delta_source + "\n" + code_after);
}

json RoleEvent::to_json() const {
  return {{"seq", seq},
          {"timestamp", timestamp},
          {"instruction", instruction},
          {"author", core::to_string(author)},
          {"deltaSource", delta_source},
          {"selected", selected},
          {"prevHash", prev_hash},
          {"resultingCodeHash", hash}};
}

RoleEvent RoleEvent::from_json(const json& j) {
  RoleEvent e;
  e.seq = j.at("seq").get<std::size_t>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.instruction = j.at("instruction").get<std::string>();
  e.author = core::parse_author(j.at("author").get<std::string>());
  e.delta_source = j.at("deltaSource").get<std::string>();
  e.selected = j.value("selected", std::vector<std::string>{});
  e.prev_hash = j.at("prevHash").get<std::string>();
  e.hash = j.at("resultingCodeHash").get<std::string>();
  return e;
}

std::string RoleRecord::head_hash() const {
  return events.empty() ? genesis_hash(state.initial_role()) : events.back().hash;
}

namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::string new_role_id() {
  static std::mutex mu;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[24];
  std::snprintf(buf, sizeof buf, "r%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

void write_all(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write failed: " + path.string());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

// Write-then-rename with fsync.
void write_file_atomic(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot create " + tmp.string());
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
  fsync_dir(path.parent_path());
}

void append_line_durable(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open " + path.string());
  try {
    write_all(fd, line + "\n", path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw Error("fsync failed: " + path.string());
  }
  ::close(fd);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void crash_point(const char* point) {
  if (const char* v = std::getenv("DELTA_CRASH_POINT"); v && std::string_view(v) == point) std::_Exit(86);
}

RoleRecord RoleStore::load_record(const fs::path& role_dir, std::size_t* torn_tail) {
  RoleRecord r;
  json meta;
  try {
    meta = json::parse(read_file(role_dir / "script.json"));
    r.id = meta.at("id").get<std::string>();
    r.script = core::RoleScript::from_json(meta.at("script"));
    r.created_at = meta.value("createdAt", "");
  } catch (const json::exception& e) {
    throw Error("script.json: " + std::string(e.what()));
  }
  r.state = core::init_engine(r.script);
  std::string prev = genesis_hash(r.state.initial_role());
  if (meta.value("genesisHash", prev) != prev) throw Error("genesis hash does not match the script");

  std::string log = fs::exists(role_dir / "events.jsonl") ? read_file(role_dir / "events.jsonl") : "";
  const auto last_nl = log.rfind('\n');
  const std::size_t complete = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (torn_tail) *torn_tail = log.size() - complete;
  log.resize(complete);

  std::istringstream in(log);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    RoleEvent e;
    try {
      e = RoleEvent::from_json(json::parse(line));
    } catch (const json::exception& ex) {
      throw Error("event line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (e.seq != r.events.size() + 1) throw Error("event line " + std::to_string(line_no) + ": sequence gap");
    if (e.prev_hash != prev) throw Error("event " + std::to_string(e.seq) + ": broken hash chain");
    r.state = core::merge(dsl::parse_delta(e.delta_source), r.state, {e.instruction, e.author}, e.selected);
    const std::string expect = chain_hash(prev, e.delta_source, dsl::print(r.state.role()));
    if (e.hash != expect) throw Error("event " + std::to_string(e.seq) + ": code hash mismatch");
    prev = e.hash;
    r.events.push_back(std::move(e));
  }
  return r;
}

RoleStore::RoleStore(fs::path data_dir) : dir_(std::move(data_dir)) {
  fs::create_directories(dir_ / "roles");
  for (const auto& entry : fs::directory_iterator(dir_ / "roles")) {
    if (!entry.is_directory()) continue;
    std::size_t torn = 0;
    RoleRecord r = load_record(entry.path(), &torn);
    if (torn) fs::resize_file(entry.path() / "events.jsonl", fs::file_size(entry.path() / "events.jsonl") - torn);
    const std::string code = dsl::print(r.state.role());
    const fs::path snap = entry.path() / "snapshot.dsl";
    if (!fs::exists(snap) || read_file(snap) != code) write_file_atomic(snap, code);
    roles_.emplace(r.id, std::move(r));
  }
}

fs::path RoleStore::role_dir(const std::string& id) const { return dir_ / "roles" / id; }

RoleRecord RoleStore::create(const core::RoleScript& script) {
  RoleRecord r{new_role_id(), script, now_utc(), core::init_engine(script), {}};
  const fs::path d = role_dir(r.id);
  fs::create_directories(d);
  write_file_atomic(d / "events.jsonl", "");
  write_file_atomic(d / "snapshot.dsl", dsl::print(r.state.role()));
  const json meta = {{"id", r.id},
                     {"script", script.to_json()},
                     {"createdAt", r.created_at},
                     {"genesisHash", genesis_hash(r.state.initial_role())}};
  // script.json last: a directory without it is an unfinished create.
  write_file_atomic(d / "script.json", meta.dump(2) + "\n");
  fsync_dir(dir_ / "roles");
  std::lock_guard lock(mu_);
  roles_.emplace(r.id, r);
  return r;
}

std::optional<RoleRecord> RoleStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = roles_.find(id);
  if (it == roles_.end()) return std::nullopt;
  return it->second;
}

std::vector<RoleRecord> RoleStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<RoleRecord> out;
  for (const auto& [id, r] : roles_) out.push_back(r);
  return out;
}

std::shared_ptr<std::timed_mutex> RoleStore::role_lock(const std::string& id) {
  std::lock_guard lock(mu_);
  auto& l = locks_[id];
  if (!l) l = std::make_shared<std::timed_mutex>();
  return l;
}

RoleRecord RoleStore::append(const std::string& id, std::size_t expected_step, const core::EngineState& next,
                             const core::Instruction& instruction) {
  RoleRecord r;
  {
    std::lock_guard lock(mu_);
    auto it = roles_.find(id);
    if (it == roles_.end()) throw Error("unknown role " + id);
    r = it->second;
  }
  if (r.state.step() != expected_step || next.step() != expected_step + 1) {
    throw Error("role " + id + " moved on during evolution");
  }
  const auto& h = next.history().back();
  RoleEvent e;
  e.seq = next.step();
  e.timestamp = now_utc();
  e.instruction = instruction.text;
  e.author = instruction.author;
  e.delta_source = dsl::print(h.delta);
  e.selected = h.selected;
  e.prev_hash = r.head_hash();
  const std::string code = dsl::print(next.role());
  e.hash = chain_hash(e.prev_hash, e.delta_source, code);

  const fs::path d = role_dir(id);
  append_line_durable(d / "events.jsonl", e.to_json().dump());
  crash_point("after_event");
  write_file_atomic(d / "snapshot.dsl", code);

  r.state = next;
  r.events.push_back(std::move(e));
  std::lock_guard lock(mu_);
  roles_[id] = r;
  return r;
}

bool FsckReport::ok() const {
  for (const auto& i : issues) {
    if (i.error) return false;
  }
  return true;
}

json FsckReport::to_json() const {
  json list = json::array();
  for (const auto& i : issues) {
    list.push_back({{"role", i.role}, {"severity", i.error ? "error" : "warning"}, {"message", i.message}});
  }
  return {{"ok", ok()}, {"rolesChecked", roles_checked}, {"issues", list}};
}

FsckReport fsck(const fs::path& data_dir) {
  FsckReport report;
  const fs::path roles = data_dir / "roles";
  if (!fs::is_directory(roles)) {
    report.issues.push_back({"", true, "no roles directory under " + data_dir.string()});
    return report;
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(roles)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    const std::string name = d.filename().string();
    ++report.roles_checked;
    if (!fs::exists(d / "script.json")) {
      report.issues.push_back({name, false, "unfinished create (no script.json)"});
      continue;
    }
    try {
      std::size_t torn = 0;
      RoleRecord r = RoleStore::load_record(d, &torn);
      if (r.id != name) report.issues.push_back({name, true, "directory name differs from role id " + r.id});
      if (torn) {
        report.issues.push_back({name, false, "interrupted final event write (" + std::to_string(torn) + " bytes)"});
      }
      const std::string code = dsl::print(r.state.role());
      if (!fs::exists(d / "snapshot.dsl")) {
        report.issues.push_back({name, false, "snapshot missing"});
      } else if (read_file(d / "snapshot.dsl") != code) {
        report.issues.push_back({name, false, "snapshot behind the event log"});
      }
    } catch (const std::exception& e) {
      report.issues.push_back({name, true, e.what()});
    }
  }
  return report;
}

}  // namespace delta::service
