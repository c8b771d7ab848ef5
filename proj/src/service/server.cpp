#include "delta/service/server.hpp"

#include <cstdio>
#include <iostream>

#include "delta/core/evolve.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/data/interest.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"
#include "delta/eval/opponents.hpp"
#include "httplib.h"

namespace delta::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  send(res, status, extra);
}

std::optional<json> body_json(const httplib::Request& req, httplib::Response& res) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) {
      fail(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const json::exception&) {
    fail(res, 400, "request body is not valid JSON");
    return std::nullopt;
  }
}

const char* stage_name(NonExecutableDelta::Stage s) {
  switch (s) {
    case NonExecutableDelta::Stage::extract: return "extract";
    case NonExecutableDelta::Stage::parse: return "parse";
    case NonExecutableDelta::Stage::validate: return "validate";
  }
  return "?";
}

json diagnostics_json(const std::vector<dsl::Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) {
    out.push_back({{"code", dsl::to_string(d.code)},
                   {"message", d.message},
                   {"line", d.span.line},
                   {"column", d.span.column}});
  }
  return out;
}

json summary_json(const RoleRecord& r) {
  return {{"roleId", r.id},
          {"name", r.state.role().name},
          {"species", r.script.species},
          {"step", r.state.step()},
          {"createdAt", r.created_at},
          {"headHash", r.head_hash()}};
}

}  // namespace

json role_json(const RoleRecord& r) {
  json j = summary_json(r);
  j["script"] = r.script.to_json();
  j["code"] = dsl::print(r.state.role());
  j["fullCode"] = core::print_state(r.state);
  const auto sk = core::skeleton(r.state);
  json entries = json::array();
  for (const auto& e : sk.entries) entries.push_back({{"name", e.name}, {"params", e.params}});
  j["skeleton"] = {{"roleName", sk.role_name}, {"fields", sk.fields}, {"entries", entries}};
  j["toi"] = data::tag_interest(r.state).to_json();
  json history = json::array();
  for (const auto& e : r.events) history.push_back(e.to_json());
  j["history"] = history;
  return j;
}

Server::Server(ServiceConfig config, std::unique_ptr<proxy::NeuralProxy> proxy)
    : config_((config.check(), std::move(config))),
      proxy_(proxy ? std::move(proxy) : config_.make_proxy()),
      store_(config_.data_dir),
      battles_(config_.max_concurrent_battles,
               std::chrono::milliseconds(static_cast<long>(config_.interactive_timeout_seconds * 1000))),
      http_(std::make_unique<httplib::Server>()) {
  http_->new_task_queue = [] { return new httplib::ThreadPool(16); };
  http_->set_logger([](const httplib::Request& req, const httplib::Response& res) {
    std::fprintf(stderr, "%s %s -> %d\n", req.method.c_str(), req.path.c_str(), res.status);
  });
  routes();
}

Server::~Server() { stop(); }

int Server::bind() {
  const std::string host = config_.host();
  int port = config_.port();
  if (port == 0) {
    port = http_->bind_to_any_port(host);
    if (port < 0) throw Error("cannot bind " + host);
  } else if (!http_->bind_to_port(host, port)) {
    throw Error("cannot bind " + config_.listen_address);
  }
  bound_ = true;
  return port;
}

void Server::run() {
  if (!bound_) bind();
  http_->listen_after_bind();
}

void Server::stop() {
  if (http_) http_->stop();
}

void Server::wait_ready() const { http_->wait_until_ready(); }

void Server::routes() {
  auto& h = *http_;

  h.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    for (const auto& allowed : config_.cors_allow_origins) {
      if (allowed == "*" || allowed == origin) {
        res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        break;
      }
    }
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  h.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    } catch (...) {
      fail(res, 500, "internal error");
    }
  });

  h.Get("/api/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"status", "ok"}}); });

  h.Get("/api/roles", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& r : store_.list()) out.push_back(summary_json(r));
    send(res, 200, out);
  });

  h.Post("/api/roles", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = body_json(req, res);
    if (!body) return;
    const json& script = body->contains("script") ? body->at("script") : *body;
    try {
      send(res, 201, role_json(store_.create(core::RoleScript::from_json(script))));
    } catch (const ScriptError& e) {
      fail(res, 400, e.what());
    }
  });

  h.Get(R"(/api/roles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto r = store_.get(req.matches[1]);
    if (!r) return fail(res, 404, "no role " + std::string(req.matches[1]));
    send(res, 200, role_json(*r));
  });

  h.Post(R"(/api/roles/([^/]+)/evolve)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.get(id)) return fail(res, 404, "no role " + id);
    auto body = body_json(req, res);
    if (!body) return;
    if (!body->contains("instruction") || !(*body)["instruction"].is_string() ||
        (*body)["instruction"].get<std::string>().empty()) {
      return fail(res, 400, "instruction must be a non-empty string");
    }
    const core::Instruction x{(*body)["instruction"].get<std::string>(), core::Author::player};
    core::EvolveOptions opts;
    opts.retrieval = body->value("retrieval", true);

    auto lock = store_.role_lock(id);
    std::unique_lock guard(*lock, std::defer_lock);
    if (config_.evolve_queueing) {
      guard.lock();
    } else if (!guard.try_lock()) {
      return fail(res, 409, "role " + id + " is already evolving");
    }
    const RoleRecord before = *store_.get(id);
    try {
      auto result = core::evolve_step(before.state, x, *proxy_, opts);
      const RoleRecord after = store_.append(id, before.state.step(), result.state, x);
      send(res, 200,
           {{"roleId", id},
            {"step", after.state.step()},
            {"delta", result.delta_source},
            {"newCode", dsl::print(after.state.role())},
            {"selected", result.selected},
            {"dropped", result.dropped},
            {"event", after.events.back().to_json()}});
    } catch (const NonExecutableDelta& e) {
      fail(res, 422, e.what(), {{"stage", stage_name(e.stage())}, {"rawResponse", e.raw_response()}});
    } catch (const UnknownEntry& e) {
      fail(res, 422, e.what(), {{"stage", "select"}, {"unknown", e.names()}});
    } catch (const DiagnosticError& e) {
      fail(res, 422, e.what(), {{"stage", "validate"}, {"diagnostics", diagnostics_json(e.diagnostics())}});
    } catch (const TargetMismatch& e) {
      fail(res, 422, e.what(), {{"stage", "validate"}});
    } catch (const EmptyResponse& e) {
      fail(res, 502, e.what(), {{"kind", "empty"}});
    } catch (const ProxyError& e) {
      const char* kind = e.kind() == ProxyError::Kind::timeout     ? "timeout"
                         : e.kind() == ProxyError::Kind::transport ? "transport"
                                                                   : "bad_status";
      fail(res, 502, e.what(), {{"kind", kind}});
    }
  });

  h.Post("/api/battles", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = body_json(req, res);
    if (!body) return;
    try {
      BattleRequest br;
      auto load_role = [&](const std::string& key, core::EngineState& state, std::string& label) -> bool {
        const auto id = body->value(key, std::string{});
        auto r = store_.get(id);
        if (!r) {
          fail(res, id.empty() ? 400 : 404, id.empty() ? key + " is required" : "no role " + id);
          return false;
        }
        state = r->state;
        label = id;
        return true;
      };
      if (!load_role("roleA", br.a, br.label_a)) return;
      if (body->contains("roleB")) {
        if (!load_role("roleB", br.b, br.label_b)) return;
      } else {
        const auto opp = body->value("opponentSeed", std::uint64_t{0});
        br.b = eval::synth_opponent(opp);
        br.label_b = "opponent:" + std::to_string(opp);
      }
      br.seed = body->value("seed", std::uint64_t{0});
      br.policy_a = PolicySpec::from_json(body->value("policyA", json("random")));
      br.policy_b = PolicySpec::from_json(body->value("policyB", json("random")));
      br.max_turns = body->value("maxTurns", battle::kMaxTurns);
      if (br.max_turns < 1 || br.max_turns > 1000) return fail(res, 400, "maxTurns must lie in [1, 1000]");
      const auto id = battles_.start(std::move(br));
      send(res, 202, *battles_.status(id));
    } catch (const json::exception& e) {
      fail(res, 400, e.what());
    } catch (const Error& e) {
      fail(res, 400, e.what());
    }
  });

  h.Get(R"(/api/battles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto s = battles_.status(req.matches[1]);
    if (!s) return fail(res, 404, "no battle " + std::string(req.matches[1]));
    send(res, 200, *s);
  });

  h.Get(R"(/api/battles/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!battles_.status(id)) return fail(res, 404, "no battle " + id);
    std::size_t from = 0;
    try {
      if (req.has_param("from")) from = std::stoul(req.get_param_value("from"));
    } catch (const std::exception&) {
      return fail(res, 400, "from must be a non-negative integer");
    }
    const bool follow = req.get_param_value("follow") == "1";
    auto next = std::make_shared<std::size_t>(from);
    res.set_chunked_content_provider(
        "application/x-ndjson", [this, id, follow, next](std::size_t, httplib::DataSink& sink) {
          bool finished = false;
          auto lines = battles_.events(id, *next, std::chrono::milliseconds(follow ? 500 : 0), finished);
          if (!lines) {
            sink.done();
            return true;
          }
          for (const auto& l : *lines) {
            const std::string chunk = l + "\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
          }
          *next += lines->size();
          if (!follow || (finished && lines->empty())) sink.done();
          return true;
        });
  });

  h.Post(R"(/api/battles/([^/]+)/actions)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = body_json(req, res);
    if (!body) return;
    const auto side = body->value("side", std::string{});
    if (side != "A" && side != "B") return fail(res, 400, "side must be \"A\" or \"B\"");
    if (!body->contains("move") || !(*body)["move"].is_number_integer()) {
      return fail(res, 400, "move must be an integer move index");
    }
    switch (battles_.submit(id, side == "A" ? battle::SideId::A : battle::SideId::B, (*body)["move"].get<int>())) {
      case ActionResult::accepted: return send(res, 202, {{"accepted", true}});
      case ActionResult::not_found: return fail(res, 404, "no battle " + id);
      case ActionResult::not_interactive: return fail(res, 409, "side " + side + " is not interactive");
      case ActionResult::already_submitted:
        return fail(res, 409, "side " + side + " already submitted a move this turn");
      case ActionResult::invalid_move: return fail(res, 400, "not a move slot of side " + side);
      case ActionResult::finished: return fail(res, 409, "battle is over");
    }
  });
}

}  // namespace delta::service
