#include "delta/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "delta/error.hpp"
#include "delta/proxy/scripted.hpp"

namespace delta::service {

using nlohmann::json;

std::string ServiceConfig::host() const {
  const auto colon = listen_address.rfind(':');
  return colon == std::string::npos ? listen_address : listen_address.substr(0, colon);
}

int ServiceConfig::port() const {
  const auto colon = listen_address.rfind(':');
  if (colon == std::string::npos) return 8080;
  try {
    return std::stoi(listen_address.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error("listen address '" + listen_address + "' has no valid port");
  }
}

void ServiceConfig::check() const {
  if (port() < 0 || port() > 65535) throw Error("listen port out of range");
  if (data_dir.empty()) throw Error("data_dir must be set");
  if (max_concurrent_battles < 1) throw Error("max_concurrent_battles must be positive");
  if (!(interactive_timeout_seconds > 0)) throw Error("interactive_timeout_seconds must be positive");
  if (proxy_kind != "http" && proxy_kind != "scripted") throw Error("proxy_kind must be 'http' or 'scripted'");
  if (proxy_kind == "scripted" && !scripted_proxy.is_object()) throw Error("scripted proxy needs 'scripted_proxy'");
  proxy.check();
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  try {
    c.listen_address = j.value("listen", c.listen_address);
    c.data_dir = j.value("data_dir", c.data_dir.string());
    if (j.contains("proxy")) c.proxy = proxy::ProxyConfig::from_json(j.at("proxy"));
    c.proxy_kind = j.value("proxy_kind", c.proxy_kind);
    if (j.contains("scripted_proxy")) c.scripted_proxy = j.at("scripted_proxy");
    c.max_concurrent_battles = j.value("max_concurrent_battles", c.max_concurrent_battles);
    c.cors_allow_origins = j.value("cors_allow_origins", c.cors_allow_origins);
    c.evolve_queueing = j.value("evolve_queueing", c.evolve_queueing);
    c.interactive_timeout_seconds = j.value("interactive_timeout_seconds", c.interactive_timeout_seconds);
  } catch (const json::exception& e) {
    throw Error(std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& file) {
  json j = json::object();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read config " + file.string());
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("config " + file.string() + ": " + e.what());
    }
  }
  ServiceConfig c = from_json(j);
  if (const char* v = std::getenv("DELTA_DATA_DIR"); v && *v) c.data_dir = v;
  if (const char* v = std::getenv("DELTA_LISTEN"); v && *v) c.listen_address = v;
  if (const char* v = std::getenv("DELTA_PROXY_URL"); v && *v) c.proxy.endpoint_url = v;
  if (const char* v = std::getenv("DELTA_PROXY_MODEL"); v && *v) c.proxy.model = v;
  c.check();
  return c;
}

json ServiceConfig::to_json() const {
  return {{"listen", listen_address},
          {"data_dir", data_dir.string()},
          {"proxy", proxy.to_json()},
          {"proxy_kind", proxy_kind},
          {"scripted_proxy", scripted_proxy},
          {"max_concurrent_battles", max_concurrent_battles},
          {"cors_allow_origins", cors_allow_origins},
          {"evolve_queueing", evolve_queueing},
          {"interactive_timeout_seconds", interactive_timeout_seconds}};
}

std::unique_ptr<proxy::NeuralProxy> ServiceConfig::make_proxy() const {
  if (proxy_kind == "scripted") {
    return std::make_unique<proxy::ScriptedProxy>(proxy::ScriptedProxy::from_json(scripted_proxy));
  }
  return std::make_unique<proxy::HttpChatProxy>(proxy);
}

}  // namespace delta::service
