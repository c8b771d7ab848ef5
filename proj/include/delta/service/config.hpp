#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "delta/proxy/http_chat.hpp"
#include "delta/proxy/neural_proxy.hpp"
#include "json.hpp"

namespace delta::service {

// {"listen": "127.0.0.1:8080", "data_dir": "...", "proxy": {...ProxyConfig},
//  "proxy_kind": "http" | "scripted", "scripted_proxy": {...},
//  "max_concurrent_battles": 4, "cors_allow_origins": [...],
//  "evolve_queueing": true, "interactive_timeout_seconds": 60}
struct ServiceConfig {
  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path data_dir = "delta-data";
  proxy::ProxyConfig proxy;
  std::string proxy_kind = "http";
  nlohmann::json scripted_proxy = nullptr;
  int max_concurrent_battles = 4;
  std::vector<std::string> cors_allow_origins;
  // When false a second evolve on a busy role answers 409 instead of waiting.
  bool evolve_queueing = true;
  double interactive_timeout_seconds = 60.0;

  std::string host() const;
  int port() const;

  // Throws delta::Error.
  void check() const;

  static ServiceConfig from_json(const nlohmann::json& j);
  // File (when given) then DELTA_DATA_DIR / DELTA_LISTEN / DELTA_PROXY_URL /
  // DELTA_PROXY_MODEL overrides.
  static ServiceConfig load(const std::filesystem::path& file = {});
  nlohmann::json to_json() const;

  std::unique_ptr<proxy::NeuralProxy> make_proxy() const;
};

}  // namespace delta::service
