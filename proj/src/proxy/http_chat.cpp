#include "delta/proxy/http_chat.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "delta/error.hpp"
#include "delta/proxy/prompts.hpp"
#include "httplib.h"

namespace delta::proxy {

using nlohmann::json;

void ProxyConfig::check() const {
  if (retry_count < 0 || retry_count > 5) throw Error("proxy config: retry_count must lie in [0, 5]");
  if (!(timeout_seconds > 0)) throw Error("proxy config: timeout must be positive");
  if (temperature < 0 || temperature > 2) throw Error("proxy config: temperature must lie in [0, 2]");
  if (endpoint_url.rfind("http://", 0) != 0 && endpoint_url.rfind("https://", 0) != 0) {
    throw Error("proxy config: endpoint must be an http(s) URL");
  }
}

ProxyConfig ProxyConfig::from_env() {
  ProxyConfig c;
  if (const char* url = std::getenv("DELTA_PROXY_URL")) c.endpoint_url = url;
  if (const char* model = std::getenv("DELTA_PROXY_MODEL")) c.model = model;
  return c;
}

ProxyConfig ProxyConfig::from_json(const json& j) {
  ProxyConfig c;
  c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.model = j.value("model", c.model);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.retry_count = j.value("retry_count", c.retry_count);
  c.temperature = j.value("temperature", c.temperature);
  c.backoff_initial_ms = j.value("backoff_initial_ms", c.backoff_initial_ms);
  return c;
}

json ProxyConfig::to_json() const {
  return {{"endpoint_url", endpoint_url}, {"api_key_env", api_key_env},     {"model", model},
          {"timeout_seconds", timeout_seconds}, {"retry_count", retry_count}, {"temperature", temperature},
          {"backoff_initial_ms", backoff_initial_ms}};
}

ChatClient::ChatClient(ProxyConfig config) : config_(std::move(config)) {
  config_.check();
  const std::size_t scheme_end = config_.endpoint_url.find("://") + 3;
  const std::size_t path_start = config_.endpoint_url.find('/', scheme_end);
  scheme_host_port_ = config_.endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint_url.substr(path_start);
}

std::string ChatClient::attempt(const PromptBundle& prompt) {
  httplib::Client cli(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json messages = json::array();
  if (!prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system}});
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  const json body = {{"model", config_.model},
                     {"messages", messages},
                     {"temperature", prompt.temperature},
                     {"max_tokens", prompt.max_tokens}};

  const auto started = std::chrono::steady_clock::now();
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= timeout * 0.9);
    if (timed_out) throw ProxyError(ProxyError::Kind::timeout, "proxy request timed out");
    throw ProxyError(ProxyError::Kind::transport, "proxy transport error: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProxyError(ProxyError::Kind::bad_status, "proxy answered HTTP " + std::to_string(res->status),
                     res->status);
  }
  try {
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProxyError(ProxyError::Kind::bad_status, "proxy answered with a malformed completion", res->status);
  }
}

std::string ChatClient::complete(const PromptBundle& prompt) {
  auto delay = std::chrono::milliseconds(config_.backoff_initial_ms);
  for (int tries = 0;; ++tries) {
    try {
      return attempt(prompt);
    } catch (const ProxyError& e) {
      const bool retryable = e.kind() != ProxyError::Kind::bad_status || e.status() >= 500;
      if (!retryable || tries >= config_.retry_count) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

HttpChatProxy::HttpChatProxy(ProxyConfig config) : client_(std::move(config)) {}

std::vector<std::string> HttpChatProxy::select_entries(const core::Skeleton& skeleton, const core::Instruction& x) {
  return parse_entry_names(client_.complete(build_entry_prompt(skeleton, x)));
}

std::string HttpChatProxy::generate_delta(const core::RetrievedContext& context, const core::Instruction& x) {
  PromptBundle p = build_delta_prompt(context, x);
  p.temperature = client_.config().temperature;
  return client_.complete(p);
}

std::string HttpChatProxy::complete(const PromptBundle& prompt) { return client_.complete(prompt); }

}  // namespace delta::proxy
