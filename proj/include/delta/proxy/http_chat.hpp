#pragma once

#include <string>

#include "delta/proxy/neural_proxy.hpp"
#include "json.hpp"

namespace delta::proxy {

// Connection settings for a chat-completion endpoint. The API key itself is
// never stored: `api_key_env` names the environment variable holding it.
struct ProxyConfig {
  std::string endpoint_url = "http://127.0.0.1:8000/v1/chat/completions";
  std::string api_key_env = "DELTA_PROXY_KEY";
  std::string model = "default";
  double timeout_seconds = 60.0;
  int retry_count = 2;
  double temperature = 0.2;  // generation temperature; entry selection always uses 0
  int backoff_initial_ms = 500;

  // Throws delta::Error: retry_count must lie in [0, 5], timeout > 0,
  // temperature in [0, 2].
  void check() const;

  // Defaults overridden by DELTA_PROXY_URL and DELTA_PROXY_MODEL.
  static ProxyConfig from_env();
  static ProxyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Sends one PromptBundle as
//   POST {model, messages: [{role, content}...], temperature, max_tokens}
// and returns choices[0].message.content. Transport errors, timeouts and 5xx
// answers are retried with exponential backoff; 4xx answers are not.
class ChatClient : public TextGenerator {
 public:
  explicit ChatClient(ProxyConfig config);

  std::string complete(const PromptBundle& prompt) override;

  const ProxyConfig& config() const { return config_; }

 private:
  std::string attempt(const PromptBundle& prompt);

  ProxyConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// NeuralProxy over a chat-completion endpoint.
class HttpChatProxy : public NeuralProxy, public TextGenerator {
 public:
  explicit HttpChatProxy(ProxyConfig config);

  std::vector<std::string> select_entries(const core::Skeleton& skeleton, const core::Instruction& x) override;
  std::string generate_delta(const core::RetrievedContext& context, const core::Instruction& x) override;
  std::string complete(const PromptBundle& prompt) override;

 private:
  ChatClient client_;
};

}  // namespace delta::proxy
