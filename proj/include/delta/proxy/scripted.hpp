#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delta/proxy/neural_proxy.hpp"
#include "json.hpp"

namespace delta::proxy {

// Deterministic stand-in for a model. Rules are matched against the
// instruction text in order: a pattern ending in '*' is a prefix match,
// anything else must match exactly. Rule sources may use `{{role}}`, which
// is replaced by the target role name.
class ScriptedProxy : public NeuralProxy {
 public:
  struct Rule {
    std::string pattern;
    std::vector<std::string> select;
    std::string delta_source;
  };

  enum class Fallback {
    identity,  // re-state the first retrieved method verbatim
    failure,   // answer with text that does not parse
    grow,      // add a new move slot derived from the instruction text
  };

  // Throws std::invalid_argument for no rules under the identity fallback.
  explicit ScriptedProxy(std::vector<Rule> rules, Fallback fallback = Fallback::identity);

  // Answer with unparseable text once the engine has completed this many
  // steps (the context's source step). Purely a function of the input.
  ScriptedProxy& fail_from_step(std::size_t step);

  // {"rules": [{"pattern": "...", "select": [...], "delta": "..."}],
  //  "fallback": "identity" | "failure" | "grow", "fail_from_step": 7}
  static ScriptedProxy from_json(const nlohmann::json& j);

  std::vector<std::string> select_entries(const core::Skeleton& skeleton, const core::Instruction& x) override;
  std::string generate_delta(const core::RetrievedContext& context, const core::Instruction& x) override;

  static constexpr std::string_view kUnparseable = "I am sorry, I cannot write that {{{";

 private:
  const Rule* match(const std::string& text) const;

  std::vector<Rule> rules_;
  Fallback fallback_;
  std::optional<std::size_t> fail_from_step_;
};

}  // namespace delta::proxy
