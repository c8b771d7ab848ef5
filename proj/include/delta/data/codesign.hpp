#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "delta/battle/rng.hpp"
#include "delta/data/corpus.hpp"
#include "delta/data/pool.hpp"
#include "delta/proxy/neural_proxy.hpp"
#include "json.hpp"

namespace delta::data {

inline constexpr std::size_t kDesignExamples = 1;
inline constexpr std::size_t kCodeExamples = 5;

inline constexpr std::string_view kDesignTemplate = "design/1";
inline constexpr std::string_view kCodeTemplate = "code/1";

proxy::PromptBundle design_prompt(const Prototype& proto, const RoleBundle& example);
proxy::PromptBundle code_prompt(const core::RoleScript& script, const std::vector<RoleBundle>& examples);

// Script for a new role grounded in `proto`, shown exactly one pool instance.
// An answer that is not a valid script gets one reprompt, then
// GenerationError.
core::RoleScript design_role(const Prototype& proto, const SamplePool& pool, proxy::TextGenerator& generator,
                             battle::Rng& rng, core::Provenance provenance = core::Provenance::codesign);

// Code for `script`, shown five pool instances. The answer is a listing with
// one increment per scripted move beyond the first two and per ability, over
// the rule-based initial role (or a role program given before the first
// increment). Throws GenerationError for an unusable answer and
// ValidationError / TargetMismatch when an increment does not merge.
core::EngineState code_role(const core::RoleScript& script, const SamplePool& pool, proxy::TextGenerator& generator,
                            battle::Rng& rng);

// Offline stand-in for a model on the two prompts above: keyword rules over
// the prototype text produce a script, and over move and ability
// descriptions produce increments. Deterministic.
class TemplateGenerator : public proxy::TextGenerator {
 public:
  std::string complete(const proxy::PromptBundle& prompt) override;

  static core::RoleScript script_for(const std::string& name, const std::string& description);
  static std::string listing_for(const core::RoleScript& script);
};

enum class GenerateMode { codesign, synthetic };
GenerateMode parse_generate_mode(const std::string& s);

struct GenerateOptions {
  std::size_t count = 1;
  GenerateMode mode = GenerateMode::codesign;  // codesign queues for approval
  std::size_t threshold = 2;
  std::uint64_t seed = 0;
};

struct GenerateReport {
  struct Attempt {
    std::string id;
    std::string prototype;
    FilterVerdict verdict = FilterVerdict::reject;
    RejectReason reason = RejectReason::none;
    std::string detail;
  };
  std::vector<Attempt> attempts;
  std::size_t accepted = 0, pending = 0, rejected = 0;

  nlohmann::json to_json() const;
};

// `count` design+code rounds cycling over `prototypes`; every result goes
// through the pool's filter. Generation failures are recorded as rejections.
GenerateReport generate_roles(const std::vector<Prototype>& prototypes, SamplePool& pool,
                              proxy::TextGenerator& designer, proxy::TextGenerator& coder,
                              const GenerateOptions& options);

}  // namespace delta::data
