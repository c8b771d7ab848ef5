#pragma once

#include <string>
#include <vector>

#include "delta/core/engine.hpp"
#include "delta/core/retrieval.hpp"

namespace delta::proxy {

// The model that grows an engine. Implementations must be total: they answer
// or throw (ProxyError), never block past their configured timeout.
class NeuralProxy {
 public:
  virtual ~NeuralProxy() = default;

  // Phase A: which engine entries are needed to implement `x`.
  virtual std::vector<std::string> select_entries(const core::Skeleton& skeleton, const core::Instruction& x) = 0;

  // Phase B: raw response holding an increment built on `context`. Callers
  // pass the result through extract_delta before parsing.
  virtual std::string generate_delta(const core::RetrievedContext& context, const core::Instruction& x) = 0;
};

struct PromptBundle {
  std::string system;
  std::string user;
  int max_tokens = 1024;
  double temperature = 0.0;
  std::string template_version;

  bool operator==(const PromptBundle&) const = default;
};

// Free-form completion, used by the data pipeline designers and judges.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string complete(const PromptBundle& prompt) = 0;
};

}  // namespace delta::proxy
