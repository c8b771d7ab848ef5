#pragma once

#include <string>
#include <vector>

#include "delta/core/engine.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/dsl/ast.hpp"
#include "delta/proxy/neural_proxy.hpp"

namespace delta::core {

struct EvolveResult {
  dsl::DeltaAst delta;
  EngineState state;
  std::vector<std::string> selected{};  // phase-A names after repair
  std::vector<std::string> dropped{};  // phase-A names that did not resolve
  RetrievedContext context{};         // what phase B saw
  std::string raw_response{};
  std::string delta_source{};         // extracted increment text
};

// One evolution step. Phase A asks the proxy which entries to read, phase B
// asks for an increment over exactly those entries, which is then parsed,
// validated against the role and merged.
//
// Unresolvable phase-A names are dropped once; if nothing is left,
// UnknownEntry is thrown. A phase-B answer that cannot be extracted, parsed
// or validated raises NonExecutableDelta and is never retried. ProxyError
// passes through.
struct EvolveOptions {
  // When false, phase A is skipped and phase B receives every method (the
  // dense baseline).
  bool retrieval = true;
};

EvolveResult evolve_step(const EngineState& state, const Instruction& x, proxy::NeuralProxy& proxy,
                         EvolveOptions options = {});

}  // namespace delta::core
