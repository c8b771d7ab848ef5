#include "delta/core/evolve.hpp"

#include <algorithm>

#include "delta/dsl/parser.hpp"
#include "delta/dsl/validator.hpp"
#include "delta/error.hpp"
#include "delta/proxy/prompts.hpp"

namespace delta::core {

EvolveResult evolve_step(const EngineState& state, const Instruction& x, proxy::NeuralProxy& proxy,
                         EvolveOptions options) {
  if (x.text.empty()) throw Error("instruction text is empty");

  EvolveResult out{.delta = {}, .state = state};
  std::vector<std::string> names =
      options.retrieval ? proxy.select_entries(skeleton(state), x) : state.method_names();
  try {
    out.context = retrieve(state, names);
    out.selected = names;
  } catch (const UnknownEntry& e) {
    out.dropped = e.names();
    for (const auto& n : names) {
      if (std::find(out.dropped.begin(), out.dropped.end(), n) == out.dropped.end()) out.selected.push_back(n);
    }
    if (out.selected.empty()) throw;
    out.context = retrieve(state, out.selected);
  } catch (const Error&) {
    // empty selection
    throw UnknownEntry({});
  }

  out.raw_response = proxy.generate_delta(out.context, x);
  using Stage = NonExecutableDelta::Stage;
  try {
    out.delta_source = proxy::extract_delta(out.raw_response);
  } catch (const EmptyResponse& e) {
    throw NonExecutableDelta(Stage::extract, e.what(), out.raw_response);
  }
  try {
    out.delta = dsl::parse_delta(out.delta_source, dsl::Origin::proxy_response);
  } catch (const SyntaxError& e) {
    throw NonExecutableDelta(Stage::parse, e.what(), out.raw_response);
  } catch (const ValidationError& e) {
    throw NonExecutableDelta(Stage::validate, e.what(), out.raw_response);
  } catch (const Error& e) {
    // wrong program kind
    throw NonExecutableDelta(Stage::parse, e.what(), out.raw_response);
  }
  try {
    out.state = merge(out.delta, state, x, out.selected);
  } catch (const ValidationError& e) {
    throw NonExecutableDelta(Stage::validate, e.what(), out.raw_response);
  } catch (const TargetMismatch& e) {
    throw NonExecutableDelta(Stage::validate, e.what(), out.raw_response);
  }
  return out;
}

}  // namespace delta::core
