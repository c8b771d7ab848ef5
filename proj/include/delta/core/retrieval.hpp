#pragma once

#include <string>
#include <vector>

#include "delta/core/engine.hpp"

namespace delta::core {

struct SkeletonEntry {
  std::string name;
  std::vector<std::string> params;

  bool operator==(const SkeletonEntry&) const = default;
};

// Structure-and-signatures view of a state, bodies omitted.
struct Skeleton {
  std::string role_name;
  std::vector<std::string> fields;
  std::vector<SkeletonEntry> entries;

  bool operator==(const Skeleton&) const = default;

  std::vector<std::string> names() const;
  std::string render() const;
};

// Sparse slice of a state: full implementations of selected methods.
struct RetrievedContext {
  std::string role_name;
  std::vector<dsl::MethodDef> entries;
  std::size_t source_step = 0;

  bool operator==(const RetrievedContext&) const = default;

  std::string render() const;
};

// Entries in deterministic order: base hooks first (as currently resolved),
// then the remaining role methods in declaration order.
Skeleton skeleton(const EngineState& state);

// Full implementations of exactly `names` (duplicates collapsed, order kept),
// role methods shadowing hooks. Throws UnknownEntry listing every name that
// does not resolve; throws delta::Error when `names` is empty.
RetrievedContext retrieve(const EngineState& state, const std::vector<std::string>& names);

// Every resolved method, rendered like a RetrievedContext. The dense case of
// retrieval.
std::string full_listing(const EngineState& state);

// Printed full program (fields plus every resolved method).
std::string print_state(const EngineState& state);

// Whitespace-delimited lexeme count; the engine-size measure.
std::size_t token_count(std::string_view text);

}  // namespace delta::core
