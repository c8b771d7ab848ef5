#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "delta/core/engine.hpp"
#include "delta/data/interest.hpp"
#include "json.hpp"

namespace delta::data {

enum class FilterVerdict { accept, reject, pending };
enum class RejectReason { none, compile, dangling, interest };

const char* to_string(FilterVerdict v);
const char* to_string(RejectReason r);

struct FilterResult {
  FilterVerdict verdict = FilterVerdict::accept;
  RejectReason reason = RejectReason::none;
  std::string detail;
  InterestVector toi;

  nlohmann::json to_json() const;
};

struct FilterOptions {
  std::size_t threshold = 2;
  // Emit `pending` instead of `accept` so a person signs off first.
  bool human_checkpoint = false;
};

// Role methods that no move slot or overridden hook reaches through calls.
// Transitive, unlike dsl::dangling_methods: a helper called only from another
// unreachable helper is listed too.
std::vector<std::string> unreachable_methods(const dsl::RoleAst& role);

// Chain: compile (the code validates, the battle engine accepts it and it has
// one move slot per scripted move), dangling methods, interest magnitude,
// then the optional checkpoint.
FilterResult filter_instance(const core::RoleScript& script, const core::EngineState& state,
                             const FilterOptions& options = {});

// Same chain starting from role source text; a syntax or validation failure
// rejects with `compile`.
FilterResult filter_source(const core::RoleScript& script, std::string_view role_source,
                           const FilterOptions& options = {});

}  // namespace delta::data
