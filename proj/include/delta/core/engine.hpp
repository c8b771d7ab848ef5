#pragma once

#include <string>
#include <vector>

#include "delta/core/role_script.hpp"
#include "delta/dsl/ast.hpp"

namespace delta::core {

enum class Author { player, pipeline, fuzzer };

const char* to_string(Author a);
Author parse_author(const std::string& s);

// Natural-language evolution request.
struct Instruction {
  std::string text;
  Author author = Author::player;

  bool operator==(const Instruction&) const = default;
};

struct HistoryEntry {
  Instruction instruction;
  dsl::DeltaAst delta;
  // Entries the proxy chose to retrieve before generating this delta; empty
  // when the delta did not come from a two-phase evolve.
  std::vector<std::string> selected;

  bool operator==(const HistoryEntry&) const = default;
};

// Code of one role after `step()` evolution steps. Immutable: merge returns a
// new state. The role AST always equals the fold of `history()` over
// `initial_role()`.
class EngineState {
 public:
  // Step-0 state over `initial` with the default base hooks installed.
  explicit EngineState(dsl::RoleAst initial);

  const dsl::RoleAst& role() const { return role_; }
  const dsl::RoleAst& initial_role() const { return initial_; }
  const std::vector<dsl::MethodDef>& base_hooks() const { return hooks_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  std::size_t step() const { return history_.size(); }

  // Role methods shadow base hooks.
  const dsl::MethodDef* lookup(std::string_view name) const;

  // Every resolvable method name: hooks first, then role methods in
  // declaration order.
  std::vector<std::string> method_names() const;

  // Resolved methods in method_names() order.
  std::vector<const dsl::MethodDef*> resolved_methods() const;

  // The full program as the battle engine sees it: role fields plus every
  // resolved method (non-overridden hook defaults included).
  dsl::RoleAst full_program() const;

  // Move slots (`move_N`) sorted by N.
  std::vector<std::string> move_slots() const;

  bool operator==(const EngineState&) const = default;

 private:
  friend EngineState merge(const dsl::DeltaAst&, const EngineState&, const Instruction&,
                           std::vector<std::string>);

  dsl::RoleAst initial_;
  dsl::RoleAst role_;
  std::vector<dsl::MethodDef> hooks_;
  std::vector<HistoryEntry> history_;
};

// Default implementations of get_power / set_boost / type_change.
const std::vector<dsl::MethodDef>& default_hooks();

// Rule-based step-0 state for a script: fields for species, types and base
// stats, and one `move_i` per scripted move calling deal_damage.
// Throws ScriptError on an invalid script.
EngineState init_engine(const RoleScript& script);

// Same checks init_engine performs, without building anything.
void check_script(const RoleScript& script);

// Merge an increment: names already present in the role are replaced in
// place, hook names and new names are appended in delta order.
// Throws TargetMismatch or ValidationError.
EngineState merge(const dsl::DeltaAst& delta, const EngineState& state, const Instruction& instruction = {},
                  std::vector<std::string> selected = {});

// Pure role-content merge with no validation or history.
dsl::RoleAst apply_delta(const dsl::RoleAst& role, const dsl::DeltaAst& delta);

// Fold the history over the initial role.
dsl::RoleAst replay(const dsl::RoleAst& initial, const std::vector<HistoryEntry>& history);

// Rebuild a state by merging every history entry again (with validation).
EngineState rebuild(const dsl::RoleAst& initial, const std::vector<HistoryEntry>& history);

}  // namespace delta::core
