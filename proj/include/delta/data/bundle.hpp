#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delta/core/engine.hpp"
#include "json.hpp"

namespace delta::data {

// The part of a script the rule-based initializer turns into code: the first
// two moves. Everything else arrives as increments.
core::RoleScript base_script(const core::RoleScript& script);

// One evolution request per scripted move beyond the first two, then one per
// ability, in script order.
std::vector<std::string> coding_instructions(const core::RoleScript& script);

// Increments written out as text:
//
//   #> Learn the move Leech Bite: ...
//   increment GreenBug { ... }
//   #> Gain the ability ...
//   increment GreenBug { ... }
//
// Text before the first marker, if not blank, is a full role program.
struct Listing {
  std::optional<std::string> role_source;
  struct Step {
    std::string instruction;
    std::string delta_source;
  };
  std::vector<Step> steps;

  static Listing parse(std::string_view text);
  std::string render() const;
};

// The listing of a state's history (no role program).
Listing listing_of(const core::EngineState& state);

// Initial state from the script (or the listing's role program), then every
// increment merged in order with author `author`. Throws SyntaxError,
// ValidationError, TargetMismatch or ScriptError.
core::EngineState fold_listing(const core::RoleScript& script, const Listing& listing,
                               core::Author author = core::Author::pipeline);

// A role with the script it was built from.
struct RoleBundle {
  std::string id;
  core::RoleScript script;
  core::EngineState state;

  // {"id", "script", "initial": printed role, "history": [{"instruction",
  //  "author", "delta", "selected"}], "code": printed role}
  nlohmann::json to_json() const;
  // Rebuilds the state from initial + history and checks it against "code".
  // Throws delta::Error on any mismatch.
  static RoleBundle from_json(const nlohmann::json& j);
};

// The 20 hand-written seed roles (data/seeds), sorted by id.
const std::vector<RoleBundle>& seed_roles();

// Seed from `<id>.json` (script) and `<id>.dsl` (listing).
RoleBundle load_seed(const std::string& id, std::string_view script_json, std::string_view listing);

}  // namespace delta::data
