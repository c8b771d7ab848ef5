#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace delta::core {

enum class Provenance { seed, synthetic, codesign, volunteer };

enum class MoveCategory { physical, special };

struct MoveSpec {
  std::string name;
  std::string description;
  std::optional<int> base_power;          // defaults to 40 when absent
  std::optional<MoveCategory> category;   // defaults to physical
  std::optional<std::string> type;        // defaults to the role's primary type

  bool operator==(const MoveSpec&) const = default;
};

struct AbilitySpec {
  std::string name;
  std::string description;

  bool operator==(const AbilitySpec&) const = default;
};

struct BaseStats {
  int hp = 0;
  int atk = 0;
  int def = 0;
  int spa = 0;
  int spd = 0;
  int spe = 0;

  bool operator==(const BaseStats&) const = default;
};

// Natural-language structured description of a role. Serialized as JSON:
//
//   {"species": "Green-Bug", "types": ["Bug"],
//    "stats": {"hp": 45, "atk": 50, "def": 45, "spa": 30, "spd": 40, "spe": 55},
//    "moves": [{"name": "Tackle", "description": "...", "basePower": 40,
//               "category": "physical", "type": "Normal"}],
//    "abilities": [{"name": "...", "description": "..."}],
//    "provenance": "seed"}
struct RoleScript {
  std::string species;
  std::vector<std::string> types;
  BaseStats stats;
  std::vector<MoveSpec> moves;
  std::vector<AbilitySpec> abilities;
  Provenance provenance = Provenance::seed;

  bool operator==(const RoleScript&) const = default;

  // Throws ScriptError naming the missing or malformed field.
  static RoleScript from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

const char* to_string(Provenance p);
Provenance parse_provenance(const std::string& s);
const char* to_string(MoveCategory c);

// Role identifier derived from the species name: "Green-Bug" -> "GreenBug".
std::string role_name_for(const std::string& species);

}  // namespace delta::core
