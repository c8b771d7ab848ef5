#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "delta/core/role_script.hpp"
#include "json.hpp"

namespace delta::eval {

struct MoveEntry {
  std::string name;
  std::string description;
  int power = 40;
  core::MoveCategory category = core::MoveCategory::physical;
  std::string type = "Normal";
};

struct AbilityEntry {
  std::string name;
  std::string description;
};

// Move and ability descriptions used to synthesize opponents and to draw
// scaling instructions.
struct Database {
  std::vector<MoveEntry> moves;
  std::vector<AbilityEntry> abilities;

  // Bundled data/moves.json and data/abilities.json.
  static const Database& standard();
  // Throws delta::Error on malformed entries.
  static Database from_json(const nlohmann::json& moves, const nlohmann::json& abilities);
  // DIR/moves.json and DIR/abilities.json.
  static Database load(const std::filesystem::path& dir);

  bool empty() const { return moves.empty() && abilities.empty(); }

  // Moves first, then abilities, each phrased as an evolution request.
  std::size_t instruction_count() const { return moves.size() + abilities.size(); }
  std::string instruction(std::size_t i) const;
};

}  // namespace delta::eval
