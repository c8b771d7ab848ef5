#include "delta/eval/database.hpp"

#include <fstream>

#include "delta/assets.hpp"
#include "delta/battle/types.hpp"
#include "delta/error.hpp"

namespace delta::eval {

using nlohmann::json;

Database Database::from_json(const json& moves, const json& abilities) {
  Database db;
  try {
    for (const auto& m : moves) {
      MoveEntry e;
      e.name = m.at("name").get<std::string>();
      e.description = m.at("description").get<std::string>();
      e.power = m.value("basePower", 40);
      const std::string cat = m.value("category", "physical");
      if (cat != "physical" && cat != "special") throw Error("move '" + e.name + "': bad category");
      e.category = cat == "special" ? core::MoveCategory::special : core::MoveCategory::physical;
      e.type = m.value("type", "Normal");
      if (!battle::parse_type(e.type)) throw Error("move '" + e.name + "': unknown type " + e.type);
      if (e.power < 0 || e.power > 250) throw Error("move '" + e.name + "': power outside [0, 250]");
      db.moves.push_back(std::move(e));
    }
    for (const auto& a : abilities) {
      db.abilities.push_back({a.at("name").get<std::string>(), a.at("description").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(std::string("database: ") + e.what());
  }
  return db;
}

const Database& Database::standard() {
  static const Database db =
      from_json(json::parse(assets::get("moves.json")), json::parse(assets::get("abilities.json")));
  return db;
}

Database Database::load(const std::filesystem::path& dir) {
  auto read = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw Error("database: cannot read " + (dir / name).string());
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw Error("database: " + (dir / name).string() + ": " + e.what());
    }
  };
  return from_json(read("moves.json"), read("abilities.json"));
}

std::string Database::instruction(std::size_t i) const {
  if (i >= instruction_count()) throw Error("database: instruction index out of range");
  if (i < moves.size()) {
    const auto& m = moves[i];
    return "Learn the move " + m.name + " (" + m.type + ", " + core::to_string(m.category) + ", power " +
           std::to_string(m.power) + "): " + m.description;
  }
  const auto& a = abilities.at(i - moves.size());
  return "Gain the ability " + a.name + ": " + a.description;
}

}  // namespace delta::eval
