#include "delta/core/role_script.hpp"

#include <cctype>

#include "delta/error.hpp"

namespace delta::core {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw ScriptError(std::string(where) + ": missing '" + key + "'");
  return j.at(key);
}

std::string require_string(const json& j, const char* key, const char* where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) throw ScriptError(std::string(where) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

int require_int(const json& j, const char* key, const char* where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) throw ScriptError(std::string(where) + ": '" + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::seed: return "seed";
    case Provenance::synthetic: return "synthetic";
    case Provenance::codesign: return "codesign";
    case Provenance::volunteer: return "volunteer";
  }
  return "seed";
}

Provenance parse_provenance(const std::string& s) {
  if (s == "seed") return Provenance::seed;
  if (s == "synthetic") return Provenance::synthetic;
  if (s == "codesign") return Provenance::codesign;
  if (s == "volunteer") return Provenance::volunteer;
  throw ScriptError("unknown provenance '" + s + "'");
}

const char* to_string(MoveCategory c) { return c == MoveCategory::physical ? "physical" : "special"; }

RoleScript RoleScript::from_json(const json& j) {
  if (!j.is_object()) throw ScriptError("role script must be a JSON object");
  RoleScript s;
  s.species = require_string(j, "species", "script");

  const json& types = require(j, "types", "script");
  if (!types.is_array()) throw ScriptError("script: 'types' must be an array");
  for (const auto& t : types) {
    if (!t.is_string()) throw ScriptError("script: type names must be strings");
    s.types.push_back(t.get<std::string>());
  }

  const json& stats = require(j, "stats", "script");
  s.stats.hp = require_int(stats, "hp", "stats");
  s.stats.atk = require_int(stats, "atk", "stats");
  s.stats.def = require_int(stats, "def", "stats");
  s.stats.spa = require_int(stats, "spa", "stats");
  s.stats.spd = require_int(stats, "spd", "stats");
  s.stats.spe = require_int(stats, "spe", "stats");

  if (j.contains("moves")) {
    for (const auto& m : j.at("moves")) {
      MoveSpec mv;
      mv.name = require_string(m, "name", "move");
      mv.description = m.value("description", "");
      if (m.contains("basePower") && !m.at("basePower").is_null()) mv.base_power = require_int(m, "basePower", "move");
      if (m.contains("category") && !m.at("category").is_null()) {
        const std::string c = require_string(m, "category", "move");
        if (c == "physical") mv.category = MoveCategory::physical;
        else if (c == "special") mv.category = MoveCategory::special;
        else throw ScriptError("move '" + mv.name + "': category must be physical or special");
      }
      if (m.contains("type") && !m.at("type").is_null()) mv.type = require_string(m, "type", "move");
      s.moves.push_back(std::move(mv));
    }
  }
  if (j.contains("abilities")) {
    for (const auto& a : j.at("abilities")) {
      s.abilities.push_back(AbilitySpec{require_string(a, "name", "ability"), a.value("description", "")});
    }
  }
  if (j.contains("provenance")) s.provenance = parse_provenance(require_string(j, "provenance", "script"));
  return s;
}

json RoleScript::to_json() const {
  json moves_j = json::array();
  for (const auto& m : moves) {
    json mj = {{"name", m.name}, {"description", m.description}};
    if (m.base_power) mj["basePower"] = *m.base_power;
    if (m.category) mj["category"] = core::to_string(*m.category);
    if (m.type) mj["type"] = *m.type;
    moves_j.push_back(std::move(mj));
  }
  json abilities_j = json::array();
  for (const auto& a : abilities) abilities_j.push_back({{"name", a.name}, {"description", a.description}});
  return json{{"species", species},
              {"types", types},
              {"stats",
               {{"hp", stats.hp}, {"atk", stats.atk}, {"def", stats.def}, {"spa", stats.spa}, {"spd", stats.spd},
                {"spe", stats.spe}}},
              {"moves", moves_j},
              {"abilities", abilities_j},
              {"provenance", core::to_string(provenance)}};
}

std::string role_name_for(const std::string& species) {
  std::string out;
  bool upper_next = true;
  for (unsigned char c : species) {
    if (std::isalnum(c)) {
      out += upper_next ? static_cast<char>(std::toupper(c)) : static_cast<char>(c);
      upper_next = false;
    } else {
      upper_next = true;
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "Role" + out;
  return out;
}

}  // namespace delta::core
