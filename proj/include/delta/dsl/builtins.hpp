#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace delta::dsl {

enum class Builtin {
  deal_damage,    // (move_name, power, type, category) -> damage dealt
  boost_self,     // (stat, stages)
  boost_foe,      // (stat, stages)
  set_types,      // (type1, type2) ; type2 "" for a single type
  heal,           // (amount) -> amount healed
  recoil,         // (amount) -> damage taken
  inflict_status, // (status, turns)
  set_foe_flag,   // (name, turns)
  chance,         // (percent) -> bool, one rng draw
  has_type,       // (type) -> bool, own types
  foe_has_type,   // (type) -> bool
  min,
  max,
  abs,
  floor,
};

struct BuiltinInfo {
  std::string_view name;
  Builtin id;
  int arity;
};

inline constexpr std::array<BuiltinInfo, 15> kBuiltins{{
    {"deal_damage", Builtin::deal_damage, 4},
    {"boost_self", Builtin::boost_self, 2},
    {"boost_foe", Builtin::boost_foe, 2},
    {"set_types", Builtin::set_types, 2},
    {"heal", Builtin::heal, 1},
    {"recoil", Builtin::recoil, 1},
    {"inflict_status", Builtin::inflict_status, 2},
    {"set_foe_flag", Builtin::set_foe_flag, 2},
    {"chance", Builtin::chance, 1},
    {"has_type", Builtin::has_type, 1},
    {"foe_has_type", Builtin::foe_has_type, 1},
    {"min", Builtin::min, 2},
    {"max", Builtin::max, 2},
    {"abs", Builtin::abs, 1},
    {"floor", Builtin::floor, 1},
}};

std::optional<BuiltinInfo> find_builtin(std::string_view name);

// Overridable methods every engine state carries a default for.
struct HookInfo {
  std::string_view name;
  int arity;
};

inline constexpr std::array<HookInfo, 3> kHooks{{
    {"get_power", 2},   // (move_name, base_power) -> power
    {"set_boost", 2},   // (stat, stages)
    {"type_change", 2}, // (type1, type2)
}};

bool is_hook(std::string_view name);

// `move_<N>` with N >= 1 and no leading zero.
bool is_move_slot(std::string_view name);
std::optional<int> move_slot_index(std::string_view name);

// Battler attributes readable through `self.<attr>` / `foe.<attr>`.
inline constexpr std::array<std::string_view, 10> kBattlerAttributes{
    "hp", "max_hp", "atk", "def", "spa", "spd", "spe", "level", "type1", "type2"};

inline constexpr std::array<std::string_view, 5> kStageStats{"atk", "def", "spa", "spd", "spe"};

bool is_battler_attribute(std::string_view name);
bool is_stage_stat(std::string_view name);

inline constexpr std::array<std::string_view, 1> kBattleAttributes{"turn"};
bool is_battle_attribute(std::string_view name);

}  // namespace delta::dsl
