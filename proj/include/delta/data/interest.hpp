#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delta/core/engine.hpp"
#include "json.hpp"

namespace delta::data {

enum class Tag {
  power_boost,
  stat_boost,
  type_change,
  protect,
  multi_turn_state,
  heal,
  recoil,
  priority,
  status_inflict,
  conditional_logic,
  rng_use,
  cross_hook_interaction,
};

inline constexpr std::size_t kTagCount = 12;

inline constexpr std::array<std::string_view, kTagCount> kTagNames{
    "power_boost", "stat_boost",     "type_change", "protect",     "multi_turn_state",  "heal",
    "recoil",      "priority",       "status_inflict", "conditional_logic", "rng_use", "cross_hook_interaction"};

std::optional<Tag> parse_tag(std::string_view name);

struct InterestVector {
  std::bitset<kTagCount> bits;

  bool has(Tag t) const { return bits.test(static_cast<std::size_t>(t)); }
  void set(Tag t) { bits.set(static_cast<std::size_t>(t)); }
  std::size_t magnitude() const { return bits.count(); }
  // Every bit of `other` is set here.
  bool dominates(const InterestVector& other) const { return (other.bits & ~bits).none(); }

  InterestVector& operator|=(const InterestVector& o) {
    bits |= o.bits;
    return *this;
  }
  friend InterestVector operator|(InterestVector a, const InterestVector& b) { return a |= b; }
  bool operator==(const InterestVector&) const = default;

  std::vector<std::string> names() const;
  std::string to_string() const;  // one '0'/'1' per tag, registry order
  nlohmann::json to_json() const;
};

// Tags of a set of method definitions. Methods structurally equal to a
// default hook carry none.
InterestVector tag_methods(const std::vector<dsl::MethodDef>& methods);

// Static tags of a role: union over the initial program and every increment
// in its history. Every current method comes from one of those, so merging
// never clears a bit.
InterestVector tag_interest(const core::EngineState& state);

}  // namespace delta::data
