#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace delta::battle {

enum class Type {
  Normal, Fire, Water, Electric, Grass, Ice, Fighting, Poison, Ground,
  Flying, Psychic, Bug, Rock, Ghost, Dragon, Dark, Steel, Fairy,
};

inline constexpr std::size_t kTypeCount = 18;

std::string_view to_string(Type t);
std::optional<Type> parse_type(std::string_view name);
const std::array<Type, kTypeCount>& all_types();

// Effectiveness multiplier kept exact as a small rational: one of
// 0, 1/4, 1/2, 1, 2, 4 for a one- or two-type defender.
struct Multiplier {
  int num = 1;
  int den = 1;

  bool operator==(const Multiplier& o) const { return num * o.den == o.num * den; }
  double value() const { return static_cast<double>(num) / den; }
  bool is_zero() const { return num == 0; }
};

// 18x18 attacking-type x defending-type table loaded from CSV
// (header row of type names, then one row per attacking type).
class TypeChart {
 public:
  // The chart bundled with the library (data/type_chart.csv).
  static const TypeChart& standard();

  // Throws delta::Error on malformed input.
  static TypeChart from_csv(std::string_view csv);

  // Factor for a single defending type, as a rational in {0, 1/2, 1, 2}.
  Multiplier factor(Type attack, Type defend) const;

  // Product over the defender's types.
  Multiplier multiplier(Type attack, const std::vector<Type>& defender) const;

 private:
  // Stored doubled so 0.5 fits an integer: 0, 1, 2, 4.
  std::array<std::array<int, kTypeCount>, kTypeCount> twice_{};
};

}  // namespace delta::battle
