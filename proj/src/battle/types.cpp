#include "delta/battle/types.hpp"

#include <numeric>
#include <sstream>

#include "delta/assets.hpp"
#include "delta/error.hpp"

namespace delta::battle {

namespace {

constexpr std::array<std::string_view, kTypeCount> kNames{
    "Normal", "Fire", "Water", "Electric", "Grass", "Ice", "Fighting", "Poison", "Ground",
    "Flying", "Psychic", "Bug", "Rock", "Ghost", "Dragon", "Dark", "Steel", "Fairy"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string_view to_string(Type t) { return kNames[static_cast<std::size_t>(t)]; }

std::optional<Type> parse_type(std::string_view name) {
  for (std::size_t i = 0; i < kTypeCount; ++i) {
    if (kNames[i] == name) return static_cast<Type>(i);
  }
  return std::nullopt;
}

const std::array<Type, kTypeCount>& all_types() {
  static const std::array<Type, kTypeCount> types = [] {
    std::array<Type, kTypeCount> t{};
    for (std::size_t i = 0; i < kTypeCount; ++i) t[i] = static_cast<Type>(i);
    return t;
  }();
  return types;
}

const TypeChart& TypeChart::standard() {
  static const TypeChart chart = from_csv(assets::get("type_chart.csv"));
  return chart;
}

TypeChart TypeChart::from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw Error("type chart: empty input");
  auto header = split_csv_line(line);
  if (header.size() != kTypeCount + 1) throw Error("type chart: header needs 18 type columns");
  std::array<Type, kTypeCount> columns{};
  for (std::size_t c = 0; c < kTypeCount; ++c) {
    auto t = parse_type(header[c + 1]);
    if (!t) throw Error("type chart: unknown type '" + header[c + 1] + "'");
    columns[c] = *t;
  }

  TypeChart chart;
  std::array<bool, kTypeCount> seen{};
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != kTypeCount + 1) throw Error("type chart: row '" + cells.at(0) + "' needs 18 values");
    auto attack = parse_type(cells[0]);
    if (!attack) throw Error("type chart: unknown attacking type '" + cells[0] + "'");
    if (seen[static_cast<std::size_t>(*attack)]) throw Error("type chart: duplicate row " + cells[0]);
    seen[static_cast<std::size_t>(*attack)] = true;
    for (std::size_t c = 0; c < kTypeCount; ++c) {
      const std::string& v = cells[c + 1];
      int twice;
      if (v == "0") twice = 0;
      else if (v == "0.5") twice = 1;
      else if (v == "1") twice = 2;
      else if (v == "2") twice = 4;
      else throw Error("type chart: value '" + v + "' not in {0, 0.5, 1, 2}");
      chart.twice_[static_cast<std::size_t>(*attack)][static_cast<std::size_t>(columns[c])] = twice;
    }
    ++rows;
  }
  if (rows != static_cast<int>(kTypeCount)) throw Error("type chart: expected 18 rows");
  return chart;
}

Multiplier TypeChart::factor(Type attack, Type defend) const {
  return Multiplier{twice_[static_cast<std::size_t>(attack)][static_cast<std::size_t>(defend)], 2};
}

Multiplier TypeChart::multiplier(Type attack, const std::vector<Type>& defender) const {
  Multiplier m{1, 1};
  for (Type d : defender) {
    auto f = factor(attack, d);
    m.num *= f.num;
    m.den *= f.den;
  }
  if (m.num == 0) return Multiplier{0, 1};
  const int g = std::gcd(m.num, m.den);
  return Multiplier{m.num / g, m.den / g};
}

}  // namespace delta::battle
