#include "delta/eval/opponents.hpp"

#include <algorithm>

#include "delta/battle/rng.hpp"
#include "delta/battle/types.hpp"
#include "delta/error.hpp"

namespace delta::eval {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ull + b + 0x632be59bd9b4e019ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

core::RoleScript synth_script(std::uint64_t seed, const Database& db) {
  if (db.moves.size() < 2) throw Error("synth_opponent: database needs at least two moves");
  battle::Rng rng(mix_seed(seed, 0x5eed));
  core::RoleScript s;
  s.species = "Synth-" + std::to_string(seed);
  s.provenance = core::Provenance::synthetic;

  const auto& types = battle::all_types();
  const auto t1 = types[rng.below(types.size())];
  s.types.emplace_back(battle::to_string(t1));
  if (rng.below(2) == 1) {
    auto t2 = types[rng.below(types.size() - 1)];
    if (t2 == t1) t2 = types.back();
    s.types.emplace_back(battle::to_string(t2));
  }

  auto stat = [&] { return 40 + static_cast<int>(rng.below(81)); };
  s.stats = {stat(), stat(), stat(), stat(), stat(), stat()};

  const std::size_t n = std::min<std::size_t>(2 + rng.below(3), db.moves.size());
  std::vector<std::size_t> pool(db.moves.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[k]);
    const auto& m = db.moves[pool[i]];
    s.moves.push_back({m.name, m.description, m.power, m.category, m.type});
  }
  return s;
}

core::EngineState synth_opponent(std::uint64_t seed, const Database& db) {
  return core::init_engine(synth_script(seed, db));
}

}  // namespace delta::eval
