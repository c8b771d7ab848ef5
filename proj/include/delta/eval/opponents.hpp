#pragma once

#include <cstdint>

#include "delta/core/engine.hpp"
#include "delta/eval/database.hpp"

namespace delta::eval {

// Rule-based random role: one or two distinct types, base stats uniform in
// [40, 120], two to four distinct moves from the database. Pure in `seed`.
core::RoleScript synth_script(std::uint64_t seed, const Database& db = Database::standard());
core::EngineState synth_opponent(std::uint64_t seed, const Database& db = Database::standard());

// Seed mixer (splitmix64 finalizer) for deriving independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace delta::eval
