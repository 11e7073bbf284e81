// Seeded randomness with labelled sub-streams.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace intent {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Independent stream for `label` under a master seed.
Rng derive_rng(std::uint64_t seed, std::string_view label);

/// Uniform integer in [0, n). Portable across standard libraries.
std::uint64_t uniform_index(Rng &rng, std::uint64_t n);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng &rng);

} // namespace intent
