#include "intent/random.hpp"

#include <stdexcept>

namespace intent {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng derive_rng(std::uint64_t seed, std::string_view label) {
  return Rng(splitmix64(seed ^ fnv1a(label)));
}

std::uint64_t uniform_index(Rng &rng, std::uint64_t n) {
  if (n == 0)
    throw std::invalid_argument("uniform_index over empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double uniform_unit(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace intent
