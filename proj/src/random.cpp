#include "rcef/random.hpp"

#include <limits>
#include <stdexcept>

namespace rcef {

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  // Largest multiple of n representable; values at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

BigInt uniform_below(Rng& rng, const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("uniform_below needs a positive bound");
  const auto bits = boost::multiprecision::msb(n) + 1;
  while (true) {
    BigInt x = 0;
    std::size_t have = 0;
    while (have < bits) {
      x = (x << 64) | BigInt(rng());
      have += 64;
    }
    x >>= static_cast<unsigned>(have - bits);
    if (x < n) return x;
  }
}

std::size_t sample_weighted(Rng& rng, std::span<const BigInt> weights) {
  BigInt total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw std::invalid_argument("negative weight");
    total += w;
  }
  BigInt u = uniform_below(rng, total);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  throw std::logic_error("sample_weighted fell off the end");
}

}  // namespace rcef
