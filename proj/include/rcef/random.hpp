#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "rcef/intmodel.hpp"

namespace rcef {

// Standard distributions are implementation-defined; every draw here goes
// through the raw 64-bit engine output so seeded runs match across toolchains.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// Uniform big integer in [0, n) by rejection on random bit strings.
BigInt uniform_below(Rng& rng, const BigInt& n);

/// Index i with probability weights[i] / sum(weights), exactly.
std::size_t sample_weighted(Rng& rng, std::span<const BigInt> weights);

template <typename T>
void fisher_yates(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace rcef
