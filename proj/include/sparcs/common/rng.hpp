#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace sparcs {

// mt19937_64 is fully specified by the standard; the helpers below avoid the
// implementation-defined distributions so that seeded output is identical
// across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Standard normal draw (Box-Muller, one draw per call).
double standard_normal(Rng& rng);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace sparcs
