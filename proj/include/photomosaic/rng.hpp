#pragma once

#include <cstdint>
#include <random>

namespace photomosaic {

/// Every stochastic component draws from a std::mt19937_64 seeded with a
/// single 64-bit value. The engine's output sequence is fixed by the C++
/// standard; the helpers below replace the implementation-defined
/// std::*_distribution types so results are identical across toolchains.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). bound must be > 0. Lemire's
/// multiply-shift with rejection, so the result is unbiased.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// SplitMix64 finalizer over (base, stream); used to give independent
/// sub-streams (k-means seeding, synthetic data, per-cell runs) distinct
/// seeds without correlating them.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace photomosaic
