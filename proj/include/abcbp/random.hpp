#ifndef ABCBP_RANDOM_HPP
#define ABCBP_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

namespace abcbp {

// All stochastic code draws from this engine through the helpers below, so a
// test can replay a stream exactly by making the same calls in the same order.
using Rng = std::mt19937_64;

// Seeds an independent stream for (seed, a, b). The optimizers use
// (seed, cycle, slot) so the draws of one solution never depend on how many
// draws another solution made, which keeps parallel evaluation bit-identical.
Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform on [-1, 1).
double uniform_symmetric(Rng& rng);

// Uniform integer on [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Index drawn with probability proportional to `weights` (non-negative, not
// all zero). Consumes one uniform01 draw.
std::size_t roulette(std::span<const double> weights, Rng& rng);

// Standard normal via Box-Muller; consumes exactly two uniform01 draws.
double standard_normal(Rng& rng);

} // namespace abcbp

#endif
