#include "abcbp/random.hpp"

#include "abcbp/error.hpp"

#include <cmath>
#include <numbers>

namespace abcbp {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    state ^= a * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(state);
    state ^= b * 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64(state);
    return Rng(h);
}

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_symmetric(Rng& rng)
{
    return 2.0 * uniform01(rng) - 1.0;
}

std::size_t uniform_index(Rng& rng, std::size_t n)
{
    auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

std::size_t roulette(std::span<const double> weights, Rng& rng)
{
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("roulette weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw ConfigError("roulette needs at least one positive weight");
    const double u = uniform01(rng) * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        cumulative += weights[i];
        last_positive = i;
        if (u < cumulative) return i;
    }
    // Rounding can leave u just above the accumulated total.
    return last_positive;
}

double standard_normal(Rng& rng)
{
    // 1 - u keeps the log argument in (0, 1].
    double u1 = 1.0 - uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace abcbp
