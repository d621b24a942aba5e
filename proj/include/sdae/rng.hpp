#pragma once

#include <cmath>
#include <cstdint>

namespace sdae::rng {

// SplitMix64 finalizer. Used as the mixing core of the counter-based
// generator: every random number is a pure function of (seed, counter), so
// draws are reproducible regardless of evaluation order or threading.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed) ^ splitmix64(counter));
}

// Maps 64 bits to (0, 1); never returns 0 or 1, so logs are safe.
inline double unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal from a (seed, counter) key via Box-Muller.
inline double standard_normal(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t h1 = mix(seed, counter);
    const std::uint64_t h2 = splitmix64(h1);
    const double u1 = unit_open(h1);
    const double u2 = unit_open(h2);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace sdae::rng
