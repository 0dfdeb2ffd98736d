#pragma once

#include <cstdint>
#include <cmath>

namespace windcast::rng {

// SplitMix64 step (Steele, Lea, Flood 2014). Used both as the core PRNG and
// as the mixing function for deriving child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child-seed derivation: mix(master, a, b, ...) folds each tag
// into the stream. Every experiment cell gets an independent seed from
// (master_seed, day_index, method_id, size, instance_index).
inline std::uint64_t mix(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
}

template <typename... Tags>
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s) ^ tag;
    if constexpr (sizeof...(rest) == 0) {
        return splitmix64(h);
    } else {
        return mix(splitmix64(h), static_cast<std::uint64_t>(rest)...);
    }
}

// Small deterministic generator. All randomness in the project flows through
// this class so results are reproducible independent of the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on (0, 1]: never returns 0 so it is safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller without caching the second value; two uniforms per draw.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
};

}  // namespace windcast::rng
