#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

// Deterministic random numeric helpers.
//
// The standard library's distributions are implementation-defined, so any
// byte-identical-across-toolchains guarantee has to come from hand-rolled
// transforms over a fixed-algorithm engine.  splitmix64 is used both as the
// engine and to derive independent named sub-streams from one master seed.

namespace gripsense::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// FNV-1a over the tag text; used to give each sub-stream its own offset.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {
        // Warm up so that adjacent seeds decorrelate immediately.
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; draws two uniforms per call so the
    // stream advances identically whether or not callers consume pairs.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // log(0) guard; astronomically rare
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Derive the seed of an independent named sub-stream.
inline std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
    std::uint64_t s = seed ^ hash_tag(tag);
    return splitmix64(s);
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                            std::uint64_t index) {
    std::uint64_t s = derive(seed, tag) ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return splitmix64(s);
}

}  // namespace gripsense::rng
