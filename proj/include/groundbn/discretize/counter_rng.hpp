#pragma once
// Counter-based pseudo-random numbers.
//
// Every draw is a pure function of (seed, stream, cell, lane), so synthesized
// tables do not depend on evaluation order or thread scheduling. The mixer
// is SplitMix64; only integer arithmetic is involved, which keeps streams
// identical across platforms.

#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "groundbn/hash.hpp"

namespace groundbn::discretize {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// FNV-1a; stable stream ids from node names.
inline constexpr std::uint64_t stream_id(std::string_view name) { return fnv1a64(name); }

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t cell, std::uint64_t lane)
        : key_(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ cell) ^ lane)) {}

    std::uint64_t next() { return splitmix64(key_ + 0x632BE59BD9B4E019ULL * ++counter_); }

    // Uniform on [0, 1) with 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do r = next();
        while (r >= limit);
        return r % n;
    }

    // Fisher–Yates permutation of 0..n-1.
    std::vector<std::uint32_t> permutation(std::uint32_t n) {
        std::vector<std::uint32_t> p(n);
        std::iota(p.begin(), p.end(), 0u);
        for (std::uint32_t i = n; i > 1; --i) std::swap(p[i - 1], p[below(i)]);
        return p;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace groundbn::discretize
