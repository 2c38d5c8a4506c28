#pragma once

#include <cstdint>

namespace lpising {

// Counter-based 64-bit generator (splitmix64).  The state advances by a
// fixed odd constant and each output is a bijective hash of the counter, so
// a stream is fully determined by (seed, number of draws) and independent
// streams are derived by hashing a stream index into the seed.  Used for
// everything that needs reproducible randomness; identified in result
// records by name.
inline constexpr const char* kRngAlgorithm = "splitmix64";

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Derives the generator for an independent stream of the same seed.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index) {
        SplitMix64 s(seed);
        return SplitMix64(mix(s.state_ + 0x9E3779B97F4A7C15ull * (stream_index + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [a, b).
    double next_uniform(double a, double b) { return a + (b - a) * next_u01(); }

    // Uniform integer in [0, n).  n must be nonzero; uses rejection to avoid
    // modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace lpising
