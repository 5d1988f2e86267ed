#pragma once

#include <cstdint>

namespace gak {

// SplitMix64 (Steele, Lea, Flood 2014): state advances by the golden-ratio
// increment 0x9E3779B97F4A7C15 and the output passes through the
// 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB finalizer. All derived draws below
// use only integer arithmetic plus IEEE division, so streams match across
// platforms.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

    // Independent stream keyed by (seed, stream); does not touch any state.
    static SeededRng derive(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n), unbiased; n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;
    // Standard normal via Box-Muller.
    double normal() noexcept;
    SeededRng split() noexcept { return SeededRng(next_u64()); }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace gak
