#pragma once

#include <cstdint>
#include <limits>

namespace nonprob {

/// SplitMix64: a counter-based 64-bit generator. The n-th output is a fixed
/// bijective mix of seed + n * golden-gamma, so streams are reproducible from
/// (seed, position) alone.
///
/// Replicate streams are keyed by `stream(base_seed, index)`, which seeds a
/// fresh generator with mix(base_seed XOR index).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static SplitMix64 stream(std::uint64_t base_seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(base_seed ^ index));
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

private:
    std::uint64_t state_;
};

}  // namespace nonprob
