#pragma once

#include <cstdint>

namespace netdyn {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Counter-based random stream. Draw i of a stream is a pure function of
 * (key, i), and child streams are keyed by (parent key, index), so results
 * for a trial never depend on how many other trials ran or in which order.
 */
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

    constexpr std::uint64_t key() const noexcept { return key_; }

    /// Independent stream for child `index` (trial, item, grid point, ...).
    constexpr CounterRng split(std::uint64_t index) const noexcept {
        CounterRng child(0);
        child.key_ = mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL));
        return child;
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ + mix64(counter));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by widening multiply; bias is below 2^-32
    /// for any bound under 2^32.
    std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(counter)) * bound) >> 64);
    }

private:
    std::uint64_t key_;
};

} // namespace netdyn
