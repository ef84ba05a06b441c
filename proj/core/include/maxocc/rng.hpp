#pragma once

#include <cstdint>

namespace maxocc {

namespace detail {
/// SplitMix64 finalizer. Fixed constants, fixed behaviour on every platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based deterministic generator. A (seed, stream) pair fully
/// determines the draw sequence; streams are independent hashes of the pair,
/// so per-episode streams can be handed to parallel workers without
/// coordination.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t s = seed;
        std::uint64_t a = detail::splitmix64(s);
        s = stream ^ 0xD1342543DE82EF95ULL;
        std::uint64_t b = detail::splitmix64(s);
        state_ = a ^ (b + 0x9E3779B97F4A7C15ULL);
        key_ = state_;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    /// Derived stream key; identifies the (seed, stream) pair in logs.
    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_;
    std::uint64_t key_;
};

}  // namespace maxocc
