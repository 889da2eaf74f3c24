#pragma once

#include <cmath>
#include <cstdint>

namespace edg {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Counter-based generator: draw i of stream s under seed is mix64(key(seed, s) + i * golden).
 * Streams are independent and any draw is addressable without replaying the others.
 */
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))), seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() {
        ++ctr_;
        return mix64(key_ + ctr_ * 0x9e3779b97f4a7c15ULL);
    }
    /// Uniform on (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t key_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
};

}  // namespace edg
