#pragma once

#include <cstdint>

namespace nonloc {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based random stream. The n-th draw of stream `id` under `seed` is a pure
/// function of (seed, id, n), so specimens can be processed in any order or shard.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t id) : key_(mix64(seed ^ mix64(id ^ 0x6a09e667f3bcc909ULL))) {}

    std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace nonloc
