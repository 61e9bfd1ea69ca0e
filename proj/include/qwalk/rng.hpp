#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace qwalk::rng {

// Algorithm name recorded in output metadata so runs can be reproduced.
inline constexpr std::string_view kAlgorithm = "philox4x32-10";

/// Counter-based generator (Philox 4x32, 10 rounds). Streams derived from
/// (seed, stream) are statistically independent, which is what makes
/// bootstrap resamples and optimizer restarts order- and thread-independent.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform double in [0,1) with 53 random bits.
    double uniform();
    /// Uniform double in [lo,hi).
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller.
    double normal();
    /// Poisson sample; inversion below mean 10, Hoermann's PTRD above.
    std::int64_t poisson(double mean);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace qwalk::rng
