// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers. Philox4x32-10 after Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3" (SC11).
//
// Every draw is a pure function of (key, counter), so the value of normal
// number i in stream j is fixed by (seed, j, i) independent of execution
// order or worker count.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace timebin {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Standard normal variates addressed by (seed, stream, index).
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

    /// Normal variate number `index` of this stream.
    double operator[](std::uint64_t index) {
        const std::uint64_t block = index >> 1;
        if (block != cached_block_) {
            fill(block);
        }
        return cache_[index & 1u];
    }

    std::uint64_t stream() const noexcept { return stream_; }

  private:
    static double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
        // 53 random bits mapped to (0, 1].
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    void fill(std::uint64_t block) {
        const PhiloxCounter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const PhiloxCounter out = philox4x32_10(ctr, key_);
        const double u1 = to_unit_open_closed(out[0], out[1]);
        const double u2 = to_unit_open_closed(out[2], out[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cache_[0] = radius * std::cos(angle);
        cache_[1] = radius * std::sin(angle);
        cached_block_ = block;
    }

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<double, 2> cache_{};
};

} // namespace timebin
