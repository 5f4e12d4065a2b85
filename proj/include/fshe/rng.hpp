// Counter-based random streams (Philox4x32-10).
//
// Every draw is a pure function of (seed, replicate, tag, index), so samples
// are bitwise reproducible regardless of thread count or call interleaving.
// One Philox block yields two standard normals via Box-Muller.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fshe {

struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
                   std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
                   std::uint32_t(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }
};

// Stateless stream of N(0,1) draws indexed from 0. The (replicate, tag) pair
// isolates independent substreams under one global seed; tags are assigned
// per purpose (path noise, chaos sampling, ...) by the callers.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t replicate, std::uint32_t tag)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          rep_lo_(std::uint32_t(replicate)),
          rep_hi_tag_(std::uint32_t(replicate >> 32) ^ (tag << 16)) {}

    double normal(std::uint64_t index) const {
        const std::uint64_t b = index >> 1;
        const auto r = Philox4x32::block(
            {std::uint32_t(b), std::uint32_t(b >> 32), rep_lo_, rep_hi_tag_}, key_);
        const double u1 = to_unit_(r[0], r[1]);  // in (0,1]
        const double u2 = to_unit_(r[2], r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * 3.14159265358979323846 * u2;
        return (index & 1u) ? rad * std::sin(ang) : rad * std::cos(ang);
    }

    // 53-bit uniform in (0,1), for MC integration.
    double uniform(std::uint64_t index) const {
        const std::uint64_t b = index >> 1;
        const auto r = Philox4x32::block(
            {std::uint32_t(b), std::uint32_t(b >> 32), rep_lo_, rep_hi_tag_}, key_);
        const std::uint32_t hi = (index & 1u) ? r[2] : r[0];
        const std::uint32_t lo = (index & 1u) ? r[3] : r[1];
        const std::uint64_t v = (std::uint64_t(hi) << 32) | lo;
        double u = double(v >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

  private:
    static double to_unit_(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t v = (std::uint64_t(hi) << 32) | lo;
        const double u = double(v >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t rep_lo_;
    std::uint32_t rep_hi_tag_;
};

}  // namespace fshe
