#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mfl {

/// Counter-based random numbers (Philox4x32-10).
///
/// Every variate is a pure function of (seed, stream, index), so replicas and
/// Monte Carlo configurations can be generated in any order — or in parallel —
/// and still reproduce bit-for-bit. Streams are cheap: no state to seed or
/// store beyond the three integers.
namespace rng {

/// One 10-round Philox4x32 block: 128-bit counter -> 128 random bits under a
/// 64-bit key. Multiplier and Weyl constants are the published ones.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                               std::array<std::uint32_t, 4> ctr) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += W0;
        k1 += W1;
    }
    return ctr;
}

/// Raw 128 bits for (seed, stream, index).
inline std::array<std::uint32_t, 4> bits(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t index) {
    return philox4x32(seed, {static_cast<std::uint32_t>(index),
                             static_cast<std::uint32_t>(index >> 32),
                             static_cast<std::uint32_t>(stream),
                             static_cast<std::uint32_t>(stream >> 32)});
}

/// Two independent uniforms in (0,1], 53-bit resolution, from one block.
inline std::array<double, 2> u01_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t index) {
    const auto b = bits(seed, stream, index);
    const std::uint64_t a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const std::uint64_t c = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    constexpr double scale = 0x1.0p-53;
    return {static_cast<double>((a >> 11) + 1) * scale, // in (0,1], log-safe
            static_cast<double>((c >> 11) + 1) * scale};
}

/// One uniform in (0,1].
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return u01_pair(seed, stream, index)[0];
}

/// Two independent standard Gaussians by Box-Muller (no rejection, so the
/// draw count per index is fixed and streams never drift out of alignment).
inline std::array<double, 2> gauss_pair(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t index) {
    const auto u = u01_pair(seed, stream, index);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double t = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(t), r * std::sin(t)};
}

/// Stream identifiers: a small domain tag keeps independent uses of the same
/// seed (initial sampling, SDE noise, bootstrap, Monte Carlo) disjoint.
enum class Domain : std::uint64_t {
    init_sample = 0,
    em_noise = 1,
    bootstrap = 2,
    mc_config = 3,
    probes = 4,
    pair_sub = 5,
};

inline std::uint64_t stream_id(Domain d, std::uint64_t a, std::uint64_t b = 0) {
    // 8-bit domain | 28-bit a | 28-bit b
    return (static_cast<std::uint64_t>(d) << 56) | ((a & 0xFFFFFFFull) << 28) |
           (b & 0xFFFFFFFull);
}

} // namespace rng
} // namespace mfl
