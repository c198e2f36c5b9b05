#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spde {

// Philox4x32-10 counter-based generator. Stateless: every block of random
// bits is a pure function of (key, counter), so increments can be generated
// in any order, on any thread, with bit-identical results.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One standard Gaussian per (seed, path, step, slot) address. Uses the
// Box-Muller cosine branch on two 64-bit uniforms drawn from a single
// Philox block.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t path,
                               std::uint64_t step, std::uint64_t slot) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(slot >> 32)};
    // path folded into the key so distinct paths are independent streams
    const std::uint64_t k = seed ^ (path * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(k),
                                              static_cast<std::uint32_t>(k >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const std::uint64_t a =
        (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b =
        (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    // (0,1) uniforms at 53-bit resolution; offset keeps u1 away from 0
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Uniform in [0,1) from the same addressing scheme, for non-Gaussian draws.
inline double counter_uniform(std::uint64_t seed, std::uint64_t path,
                              std::uint64_t step, std::uint64_t slot) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(slot >> 32)};
    const std::uint64_t k = seed ^ (path * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(k),
                                              static_cast<std::uint32_t>(k >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const std::uint64_t a =
        (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return static_cast<double>(a >> 11) * 0x1.0p-53;
}

}  // namespace spde
