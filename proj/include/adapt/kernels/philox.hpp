#pragma once
#include <cstdint>
#include <array>

namespace adapt::simd {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
// One block of four 32-bit words per counter; we consume blocks as two
// 64-bit words, i.e. two uniform draws per block.
struct PhiloxBlock {
    std::uint32_t w[4];
};

inline PhiloxBlock philox4x32(std::uint32_t c0, std::uint32_t c1,
                              std::uint32_t c2, std::uint32_t c3,
                              std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    std::uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
    for (int r = 0; r < 10; ++r) {
        std::uint64_t p0 = static_cast<std::uint64_t>(M0) * x0;
        std::uint64_t p1 = static_cast<std::uint64_t>(M1) * x2;
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        std::uint32_t n0 = hi1 ^ x1 ^ k0;
        std::uint32_t n1 = lo1;
        std::uint32_t n2 = hi0 ^ x3 ^ k1;
        std::uint32_t n3 = lo0;
        x0 = n0; x1 = n1; x2 = n2; x3 = n3;
        k0 += W0; k1 += W1;
    }
    return PhiloxBlock{{x0, x1, x2, x3}};
}

// Identifies one independent stream of uniforms. Streams sharing
// (seed, domain, theta, rep) are identical regardless of who consumes them,
// which is what common-random-number comparisons rely on.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint32_t domain = 0;  // data-kind tag (observation group, calibration ensemble, ...)
    std::uint32_t theta = 0;   // grid-point index
    std::uint32_t rep = 0;     // replicate index
};

// Draw i of a stream lives in block i/2, word-pair i%2.
inline std::uint64_t raw_bits(const StreamKey& k, std::uint64_t i) {
    PhiloxBlock b = philox4x32(static_cast<std::uint32_t>(i >> 1), k.rep, k.theta, k.domain,
                               static_cast<std::uint32_t>(k.seed),
                               static_cast<std::uint32_t>(k.seed >> 32));
    return (i & 1) ? (static_cast<std::uint64_t>(b.w[3]) << 32 | b.w[2])
                   : (static_cast<std::uint64_t>(b.w[1]) << 32 | b.w[0]);
}

// 52-bit uniforms, strictly inside (0,1).
inline double bits_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

// Integer threshold for u < p without going through doubles.
inline std::uint64_t bernoulli_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return (std::uint64_t{1} << 52) + 1;
    double t = std::ceil(p * 0x1.0p52 - 0.5);
    return t <= 0.0 ? 0 : static_cast<std::uint64_t>(t);
}

}  // namespace adapt::simd
