#pragma once
#include <cstdint>

#include "adapt/kernels/kernels.hpp"
#include "adapt/model/family.hpp"
#include "adapt/num/normal.hpp"

namespace adapt {

// Deterministic observation stream for one replicate: cumulative sufficient
// statistics at any n, generated from counter-based uniforms keyed by
// (seed, theta-gridpoint, replicate). Tests sharing the key see identical
// data, which is what common-random-number comparisons require.
class SuffStatStream {
  public:
    SuffStatStream(const FamilySpec& fam, const Theta& truth, std::uint64_t seed,
                   std::uint32_t theta_idx, std::uint32_t rep)
        : fam_(fam), truth_(truth) {
        g0_ = simd::StreamKey{seed, 0, theta_idx, rep};
        g1_ = simd::StreamKey{seed, 1, theta_idx, rep};
    }

    // Cumulative statistic over the first n observations (n nondecreasing).
    const SuffStat& at(std::int64_t n) {
        const auto& K = simd::active();
        switch (fam_.kind) {
            case FamilyKind::NormalKnownVar:
            case FamilyKind::NormalUnknownVar: {
                double mean = truth_.c1;
                double sd = fam_.kind == FamilyKind::NormalKnownVar ? fam_.sigma : truth_.c2;
                for (std::int64_t i = cur_.n; i < n; ++i) {
                    double u = simd::bits_to_unit(simd::raw_bits(g0_, static_cast<std::uint64_t>(i)));
                    double x = mean + sd * num::norm_quantile(u);
                    cur_.s1 += x;
                    cur_.s2 += x * x;
                }
                break;
            }
            case FamilyKind::TwoSampleBinomial: {
                std::uint64_t j = static_cast<std::uint64_t>(n - cur_.n);
                if (j > 0) {
                    cur_.s1 += static_cast<double>(
                        K.bernoulli_count(g0_, static_cast<std::uint64_t>(cur_.n), j, truth_.c1));
                    cur_.s2 += static_cast<double>(
                        K.bernoulli_count(g1_, static_cast<std::uint64_t>(cur_.n), j, truth_.c2));
                }
                break;
            }
        }
        cur_.n = n;
        return cur_;
    }

  private:
    FamilySpec fam_;
    Theta truth_;
    simd::StreamKey g0_, g1_;
    SuffStat cur_;
};

}  // namespace adapt
