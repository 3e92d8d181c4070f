#pragma once
///
/// @file rng.hpp
/// @brief Seeded random draws with a fixed, platform-stable sequence.
///
/// std::mt19937_64 supplies the bit stream; the Gaussian transform is done
/// here (Box-Muller) instead of std::normal_distribution so that the exact
/// sequence is pinned by this file and not by the standard library build.

#include <cmath>
#include <cstdint>
#include <random>

namespace parcone {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() {
        // 53 random bits, the usual double mantissa construction.
        return (eng_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1] (never zero, used for ball radius scaling).
    double uniform_open0() { return 1.0 - uniform01(); }

    /// Standard normal, Box-Muller, one spare cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Stable mix of a base seed and a stream index (per-pair streams in the
/// sampling lab).  splitmix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace parcone
