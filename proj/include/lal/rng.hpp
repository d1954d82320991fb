#pragma once

#include <cstdint>
#include <random>

#include "lal/field.hpp"

namespace lal {

/// Deterministic random source. Distributions are implemented here rather
/// than taken from <random> so the stream is identical on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal (Box-Muller).
    double normal();

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// One conjugate pair at k with amplitude a: the resulting field has
/// L2 norm |a|.
SpectralField single_mode_field(const BasisPtr& basis, const WaveVector& k, Complex a);

/// Fixed deterministic two-pair field on modes (1,0) and (0,1), scaled to
/// the requested L2 norm.
SpectralField two_mode_field(const BasisPtr& basis, double amplitude);

/// Random conjugate-symmetric field supported on max(|k1|,|k2|) <= k_band,
/// scaled to the requested L2 norm (left at zero amplitude if the draw is
/// identically zero).
SpectralField random_band_field(const BasisPtr& basis, uint64_t seed, int k_band, double amplitude);

/// Random field over the whole retained band, unit norm.
SpectralField random_field(const BasisPtr& basis, Rng& rng);

}  // namespace lal
