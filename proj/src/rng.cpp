#include "lal/rng.hpp"

#include <cmath>
#include <numbers>

#include "lal/errors.hpp"

namespace lal {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

SpectralField single_mode_field(const BasisPtr& basis, const WaveVector& k, Complex a) {
    SpectralField u(basis);
    u.set_pair(k, a);
    return u;
}

SpectralField two_mode_field(const BasisPtr& basis, double amplitude) {
    SpectralField u(basis);
    u.set_pair({1, 0}, Complex{1.0, 0.0});
    u.set_pair({0, 1}, Complex{0.6, 0.8});
    const double n = l2_norm(u);
    u *= amplitude / n;
    return u;
}

SpectralField random_band_field(const BasisPtr& basis, uint64_t seed, int k_band, double amplitude) {
    if (k_band < 1) throw ConfigError(ConfigError::Kind::constraint, "k_band must be >= 1");
    Rng rng(seed);
    SpectralField u(basis);
    for (int j : basis->pair_representatives()) {
        const auto& k = basis->mode(j);
        if (std::abs(k.k1) > k_band || std::abs(k.k2) > k_band) continue;
        u.set_pair(k, Complex{rng.normal(), rng.normal()});
    }
    const double n = l2_norm(u);
    if (n > 0.0) u *= amplitude / n;
    return u;
}

SpectralField random_field(const BasisPtr& basis, Rng& rng) {
    SpectralField u(basis);
    for (int j : basis->pair_representatives()) u.set_pair(basis->mode(j), Complex{rng.normal(), rng.normal()});
    const double n = l2_norm(u);
    if (n > 0.0) u *= 1.0 / n;
    return u;
}

}  // namespace lal
