#include "lal/filter.hpp"

#include <algorithm>
#include <cmath>

#include "lal/errors.hpp"

namespace lal {

SpectralField apply_filter(const SpectralField& y, const FilterParams& p) {
    if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha))
        throw ConfigError(ConfigError::Kind::constraint, "filter alpha must be finite and >= 0");
    SpectralField z = y;
    const double a2 = p.alpha * p.alpha;
    const auto& lam = y.basis()->eigenvalues();
    for (int j = 0; j < z.size(); ++j) z[j] *= 1.0 / (1.0 + a2 * lam[j]);
    return z;
}

FilterBoundsReport filter_bounds_report(const SpectralField& y, const FilterParams& p) {
    const SpectralField z = apply_filter(y, p);
    FilterBoundsReport r;
    r.y_l2 = l2_norm(y);
    r.z_l2 = l2_norm(z);
    r.y_v = sobolev_norm(y, 1.0);
    r.z_v = sobolev_norm(z, 1.0);
    r.weighted_lhs = r.z_l2 * r.z_l2 + 2.0 * p.alpha * p.alpha * r.z_v * r.z_v;
    r.weighted_rhs = r.y_l2 * r.y_l2;
    r.min_slack = std::min({r.y_l2 - r.z_l2, r.y_v - r.z_v, r.weighted_rhs - r.weighted_lhs});
    return r;
}

}  // namespace lal
