#pragma once

#include "lal/field.hpp"

namespace lal {

/// Helmholtz filter length scale; alpha = 0 is the identity filter.
struct FilterParams {
    double alpha = 0.0;
};

/// z = (I + alpha^2 A)^{-1} y: per-mode division by 1 + alpha^2 lambda_k.
/// The filter pressure is never materialized; on the divergence-free basis
/// it is absorbed by the projection.
SpectralField apply_filter(const SpectralField& y, const FilterParams& p);

/// Checkable comparison quantities for the filtered field.
struct FilterBoundsReport {
    double z_l2 = 0.0;
    double y_l2 = 0.0;
    double z_v = 0.0;   // sobolev_norm(z, 1)
    double y_v = 0.0;   // sobolev_norm(y, 1)
    double weighted_lhs = 0.0;  // ||z||^2 + 2 alpha^2 ||z||_V^2
    double weighted_rhs = 0.0;  // ||y||^2
    /// min over the three inequalities of (rhs - lhs); >= -1e-12 always.
    double min_slack = 0.0;
};

FilterBoundsReport filter_bounds_report(const SpectralField& y, const FilterParams& p);

}  // namespace lal
