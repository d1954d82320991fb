#pragma once

#include "lal/field.hpp"

namespace lal {

/// Inverse transform: renders the spectral field on the N x N grid.
/// Exact (to rounding) for band-limited fields; round-trips with
/// to_spectral to ~1e-15 relative.
GridField to_grid(const SpectralField& u);

/// Renders the partial derivative d/dx_axis of u on the grid (axis 0 or 1).
GridField to_grid_derivative(const SpectralField& u, int axis);

/// Forward transform, Leray projection (per-mode removal of the component
/// parallel to k) and truncation to the retained band. Idempotent on
/// renderings of fields already in the basis.
SpectralField to_spectral(const GridField& g, const BasisPtr& basis);

}  // namespace lal
