#pragma once

#include <Eigen/Dense>
#include <functional>

#include "lal/dynamics.hpp"

namespace lal {

/// Real coordinates of a conjugate-symmetric field: (Re u_k, Im u_k) per
/// canonical pair representative, in basis order. The map is an isometry
/// for the L2 norm. Dimension equals the mode count.
Eigen::VectorXd to_real_vector(const SpectralField& u);
SpectralField from_real_vector(const BasisPtr& basis, const Eigen::VectorXd& x);

/// P((z.grad) y) by direct triad summation over retained mode pairs.
/// Mathematically identical to the pseudospectral advect(); shares no code
/// with the transform path, so the two serve as mutual oracles.
SpectralField convolution_advect(const SpectralField& z, const SpectralField& y);

/// Classical RK4 on the semidiscrete Galerkin system with `substeps` fine
/// steps per grid interval; states are recorded at the grid nodes. The
/// right-hand side callback receives (t, x).
using OdeRhs = std::function<SpectralField(double, const SpectralField&)>;
Trajectory dense_rk4(const SpectralField& y0, const TimeGrid& g, int substeps, const OdeRhs& rhs);

/// RHS of the Oseen system -A y - B(h(t)) y + F(t) with the drift and the
/// projected control force interpolated linearly between grid samples.
/// Advection evaluated with convolution_advect.
OdeRhs oseen_rhs(const OseenDrift& h, const std::vector<SpectralField>& node_forces, const TimeGrid& g);

/// RHS of the Leray-alpha system -A y - B(filter(y)) y + F(t).
OdeRhs leray_rhs(const FilterParams& p, const std::vector<SpectralField>& node_forces, const TimeGrid& g);

/// Projected masked control at the grid nodes, P(mask v_n); input data for
/// the RK4 right-hand sides.
std::vector<SpectralField> node_forces(const ControlSignal& v, const BasisPtr& basis);

/// Closed form of this scheme's diagonal penalized Gramian entry for a
/// decoupled mode (h = 0, full mask, uniform weights): with
/// E = (1 - c lambda)/(1 + c lambda), S = 1/(1 + c lambda), c = dt/2,
/// the entry is dt S^2 (1 - E^{2M}) / (1 - E^2).
double discrete_diagonal_gramian(double lambda, const TimeGrid& g);

/// Continuous counterpart (1 - e^{-2 lambda T}) / (2 lambda).
double continuous_diagonal_gramian(double lambda, double horizon);

}  // namespace lal
