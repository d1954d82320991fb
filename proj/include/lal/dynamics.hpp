#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lal/field.hpp"
#include "lal/filter.hpp"
#include "lal/transforms.hpp"

namespace lal {

/// Uniform partition of [0, T] into M steps.
struct TimeGrid {
    double horizon = 1.0;  // T
    int steps = 2;         // M

    double dt() const { return horizon / steps; }
    double time(int n) const { return (static_cast<double>(n) * horizon) / steps; }
    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

/// Time-sampled sequence of spectral states on [0, T]; index 0..M.
struct Trajectory {
    TimeGrid grid;
    std::vector<SpectralField> states;

    const SpectralField& front() const { return states.front(); }
    const SpectralField& back() const { return states.back(); }
    int size() const { return static_cast<int>(states.size()); }

    double sup_l2() const;
    double sup_sobolev(double r) const;
};

/// Transported drift field for the Oseen system; same sampling as Trajectory.
struct OseenDrift {
    TimeGrid grid;
    std::vector<SpectralField> fields;

    static OseenDrift zero(const BasisPtr& basis, const TimeGrid& g);
    /// h_n = filter(y_n): the Leray-alpha closure of a state trajectory.
    static OseenDrift filtered(const Trajectory& tr, const FilterParams& p);

    double sup_l2() const;
    /// sup_t sup_x |h(t,x)|; renders each sample (used for Thm 2.7 reports).
    double sup_inf() const;
};

/// L2(Q) distance between two trajectories on the same grid (trapezoidal
/// time quadrature of squared spectral L2 norms).
double l2q_distance(const Trajectory& a, const Trajectory& b);
double l2q_norm(const Trajectory& a);

/// Values in [0,1] marking the control region omega.
class ControlMask {
  public:
    ControlMask() = default;

    /// Axis-aligned rectangle [x0,x1] x [y0,y1] in [0,2pi)^2 with an
    /// optional cosine roll-off band of the given width on each side.
    static ControlMask rectangle(int grid_size, double x0, double x1, double y0, double y1, double rolloff = 0.0);
    static ControlMask full(int grid_size);

    int grid_size() const { return n_; }
    double value(size_t p) const { return w_[p]; }
    const std::vector<double>& values() const { return w_; }

    /// mask * g, pointwise.
    GridField apply(const GridField& g) const;

  private:
    int n_ = 0;
    std::vector<double> w_;
};

/// Time-sampled physical-space control supported in omega.
struct ControlSignal {
    TimeGrid grid;
    std::vector<GridField> values;  // index 0..M
    ControlMask mask;

    static ControlSignal zero(int grid_size, const ControlMask& mask, const TimeGrid& g);

    bool is_zero() const;
    /// max_n ||v_n||_{L2}; equals the L-infinity(L2(omega)) norm since the
    /// control vanishes off omega.
    double linf_l2() const;
    /// sup norm of the off-support part, relative to the signal's own sup.
    double off_support_ratio() const;
};

/// P((z.grad) y), computed pseudospectrally with full dealiasing on the
/// retained band, then truncated. Exactly skew in its second argument:
/// (advect(z,y), y) = 0 up to rounding, for any divergence-free z.
SpectralField advect(const SpectralField& z, const SpectralField& y);

/// Variant with the drift already rendered on the grid.
SpectralField advect_cached(const GridField& drift, const SpectralField& y, const BasisPtr& basis);

/// Volumetric forcing at grid times (used by the trajectory-tracking loop).
using Forcing = std::vector<SpectralField>;

/// Per-iteration hook replacing the Helmholtz filter inside simulate_leray
/// (test instrumentation; production callers leave it unset).
using FilterHook = std::function<SpectralField(const SpectralField&)>;

/// Semi-Galerkin Leray-alpha flow. Crank-Nicolson implicit midpoint: the
/// advecting field is the Helmholtz filter of the midpoint state, so the
/// discrete energy identity is exact and ||y_n|| decays monotonically when
/// v = 0. Second order. Throws SimulationError on blow-up, non-finite
/// states, or a time step violating dt <= 0.5 / max(1, sup|z|).
Trajectory simulate_leray(const SpectralField& y0, const ControlSignal& v, const FilterParams& p, const TimeGrid& g,
                          const FilterHook* filter_hook = nullptr);

/// Frozen-drift Oseen flow, same scheme with the drift supplied externally
/// (midpoint averages of the stored samples). Linear in (y0, v, forcing).
Trajectory simulate_oseen(const SpectralField& y0, const OseenDrift& h, const ControlSignal& v, const TimeGrid& g,
                          const Forcing* forcing = nullptr);

namespace detail {
/// Forward Oseen sweep driven by precomputed per-interval midpoint forces
/// F_n (the control module assembles these directly from adjoint states).
Trajectory oseen_sweep(const SpectralField& y0, const OseenDrift& h, const std::vector<SpectralField>* forces,
                       const TimeGrid& g);
}  // namespace detail

/// Backwards adjoint flow, the exact discrete transpose of simulate_oseen:
/// (y(T), phi_T) - (y0, phi(0)) = sum_n dt (mask vbar_n, phibar_n) holds to
/// solver tolerance for every (y0, v, phi_T), where bars are interval
/// midpoint averages.
Trajectory simulate_adjoint(const SpectralField& phi_T, const OseenDrift& h, const TimeGrid& g);

/// Variation-of-constants reconstruction: exact semigroup factors,
/// trapezoidal quadrature, Picard iteration over the whole trajectory.
/// Independent discretization used to cross-validate simulate_oseen.
Trajectory duhamel_reconstruct(const SpectralField& y0, const OseenDrift& h, const ControlSignal& v,
                               const TimeGrid& g);

struct EnergyReport {
    std::vector<double> residuals;  // r_n per step
    double max_abs_residual = 0.0;
    double cumulative_dissipation = 0.0;  // sum dt ||grad ybar||^2
    double sup_l2 = 0.0;
    double sup_v = 0.0;
    double l2_v_norm = 0.0;       // ||y||_{L2(V)}, trapezoid
    double b0 = 0.0;              // ||y0|| + ||mask v||_{L2(H^-1)}
    double dyt_vprime_l2 = 0.0;   // ||y_t||_{L2(V')}, discrete differences
    bool monotone_l2 = true;      // with the 1e-12 relative allowance
};

/// Discrete energy balance per step:
///   r_n = (||y_{n+1}||^2 - ||y_n||^2) / (2 dt) + ||grad ybar||^2 - (F_n, ybar),
/// F_n the projected masked control average. The scheme guarantees
/// |r_n| <= 1e-8 ||y0||^2 when v = 0 (the a priori constants of the
/// continuous estimates are unspecified, so they are reported, not checked).
EnergyReport energy_report(const Trajectory& tr, const ControlSignal& v, const FilterParams& p);

struct RegularizationReport {
    double measure = 0.0;     // |R_alpha(k, tau)|, step counting
    double bound = 0.0;       // tau/k - dt
    double threshold = 0.0;   // (k/tau) ||y0||^2
    double first_time = 0.0;  // earliest t with ||y(t)||_{D(A)}^2 <= phi; NaN if none
    double phi_value = 0.0;
    double min_da2 = 0.0;     // min over [0, T/2] of ||y||_{D(A)}^2
    double fitted_c0 = 0.0;   // C0 that would make phi touch min_da2
};

/// Occupation measure of R(k,tau) = { t in [0,tau] : ||grad y(t)||^2 <=
/// (k/tau) ||y0||^2 } for an uncontrolled trajectory. Throws
/// PropertyViolation when the measure bound tau/k - dt fails.
RegularizationReport regularization_times(const Trajectory& tr, double k, double tau, double c0 = 1.0);

}  // namespace lal
