#pragma once

#include <Eigen/Dense>

#include "lal/dynamics.hpp"

namespace lal {

/// Time-weight family for the penalized control problem. `uniform` is
/// w = 1; `carleman_time` is w(t) = exp(s / (t (T - t))^m), the time-only
/// stand-in for the Carleman weights: it blows up at both endpoints, which
/// suppresses the control there. Values are capped at 1e12.
struct WeightSpec {
    enum class Kind { uniform, carleman_time };
    Kind kind = Kind::uniform;
    double s = 1.0;
    int m = 1;
};

/// Weights sampled at the grid times. The endpoint samples use the
/// half-step times dt/2 and T - dt/2, where the carleman_time formula is
/// finite (then capped).
struct WeightProfile {
    TimeGrid grid;
    std::vector<double> w_y;
    std::vector<double> w_v;
};

inline constexpr double kWeightCap = 1e12;

WeightProfile make_weights(const WeightSpec& spec, const TimeGrid& g);

struct HUMConfig {
    double epsilon = 1e-4;  // terminal penalty, in (0, 1]
    double cg_tol = 1e-10;  // relative residual, in [1e-14, 1e-2]
    int cg_max = 200;
    WeightSpec weight_spec;

    void validate() const;
};

struct HUMResult {
    ControlSignal v;
    double terminal_norm = 0.0;  // ||y(T)|| of the re-simulated controlled run
    int cg_iters = 0;
    double cost = 0.0;  // J_eps of the returned control
    bool converged = true;
    double cg_residual = 0.0;
    std::vector<double> cost_history;      // J_eps per CG iterate
    std::vector<double> terminal_history;  // ||y(T)|| per CG iterate
    Trajectory state;    // controlled Oseen trajectory under the returned control
    Trajectory adjoint;  // phi with v_n = -w_v(t_n)^{-2} mask phi_n
};

/// Penalized Hilbert Uniqueness Method for the frozen-drift Oseen system:
/// minimizes J_eps(v) = 1/2 sum_n dt w_n^2 ||vbar_n||^2 + 1/(2 eps) ||y(T)||^2
/// by conjugate gradient on the terminal adjoint datum, i.e. CG applied to
/// (Lambda + eps I) mu = -y_free(T) where Lambda is the weighted
/// controllability Gramian realized by one backward and one forward sweep.
/// The returned control is v_n = -w_v(t_n)^{-2} mask phi_n with phi the
/// adjoint trajectory of the best iterate.
HUMResult hum_solve(const SpectralField& y0, const OseenDrift& h, const HUMConfig& cfg, const ControlMask& mask,
                    const TimeGrid& g, const Forcing* forcing = nullptr);

struct GramianResult {
    ControlSignal v;
    double terminal_norm = 0.0;
    double cost = 0.0;
    Trajectory state;
    Trajectory adjoint;
    Eigen::MatrixXd gramian;      // dense Lambda in real pair coordinates
    double symmetry_error = 0.0;  // max |Lambda - Lambda^T|
    double min_eigenvalue = 0.0;
};

/// Dense oracle for the same penalized problem: assembles the Gramian by
/// running the sweeps on every basis vector of the terminal datum space,
/// asserts symmetry (<= 1e-10) and positive semidefiniteness (eigenvalues
/// >= -1e-12), and solves (Lambda + eps I) by LDLT. Basis size <= 64.
GramianResult gramian_control(const SpectralField& y0, const OseenDrift& h, double epsilon, const ControlMask& mask,
                              const TimeGrid& g, const WeightSpec& weights = {}, const Forcing* forcing = nullptr);

struct ControlBoundReport {
    double linf_l2 = 0.0;
    double drift_sup = 0.0;  // ||h||_{L^inf(Q)}
    double fitted_k = 0.0;   // log(linf_l2 / ||y0||) / (1 + drift_sup^2)
    bool unbounded_below = false;  // v = 0: fitted_k = -inf sentinel
};

/// Fits the constant of the Oseen control bound
/// ||v||_{L^inf(L2)} <= e^{K (1 + ||h||_inf^2)} ||y0||; reported, never
/// asserted (K is an unspecified constant of the domain and horizon).
ControlBoundReport control_bound_report(const ControlSignal& v, const OseenDrift& h, const SpectralField& y0);

}  // namespace lal
