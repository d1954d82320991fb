#include "lal/control.hpp"

#include "lal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lal/errors.hpp"

namespace lal {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(ConfigError::Kind::constraint, what);
}

double carleman_time_weight(double t, double horizon, double s, int m) {
    const double denom = std::pow(t * (horizon - t), m);
    if (denom <= 0.0) return kWeightCap;
    return std::min(std::exp(s / denom), kWeightCap);
}

/// The penalized-HUM operator pieces shared by the CG and dense routes.
class PenalizedSystem {
  public:
    PenalizedSystem(const SpectralField& y0, const OseenDrift& h, const ControlMask& mask, const TimeGrid& g,
                    const WeightSpec& wspec, const Forcing* forcing)
        : basis_(y0.basis()), h_(h), mask_(mask), g_(g), weights_(make_weights(wspec, g)) {
        wbar_.resize(g.steps);
        for (int n = 0; n < g.steps; ++n) wbar_[n] = 0.5 * (weights_.w_v[n] + weights_.w_v[n + 1]);
        const ControlSignal zero = ControlSignal::zero(basis_->grid_size(), mask, g);
        free_ = simulate_oseen(y0, h, zero, g, forcing);
    }

    const Trajectory& free_run() const { return free_; }
    const SpectralField& free_terminal() const { return free_.back(); }
    const WeightProfile& weights() const { return weights_; }

    /// Midpoint control values of the datum mu: vbar_n = wbar^{-2} mask psibar_n
    /// with psi the adjoint of mu, entering the dynamics as P(mask vbar_n).
    std::vector<SpectralField> control_forces_of(const Trajectory& adjoint, double sign) const {
        std::vector<SpectralField> forces;
        forces.reserve(g_.steps);
        for (int n = 0; n < g_.steps; ++n) {
            SpectralField psibar = adjoint.states[n];
            psibar += adjoint.states[n + 1];
            psibar *= 0.5;
            GridField pg = to_grid(psibar);
            const double scale = sign / (wbar_[n] * wbar_[n]);
            for (size_t p = 0; p < pg.points(); ++p) {
                const double w2 = mask_.value(p) * mask_.value(p) * scale;
                pg.u1(p) *= w2;
                pg.u2(p) *= w2;
            }
            forces.push_back(to_spectral(pg, basis_));
        }
        return forces;
    }

    /// Lambda mu: terminal state of the forward sweep driven by the
    /// adjoint-derived control, from zero initial data.
    SpectralField apply_gramian(const SpectralField& mu) const {
        const Trajectory adjoint = simulate_adjoint(mu, h_, g_);
        const auto forces = control_forces_of(adjoint, +1.0);
        const Trajectory y = detail::oseen_sweep(SpectralField(basis_), h_, &forces, g_);
        return y.back();
    }

    /// Returned-signal construction from the solved datum: the adjoint of
    /// -mu gives phi with v_n = -w_v(t_n)^{-2} mask phi_n at the grid times.
    void finish(const SpectralField& mu, const SpectralField& y0, const Forcing* forcing, double epsilon,
                ControlSignal& v_out, Trajectory& state_out, Trajectory& adjoint_out, double& terminal_out,
                double& cost_out) const {
        SpectralField neg = mu;
        neg *= -1.0;
        adjoint_out = simulate_adjoint(neg, h_, g_);

        v_out.grid = g_;
        v_out.mask = mask_;
        v_out.values.clear();
        v_out.values.reserve(g_.steps + 1);
        for (int n = 0; n <= g_.steps; ++n) {
            GridField pg = mask_.apply(to_grid(adjoint_out.states[n]));
            pg *= -1.0 / (weights_.w_v[n] * weights_.w_v[n]);
            v_out.values.push_back(std::move(pg));
        }

        // Re-simulate honestly with the returned signal.
        SpectralField ic = y0;
        state_out = simulate_oseen(ic, h_, v_out, g_, forcing);
        terminal_out = l2_norm(state_out.back());

        double ctrl = 0.0;
        const double dt = g_.dt();
        for (int n = 0; n < g_.steps; ++n) {
            GridField vbar = v_out.values[n];
            vbar += v_out.values[n + 1];
            vbar *= 0.5;
            const double nn = grid_l2_norm(vbar);
            ctrl += dt * wbar_[n] * wbar_[n] * nn * nn;
        }
        cost_out = 0.5 * ctrl + terminal_out * terminal_out / (2.0 * epsilon);
    }

  private:
    BasisPtr basis_;
    const OseenDrift& h_;
    const ControlMask& mask_;
    TimeGrid g_;
    WeightProfile weights_;
    std::vector<double> wbar_;
    Trajectory free_;
};

struct IterateRecord {
    double cost;
    double terminal;
};

/// J_eps and the scheme-internal terminal norm of the CG iterate, free of
/// extra sweeps: Lambda mu = b - eps mu - r and y(T) = -(eps mu + r).
IterateRecord record_iterate(const SpectralField& mu, const SpectralField& r, const SpectralField& b, double eps) {
    SpectralField lm = b;
    lm.axpy(-eps, mu);
    lm -= r;
    const double ctrl = 0.5 * inner(mu, lm);
    SpectralField yT = mu;
    yT *= eps;
    yT += r;
    const double tn = l2_norm(yT);
    return {ctrl + tn * tn / (2.0 * eps), tn};
}

}  // namespace

WeightProfile make_weights(const WeightSpec& spec, const TimeGrid& g) {
    g.validate();
    WeightProfile w;
    w.grid = g;
    w.w_y.resize(g.steps + 1);
    w.w_v.resize(g.steps + 1);
    if (spec.kind == WeightSpec::Kind::uniform) {
        std::fill(w.w_y.begin(), w.w_y.end(), 1.0);
        std::fill(w.w_v.begin(), w.w_v.end(), 1.0);
        return w;
    }
    require(spec.s > 0.0, "carleman_time weight requires s > 0");
    require(spec.m == 1 || spec.m == 2, "carleman_time weight requires m in {1, 2}");
    const double half = 0.5 * g.dt();
    for (int n = 0; n <= g.steps; ++n) {
        const double t = std::clamp(g.time(n), half, g.horizon - half);
        w.w_v[n] = carleman_time_weight(t, g.horizon, spec.s, spec.m);
        w.w_y[n] = w.w_v[n];
    }
    return w;
}

void HUMConfig::validate() const {
    require(epsilon > 0.0 && epsilon <= 1.0, "hum epsilon must lie in (0, 1]");
    require(cg_tol >= 1e-14 && cg_tol <= 1e-2, "hum cg_tol must lie in [1e-14, 1e-2]");
    require(cg_max >= 1, "hum cg_max must be >= 1");
}

HUMResult hum_solve(const SpectralField& y0, const OseenDrift& h, const HUMConfig& cfg, const ControlMask& mask,
                    const TimeGrid& g, const Forcing* forcing) {
    cfg.validate();
    require(mask.grid_size() == y0.basis()->grid_size(), "mask grid mismatch");
    const PenalizedSystem sys(y0, h, mask, g, cfg.weight_spec, forcing);

    HUMResult res;
    SpectralField b = sys.free_terminal();
    b *= -1.0;
    const double bnorm = l2_norm(b);
    if (bnorm == 0.0) {
        res.v = ControlSignal::zero(y0.basis()->grid_size(), mask, g);
        res.state = sys.free_run();
        res.adjoint = Trajectory{g, std::vector<SpectralField>(g.steps + 1, SpectralField(y0.basis()))};
        res.terminal_norm = 0.0;
        res.cost = 0.0;
        res.cg_iters = 0;
        res.cost_history = {0.0};
        res.terminal_history = {0.0};
        return res;
    }

    // CG minimizes J_eps itself: with the Gramian Lambda the cost is the
    // quadratic with Hessian H = (1/eps) Lambda (Lambda + eps I) and linear
    // term -(1/eps) Lambda b, so CG on H mu = (1/eps) Lambda b makes the
    // recorded J values nonincreasing by the nested-subspace property.
    // Lambda mu is tracked incrementally to price each iterate for free.
    const double eps = cfg.epsilon;
    SpectralField rhs = sys.apply_gramian(b);
    rhs *= 1.0 / eps;
    const double rhsnorm = l2_norm(rhs);

    SpectralField mu(y0.basis());
    SpectralField w(y0.basis());  // Lambda mu
    SpectralField r = rhs;
    SpectralField d = r;
    double rr = inner(r, r);

    auto rec0 = record_iterate(mu, w, b, eps);
    res.cost_history.push_back(rec0.cost);
    res.terminal_history.push_back(rec0.terminal);
    SpectralField mu_best = mu;
    double best_terminal = rec0.terminal;

    res.converged = rhsnorm == 0.0;  // nothing reachable from omega
    int it = 0;
    while (!res.converged && it < cfg.cg_max) {
        const SpectralField t = sys.apply_gramian(d);
        SpectralField s = t;
        s.axpy(eps, d);
        SpectralField q = sys.apply_gramian(s);
        q *= 1.0 / eps;
        const double dq = inner(d, q);
        if (dq <= 0.0) break;  // numerically exhausted search direction
        const double alpha = rr / dq;
        mu.axpy(alpha, d);
        w.axpy(alpha, t);
        r.axpy(-alpha, q);
        ++it;

        const auto rec = record_iterate(mu, w, b, eps);
        if (rec.cost > res.cost_history.back() * (1.0 + 1e-9) + 1e-300) {
            std::ostringstream os;
            os << "penalized cost increased across CG iterations (" << res.cost_history.back() << " -> " << rec.cost
               << " at iterate " << it << ")";
            throw PropertyViolation(os.str());
        }
        res.cost_history.push_back(rec.cost);
        res.terminal_history.push_back(rec.terminal);
        if (rec.terminal <= best_terminal) {
            best_terminal = rec.terminal;
            mu_best = mu;
        }

        const double rnew = inner(r, r);
        if (std::sqrt(rnew) <= cfg.cg_tol * rhsnorm) {
            res.converged = true;
            rr = rnew;
            break;
        }
        const double beta = rnew / rr;
        SpectralField nd = r;
        nd.axpy(beta, d);
        d = std::move(nd);
        rr = rnew;
    }
    res.cg_iters = it;
    res.cg_residual = rhsnorm > 0.0 ? std::sqrt(inner(r, r)) / rhsnorm : 0.0;

    sys.finish(mu_best, y0, forcing, eps, res.v, res.state, res.adjoint, res.terminal_norm, res.cost);
    return res;
}

GramianResult gramian_control(const SpectralField& y0, const OseenDrift& h, double epsilon, const ControlMask& mask,
                              const TimeGrid& g, const WeightSpec& wspec, const Forcing* forcing) {
    require(epsilon > 0.0 && epsilon <= 1.0, "gramian epsilon must lie in (0, 1]");
    const int m = y0.basis()->size();
    if (m > 64)
        throw ConfigError(ConfigError::Kind::constraint,
                          "basis too large for the dense Gramian oracle (limit 64 modes)");
    const PenalizedSystem sys(y0, h, mask, g, wspec, forcing);

    GramianResult res;
    res.gramian.resize(m, m);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j] = 1.0;
        res.gramian.col(j) = to_real_vector(sys.apply_gramian(from_real_vector(y0.basis(), e)));
    }

    res.symmetry_error = (res.gramian - res.gramian.transpose()).cwiseAbs().maxCoeff();
    if (res.symmetry_error > 1e-10) {
        std::ostringstream os;
        os << "assembled Gramian is not symmetric: max asymmetry " << res.symmetry_error;
        throw PropertyViolation(os.str());
    }
    const Eigen::MatrixXd sym = 0.5 * (res.gramian + res.gramian.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    if (res.min_eigenvalue < -1e-12) {
        std::ostringstream os;
        os << "assembled Gramian has eigenvalue " << res.min_eigenvalue << " below -1e-12";
        throw PropertyViolation(os.str());
    }

    Eigen::MatrixXd system = sym;
    system.diagonal().array() += epsilon;
    const Eigen::VectorXd rhs = -to_real_vector(sys.free_terminal());
    const Eigen::VectorXd mu = Eigen::LDLT<Eigen::MatrixXd>(system).solve(rhs);

    sys.finish(from_real_vector(y0.basis(), mu), y0, forcing, epsilon, res.v, res.state, res.adjoint,
               res.terminal_norm, res.cost);
    return res;
}

ControlBoundReport control_bound_report(const ControlSignal& v, const OseenDrift& h, const SpectralField& y0) {
    const double y0n = l2_norm(y0);
    require(y0n > 0.0, "control_bound_report requires ||y0|| > 0");
    ControlBoundReport rep;
    rep.linf_l2 = v.linf_l2();
    rep.drift_sup = h.sup_inf();
    if (rep.linf_l2 == 0.0) {
        rep.unbounded_below = true;
        rep.fitted_k = -std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.fitted_k = std::log(rep.linf_l2 / y0n) / (1.0 + rep.drift_sup * rep.drift_sup);
    return rep;
}

}  // namespace lal
