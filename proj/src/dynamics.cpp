#include "lal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lal/errors.hpp"

namespace lal {

namespace {

constexpr double kPicardTol = 1e-14;
constexpr int kPicardMaxSweeps = 64;
constexpr double kBlowupFactor = 1e6;

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(ConfigError::Kind::constraint, what);
}

SpectralField average(const SpectralField& a, const SpectralField& b) {
    SpectralField m = a;
    m += b;
    m *= 0.5;
    return m;
}

GridField average(const GridField& a, const GridField& b) {
    GridField m = a;
    m += b;
    m *= 0.5;
    return m;
}

/// Solves (I + c A + sign * c B(drift)) m = rhs with the diagonal part
/// exact and the advection handled by Picard sweeps. For the Leray system
/// the drift is filter(m), re-filtered every sweep, so the converged step
/// uses the self-consistent midpoint closure.
SpectralField solve_midpoint(const SpectralField& rhs, double c, double sign, const GridField* fixed_drift,
                             const FilterParams* leray, const FilterHook* hook, double dt, int step) {
    const auto& basis = rhs.basis();
    const auto& lam = basis->eigenvalues();
    std::vector<double> dinv(lam.size());
    for (size_t j = 0; j < lam.size(); ++j) dinv[j] = 1.0 / (1.0 + c * lam[j]);

    auto precondition = [&](SpectralField f) {
        for (int j = 0; j < f.size(); ++j) f[j] *= dinv[j];
        return f;
    };

    SpectralField m = precondition(rhs);
    const double scale = std::max(l2_norm(m), 1e-300);

    double prev_diff = std::numeric_limits<double>::infinity();
    int grew = 0;
    for (int sweep = 0; sweep < kPicardMaxSweeps; ++sweep) {
        SpectralField adv(basis);
        double drift_sup = 0.0;
        if (fixed_drift != nullptr) {
            adv = advect_cached(*fixed_drift, m, basis);
            if (sweep == 0) drift_sup = fixed_drift->sup_norm();
        } else {
            const SpectralField z = hook ? (*hook)(m) : apply_filter(m, *leray);
            const GridField zg = to_grid(z);
            if (sweep == 0) drift_sup = zg.sup_norm();
            adv = advect_cached(zg, m, basis);
        }
        if (sweep == 0 && dt > 0.5 / std::max(1.0, drift_sup)) {
            std::ostringstream os;
            os << "time step " << dt << " exceeds the advection accuracy bound 0.5/max(1, sup|z|) with sup|z|="
               << drift_sup << " at step " << step;
            throw SimulationError(step, os.str());
        }

        SpectralField next = rhs;
        next.axpy(-sign * c, adv);
        next = precondition(next);

        SpectralField delta = next;
        delta -= m;
        const double diff = l2_norm(delta);
        m = std::move(next);
        if (diff <= kPicardTol * std::max(scale, l2_norm(m))) return m;
        if (diff > prev_diff) {
            if (++grew >= 3) {
                std::ostringstream os;
                os << "midpoint Picard iteration diverging at step " << step
                   << " (dt too large for the advecting field)";
                throw SimulationError(step, os.str());
            }
        } else {
            grew = 0;
        }
        prev_diff = diff;
    }
    std::ostringstream os;
    os << "midpoint Picard iteration failed to converge in " << kPicardMaxSweeps << " sweeps at step " << step;
    throw SimulationError(step, os.str());
}

void check_state(const SpectralField& y, double guard_scale, int step) {
    if (!y.finite()) {
        std::ostringstream os;
        os << "non-finite state at step " << step;
        throw SimulationError(step, os.str());
    }
    const double n = l2_norm(y);
    if (n > kBlowupFactor * guard_scale) {
        std::ostringstream os;
        os << "blow-up guard tripped at step " << step << ": ||y|| = " << n << " > 1e6 * " << guard_scale;
        throw SimulationError(step, os.str());
    }
}

/// Projected masked control averages, F_n = P(mask (v_n + v_{n+1})/2),
/// n = 0..M-1. Empty when the signal is identically zero.
std::vector<SpectralField> control_forces(const ControlSignal& v, const BasisPtr& basis) {
    std::vector<SpectralField> forces;
    if (v.is_zero()) return forces;
    forces.reserve(v.grid.steps);
    for (int n = 0; n < v.grid.steps; ++n) {
        const GridField vbar = average(v.values[n], v.values[n + 1]);
        forces.push_back(to_spectral(v.mask.apply(vbar), basis));
    }
    return forces;
}

double guard_scale_for(const SpectralField& y0, const ControlSignal& v, const Forcing* forcing) {
    double s = l2_norm(y0);
    if (!v.is_zero())
        for (const auto& g : v.values) s = std::max(s, grid_l2_norm(g));
    if (forcing != nullptr)
        for (const auto& f : *forcing) s = std::max(s, l2_norm(f));
    return std::max(s, 1e-30);
}

}  // namespace

void TimeGrid::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError(ConfigError::Kind::constraint, "time horizon must be positive and finite");
    if (steps < 2) throw ConfigError(ConfigError::Kind::constraint, "time grid needs at least 2 steps");
}

double Trajectory::sup_l2() const {
    double s = 0.0;
    for (const auto& y : states) s = std::max(s, l2_norm(y));
    return s;
}

double Trajectory::sup_sobolev(double r) const {
    double s = 0.0;
    for (const auto& y : states) s = std::max(s, sobolev_norm(y, r));
    return s;
}

OseenDrift OseenDrift::zero(const BasisPtr& basis, const TimeGrid& g) {
    OseenDrift h;
    h.grid = g;
    h.fields.assign(g.steps + 1, SpectralField(basis));
    return h;
}

OseenDrift OseenDrift::filtered(const Trajectory& tr, const FilterParams& p) {
    OseenDrift h;
    h.grid = tr.grid;
    h.fields.reserve(tr.states.size());
    for (const auto& y : tr.states) h.fields.push_back(apply_filter(y, p));
    return h;
}

double OseenDrift::sup_l2() const {
    double s = 0.0;
    for (const auto& f : fields) s = std::max(s, l2_norm(f));
    return s;
}

double OseenDrift::sup_inf() const {
    double s = 0.0;
    for (const auto& f : fields) s = std::max(s, to_grid(f).sup_norm());
    return s;
}

double l2q_distance(const Trajectory& a, const Trajectory& b) {
    require(a.grid == b.grid && a.states.size() == b.states.size(), "trajectories must share a time grid");
    const double dt = a.grid.dt();
    double acc = 0.0;
    for (size_t n = 0; n < a.states.size(); ++n) {
        SpectralField d = a.states[n];
        d -= b.states[n];
        const double w = (n == 0 || n + 1 == a.states.size()) ? 0.5 : 1.0;
        const double nn = l2_norm(d);
        acc += w * dt * nn * nn;
    }
    return std::sqrt(acc);
}

double l2q_norm(const Trajectory& a) {
    const double dt = a.grid.dt();
    double acc = 0.0;
    for (size_t n = 0; n < a.states.size(); ++n) {
        const double w = (n == 0 || n + 1 == a.states.size()) ? 0.5 : 1.0;
        const double nn = l2_norm(a.states[n]);
        acc += w * dt * nn * nn;
    }
    return std::sqrt(acc);
}

ControlMask ControlMask::rectangle(int grid_size, double x0, double x1, double y0, double y1, double rolloff) {
    require(grid_size >= 2, "mask grid size too small");
    require(x0 < x1 && y0 < y1, "mask rectangle must have positive extent");
    require(rolloff >= 0.0, "mask roll-off width must be >= 0");
    ControlMask m;
    m.n_ = grid_size;
    m.w_.assign(static_cast<size_t>(grid_size) * grid_size, 0.0);

    auto profile = [&](double t, double a, double b) {
        if (t < a || t > b) return 0.0;
        if (rolloff <= 0.0) return 1.0;
        const double din = std::min(t - a, b - t);
        if (din >= rolloff) return 1.0;
        return 0.5 * (1.0 - std::cos(std::numbers::pi * din / rolloff));
    };

    const double h = 2.0 * std::numbers::pi / grid_size;
    bool any = false;
    for (int i = 0; i < grid_size; ++i) {
        for (int j = 0; j < grid_size; ++j) {
            const double w = profile(i * h, x0, x1) * profile(j * h, y0, y1);
            m.w_[static_cast<size_t>(i) * grid_size + j] = w;
            any = any || w > 0.0;
        }
    }
    require(any, "control mask has empty support on the grid");
    return m;
}

ControlMask ControlMask::full(int grid_size) {
    ControlMask m;
    m.n_ = grid_size;
    m.w_.assign(static_cast<size_t>(grid_size) * grid_size, 1.0);
    return m;
}

GridField ControlMask::apply(const GridField& g) const {
    require(g.grid_size() == n_, "mask grid size mismatch");
    GridField out = g;
    for (size_t p = 0; p < w_.size(); ++p) {
        out.u1(p) *= w_[p];
        out.u2(p) *= w_[p];
    }
    return out;
}

ControlSignal ControlSignal::zero(int grid_size, const ControlMask& mask, const TimeGrid& g) {
    ControlSignal v;
    v.grid = g;
    v.mask = mask;
    v.values.assign(g.steps + 1, GridField(grid_size));
    return v;
}

bool ControlSignal::is_zero() const {
    for (const auto& g : values)
        for (size_t p = 0; p < g.points(); ++p)
            if (g.u1(p) != 0.0 || g.u2(p) != 0.0) return false;
    return true;
}

double ControlSignal::linf_l2() const {
    double s = 0.0;
    for (const auto& g : values) s = std::max(s, grid_l2_norm(g));
    return s;
}

double ControlSignal::off_support_ratio() const {
    double off = 0.0, all = 0.0;
    for (const auto& g : values) {
        for (size_t p = 0; p < g.points(); ++p) {
            const double mag = std::sqrt(g.u1(p) * g.u1(p) + g.u2(p) * g.u2(p));
            all = std::max(all, mag);
            if (mask.value(p) == 0.0) off = std::max(off, mag);
        }
    }
    return all > 0.0 ? off / all : 0.0;
}

SpectralField advect(const SpectralField& z, const SpectralField& y) {
    require(z.basis()->same_as(*y.basis()), "advect arguments must share a basis");
    return advect_cached(to_grid(z), y, y.basis());
}

SpectralField advect_cached(const GridField& drift, const SpectralField& y, const BasisPtr& basis) {
    const GridField d1 = to_grid_derivative(y, 0);  // (d1 y1, d1 y2)
    const GridField d2 = to_grid_derivative(y, 1);  // (d2 y1, d2 y2)
    GridField w(drift.grid_size());
    for (size_t p = 0; p < w.points(); ++p) {
        w.u1(p) = drift.u1(p) * d1.u1(p) + drift.u2(p) * d2.u1(p);
        w.u2(p) = drift.u1(p) * d1.u2(p) + drift.u2(p) * d2.u2(p);
    }
    return to_spectral(w, basis);
}

Trajectory simulate_leray(const SpectralField& y0, const ControlSignal& v, const FilterParams& p, const TimeGrid& g,
                          const FilterHook* filter_hook) {
    g.validate();
    require(v.grid == g, "control signal grid mismatch");
    require(v.mask.grid_size() == y0.basis()->grid_size(), "control mask grid mismatch");

    const double dt = g.dt();
    const double c = 0.5 * dt;
    const auto forces = control_forces(v, y0.basis());
    const double guard = guard_scale_for(y0, v, nullptr);

    Trajectory tr;
    tr.grid = g;
    tr.states.reserve(g.steps + 1);
    tr.states.push_back(y0);
    for (int n = 0; n < g.steps; ++n) {
        SpectralField rhs = tr.states.back();
        if (!forces.empty()) rhs.axpy(c, forces[n]);
        const SpectralField mid = solve_midpoint(rhs, c, +1.0, nullptr, &p, filter_hook, dt, n);
        SpectralField next = mid;
        next *= 2.0;
        next -= tr.states.back();
        next.canonicalize_zeros();
        check_state(next, guard, n + 1);
        tr.states.push_back(std::move(next));
    }
    return tr;
}

namespace {

Trajectory oseen_sweep_impl(const SpectralField& y0, const OseenDrift& h, const std::vector<SpectralField>* forces,
                            const TimeGrid& g, double guard) {
    const double dt = g.dt();
    const double c = 0.5 * dt;
    Trajectory tr;
    tr.grid = g;
    tr.states.reserve(g.steps + 1);
    tr.states.push_back(y0);
    for (int n = 0; n < g.steps; ++n) {
        const GridField hbar = to_grid(average(h.fields[n], h.fields[n + 1]));
        SpectralField rhs = tr.states.back();
        if (forces != nullptr) rhs.axpy(c, (*forces)[n]);
        const SpectralField mid = solve_midpoint(rhs, c, +1.0, &hbar, nullptr, nullptr, dt, n);
        SpectralField next = mid;
        next *= 2.0;
        next -= tr.states.back();
        next.canonicalize_zeros();
        check_state(next, guard, n + 1);
        tr.states.push_back(std::move(next));
    }
    return tr;
}

}  // namespace

namespace detail {

Trajectory oseen_sweep(const SpectralField& y0, const OseenDrift& h, const std::vector<SpectralField>* forces,
                       const TimeGrid& g) {
    g.validate();
    require(h.grid == g && static_cast<int>(h.fields.size()) == g.steps + 1, "drift grid mismatch");
    require(forces == nullptr || static_cast<int>(forces->size()) == g.steps, "force sequence length mismatch");
    double guard = l2_norm(y0);
    if (forces != nullptr)
        for (const auto& f : *forces) guard = std::max(guard, l2_norm(f));
    return oseen_sweep_impl(y0, h, forces, g, std::max(guard, 1e-30));
}

}  // namespace detail

Trajectory simulate_oseen(const SpectralField& y0, const OseenDrift& h, const ControlSignal& v, const TimeGrid& g,
                          const Forcing* forcing) {
    g.validate();
    require(h.grid == g && static_cast<int>(h.fields.size()) == g.steps + 1, "drift grid mismatch");
    require(v.grid == g, "control signal grid mismatch");
    require(forcing == nullptr || static_cast<int>(forcing->size()) == g.steps + 1, "forcing length mismatch");

    auto forces = control_forces(v, y0.basis());
    if (forcing != nullptr) {
        if (forces.empty()) forces.assign(g.steps, SpectralField(y0.basis()));
        for (int n = 0; n < g.steps; ++n) {
            forces[n].axpy(0.5, (*forcing)[n]);
            forces[n].axpy(0.5, (*forcing)[n + 1]);
        }
    }
    const double guard = guard_scale_for(y0, v, forcing);
    return oseen_sweep_impl(y0, h, forces.empty() ? nullptr : &forces, g, guard);
}

Trajectory simulate_adjoint(const SpectralField& phi_T, const OseenDrift& h, const TimeGrid& g) {
    g.validate();
    require(h.grid == g && static_cast<int>(h.fields.size()) == g.steps + 1, "drift grid mismatch");

    const double dt = g.dt();
    const double c = 0.5 * dt;
    const double guard = std::max(l2_norm(phi_T), 1e-30);

    Trajectory tr;
    tr.grid = g;
    tr.states.assign(g.steps + 1, SpectralField(phi_T.basis()));
    tr.states[g.steps] = phi_T;
    for (int n = g.steps - 1; n >= 0; --n) {
        const GridField hbar = to_grid(average(h.fields[n], h.fields[n + 1]));
        const SpectralField mid = solve_midpoint(tr.states[n + 1], c, -1.0, &hbar, nullptr, nullptr, dt, n);
        SpectralField prev = mid;
        prev *= 2.0;
        prev -= tr.states[n + 1];
        prev.canonicalize_zeros();
        check_state(prev, guard, n);
        tr.states[n] = std::move(prev);
    }
    return tr;
}

Trajectory duhamel_reconstruct(const SpectralField& y0, const OseenDrift& h, const ControlSignal& v,
                               const TimeGrid& g) {
    g.validate();
    require(h.grid == g && static_cast<int>(h.fields.size()) == g.steps + 1, "drift grid mismatch");
    require(v.grid == g, "control signal grid mismatch");

    const auto& basis = y0.basis();
    const int M = g.steps;
    const double dt = g.dt();
    const auto& lam = basis->eigenvalues();
    std::vector<double> decay(lam.size());
    for (size_t j = 0; j < lam.size(); ++j) decay[j] = std::exp(-dt * lam[j]);

    // Node forcings independent of the iterate: P(mask v_n).
    std::vector<SpectralField> fv(M + 1, SpectralField(basis));
    if (!v.is_zero())
        for (int n = 0; n <= M; ++n) fv[n] = to_spectral(v.mask.apply(v.values[n]), basis);

    std::vector<GridField> hg;
    hg.reserve(M + 1);
    for (int n = 0; n <= M; ++n) hg.push_back(to_grid(h.fields[n]));

    // Free part e^{-t_n A} y0.
    std::vector<SpectralField> freepart(M + 1, y0);
    for (int n = 1; n <= M; ++n) {
        freepart[n] = freepart[n - 1];
        for (int j = 0; j < freepart[n].size(); ++j) freepart[n][j] *= decay[j];
    }

    Trajectory tr;
    tr.grid = g;
    tr.states = freepart;  // Picard start: pure semigroup

    const double scale = std::max({l2_norm(y0), v.linf_l2(), 1e-300});
    for (int sweep = 0; sweep < 100; ++sweep) {
        // G_n = -B(h_n) y_n + P(mask v_n) at the nodes of the current iterate.
        std::vector<SpectralField> forcing;
        forcing.reserve(M + 1);
        for (int n = 0; n <= M; ++n) {
            SpectralField gn = advect_cached(hg[n], tr.states[n], basis);
            gn *= -1.0;
            gn += fv[n];
            forcing.push_back(std::move(gn));
        }

        // Incremental trapezoid: J_n = e^{-dt A}(J_{n-1} + dt/2 G_{n-1}) + dt/2 G_n,
        // where J_{n-1} already carries G_{n-1} at half weight, so the extra
        // half upgrades it to an interior node.
        std::vector<SpectralField> next(M + 1, SpectralField(basis));
        next[0] = y0;
        SpectralField acc(basis);
        double diff = 0.0;
        for (int n = 1; n <= M; ++n) {
            acc.axpy(0.5 * dt, forcing[n - 1]);
            for (int j = 0; j < acc.size(); ++j) acc[j] *= decay[j];
            acc.axpy(0.5 * dt, forcing[n]);
            SpectralField yn = freepart[n];
            yn += acc;
            SpectralField d = yn;
            d -= tr.states[n];
            diff = std::max(diff, l2_norm(d));
            next[n] = std::move(yn);
        }
        tr.states = std::move(next);
        if (diff <= 1e-12 * std::max(scale, tr.sup_l2())) return tr;
    }
    throw SimulationError(-1, "Duhamel Picard iteration did not converge in 100 sweeps (dt * drift too large)");
}

EnergyReport energy_report(const Trajectory& tr, const ControlSignal& v, const FilterParams& p) {
    (void)p;  // the balance below holds for every alpha; kept for interface symmetry
    const auto& basis = tr.front().basis();
    const double dt = tr.grid.dt();
    const auto forces = control_forces(v, basis);

    EnergyReport rep;
    rep.residuals.reserve(tr.grid.steps);
    rep.sup_l2 = 0.0;

    double prev = l2_norm(tr.front());
    rep.sup_l2 = prev;
    rep.sup_v = sobolev_norm(tr.front(), 1.0);
    rep.b0 = l2_norm(tr.front());

    double vq = 0.0, fq = 0.0, dq = 0.0;
    {
        const double n0 = sobolev_norm(tr.front(), 1.0);
        vq += 0.5 * dt * n0 * n0;
    }

    for (int n = 0; n < tr.grid.steps; ++n) {
        const SpectralField ybar = average(tr.states[n], tr.states[n + 1]);
        const double cur = l2_norm(tr.states[n + 1]);
        const double grad = sobolev_norm(ybar, 1.0);
        double work = 0.0;
        if (!forces.empty()) work = inner(forces[n], ybar);
        const double r = (cur * cur - prev * prev) / (2.0 * dt) + grad * grad - work;
        rep.residuals.push_back(r);
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
        rep.cumulative_dissipation += dt * grad * grad;
        if (cur > prev * (1.0 + 1e-12)) rep.monotone_l2 = false;

        const double vn = sobolev_norm(tr.states[n + 1], 1.0);
        const double w = (n + 1 == tr.grid.steps) ? 0.5 : 1.0;
        vq += w * dt * vn * vn;
        rep.sup_l2 = std::max(rep.sup_l2, cur);
        rep.sup_v = std::max(rep.sup_v, vn);

        SpectralField yt = tr.states[n + 1];
        yt -= tr.states[n];
        yt *= 1.0 / dt;
        const double ytn = sobolev_norm(yt, -1.0);
        dq += dt * ytn * ytn;

        if (!forces.empty()) {
            const double fn = sobolev_norm(forces[n], -1.0);
            fq += dt * fn * fn;
        }
        prev = cur;
    }
    rep.l2_v_norm = std::sqrt(vq);
    rep.dyt_vprime_l2 = std::sqrt(dq);
    rep.b0 += std::sqrt(fq);
    return rep;
}

RegularizationReport regularization_times(const Trajectory& tr, double k, double tau, double c0) {
    require(k > 1.5, "regularization parameter k must exceed 3/2");
    require(tau > 0.0 && tau <= 0.5 * tr.grid.horizon + 1e-12, "tau must lie in (0, T/2]");

    const double dt = tr.grid.dt();
    const double y0n = l2_norm(tr.front());
    RegularizationReport rep;
    rep.threshold = (k / tau) * y0n * y0n;
    rep.bound = tau / k - dt;
    rep.phi_value = 65.0 * (1.0 + c0) * std::pow(k / tau, 3.0) * std::pow(y0n, 6.0);
    rep.first_time = std::numeric_limits<double>::quiet_NaN();
    rep.min_da2 = std::numeric_limits<double>::infinity();

    int count = 0;
    for (int n = 0; n <= tr.grid.steps; ++n) {
        const double t = tr.grid.time(n);
        if (t <= tau + 1e-15) {
            const double g = sobolev_norm(tr.states[n], 1.0);
            if (g * g <= rep.threshold) ++count;
        }
        if (t <= 0.5 * tr.grid.horizon + 1e-15) {
            const double da = sobolev_norm(tr.states[n], 2.0);
            rep.min_da2 = std::min(rep.min_da2, da * da);
            if (std::isnan(rep.first_time) && da * da <= rep.phi_value) rep.first_time = t;
        }
    }
    rep.measure = std::min(count * dt, tau);
    const double denom = 65.0 * std::pow(k / tau, 3.0) * std::pow(y0n, 6.0);
    rep.fitted_c0 = denom > 0.0 ? rep.min_da2 / denom - 1.0 : std::numeric_limits<double>::quiet_NaN();

    if (rep.measure < rep.bound - 1e-12) {
        std::ostringstream os;
        os << "regularization-time measure " << rep.measure << " fell below tau/k - dt = " << rep.bound
           << " (k=" << k << ", tau=" << tau << "); this falsifies the implementation, not the estimate";
        throw PropertyViolation(os.str());
    }
    return rep;
}

}  // namespace lal
