#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lal/errors.hpp"
#include "lal/oracle.hpp"
#include "lal/rng.hpp"

using namespace lal;

namespace {

double c0l2_distance(const Trajectory& a, const Trajectory& b) {
    double s = 0.0;
    for (size_t n = 0; n < a.states.size(); ++n) {
        SpectralField d = a.states[n];
        d -= b.states[n];
        s = std::max(s, l2_norm(d));
    }
    return s;
}

BasisPtr pair_basis() { return Basis::from_modes(8, {{1, 0}, {-1, 0}}); }

BasisPtr m8_basis() { return Basis::make(8, 1); }

}  // namespace

TEST_CASE("advection: frozen two-mode triad values") {
    auto b = Basis::make(8, 2);
    const SpectralField z = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    const SpectralField y = single_mode_field(b, {0, 1}, Complex{1.0, 0.0});
    const SpectralField w = advect(z, y);

    // Hand expansion of P((z.grad) y) in the amplitude convention used
    // here: output supported on the four corner modes, with
    // w_(1,1) = -1/2, w_(-1,1) = +1/2 and conjugate partners.
    for (int j = 0; j < b->size(); ++j) {
        const auto& k = b->mode(j);
        const Complex a = w[j];
        if (std::abs(k.k1) == 1 && std::abs(k.k2) == 1) {
            const double expected = (k.k1 == k.k2) ? -0.5 : 0.5;
            CHECK(std::abs(a - Complex{expected, 0.0}) <= 1e-14);
        } else {
            CHECK(std::abs(a) <= 1e-14);
        }
    }

    // The independent convolution oracle agrees with the frozen values too.
    SpectralField diff = convolution_advect(z, y) - w;
    CHECK(l2_norm(diff) <= 1e-14);
}

TEST_CASE("advection: zero drift, self-advection, skew symmetry") {
    auto b = Basis::make(16, 5);
    Rng rng(21);
    const SpectralField y = random_field(b, rng);
    CHECK(l2_norm(advect(SpectralField(b), y)) == 0.0);

    const SpectralField s = single_mode_field(b, {2, 1}, Complex{0.4, 0.9});
    CHECK(l2_norm(advect(s, s)) <= 1e-14);

    for (int trial = 0; trial < 10; ++trial) {
        const SpectralField z = random_field(b, rng);
        const SpectralField u = random_field(b, rng);
        const double skew = inner(advect(z, u), u);
        CHECK(std::abs(skew) <= 1e-12 * l2_norm(z) * l2_norm(u) * l2_norm(u) * b->max_eigenvalue());
    }
}

TEST_CASE("advection: pseudospectral path equals the convolution oracle") {
    for (auto basis : {Basis::make(8, 1), Basis::make(16, 5)}) {
        Rng rng(31);
        for (int trial = 0; trial < 5; ++trial) {
            const SpectralField z = random_field(basis, rng);
            const SpectralField y = random_field(basis, rng);
            SpectralField d = advect(z, y) - convolution_advect(z, y);
            CHECK(l2_norm(d) <= 1e-13 * basis->max_eigenvalue());
        }
    }
}

TEST_CASE("simulate_leray: trivial and single-mode exact decay") {
    auto b = m8_basis();
    const TimeGrid g{1.0, 1000};
    const ControlSignal v0 = ControlSignal::zero(8, ControlMask::full(8), g);

    const Trajectory znull = simulate_leray(SpectralField(b), v0, {0.1}, g);
    CHECK(znull.sup_l2() == 0.0);

    const SpectralField y0 = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    for (double alpha : {0.0, 0.1, 0.7}) {
        const Trajectory tr = simulate_leray(y0, v0, {alpha}, g);
        CHECK(std::abs(l2_norm(tr.back()) - std::exp(-1.0)) <= 1e-6);
    }
}

TEST_CASE("simulate_leray: second order in dt on the exact solution") {
    auto b = m8_basis();
    const SpectralField y0 = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    auto terminal_error = [&](int steps) {
        const TimeGrid g{1.0, steps};
        const ControlSignal v = ControlSignal::zero(8, ControlMask::full(8), g);
        const Trajectory tr = simulate_leray(y0, v, {0.1}, g);
        return std::abs(l2_norm(tr.back()) - std::exp(-1.0));
    };
    const double e1 = terminal_error(250);
    const double e2 = terminal_error(500);
    CHECK(e1 / e2 >= 3.6);
    CHECK(e1 / e2 <= 4.4);
}

TEST_CASE("simulate_leray: matches dense RK4 on a two-mode field") {
    auto b = m8_basis();
    const TimeGrid g{1.0, 1000};
    const ControlSignal v = ControlSignal::zero(8, ControlMask::full(8), g);
    const SpectralField y0 = two_mode_field(b, 0.8);

    const Trajectory imex = simulate_leray(y0, v, {0.1}, g);
    const Trajectory rk4 = dense_rk4(y0, g, 100, leray_rhs({0.1}, {}, g));
    CHECK(c0l2_distance(imex, rk4) <= 1e-5);
}

TEST_CASE("simulate_leray: energy dissipates monotonically") {
    auto b = Basis::make(16, 5);
    const TimeGrid g{0.5, 500};
    const ControlSignal v = ControlSignal::zero(16, ControlMask::full(16), g);
    const SpectralField y0 = random_band_field(b, 88, 3, 1.0);
    const Trajectory tr = simulate_leray(y0, v, {0.1}, g);
    for (int n = 0; n < g.steps; ++n)
        CHECK(l2_norm(tr.states[n + 1]) <= l2_norm(tr.states[n]) * (1.0 + 1e-12));
}

TEST_CASE("simulate_leray: time step rule is enforced") {
    auto b = m8_basis();
    const TimeGrid g{10.0, 10};  // dt = 1 with an O(10) advecting field
    const ControlSignal v = ControlSignal::zero(8, ControlMask::full(8), g);
    const SpectralField y0 = two_mode_field(b, 40.0);
    CHECK_THROWS_AS(simulate_leray(y0, v, {0.0}, g), SimulationError);
}

TEST_CASE("simulate_oseen: heat decay, superposition, Leray self-consistency") {
    auto b = m8_basis();
    const TimeGrid g{1.0, 400};
    const ControlMask mask = ControlMask::full(8);
    const ControlSignal v0 = ControlSignal::zero(8, mask, g);

    const OseenDrift h0 = OseenDrift::zero(b, g);
    const SpectralField y0 = single_mode_field(b, {1, 1}, Complex{0.5, -0.5});
    const Trajectory heat = simulate_oseen(y0, h0, v0, g);
    CHECK(std::abs(l2_norm(heat.back()) - l2_norm(y0) * std::exp(-2.0)) <= 1e-6);

    // Superposition within solver tolerance.
    Rng rng(5);
    OseenDrift h = OseenDrift::zero(b, g);
    for (auto& f : h.fields) f = 0.3 * random_field(b, rng);
    ControlSignal v = ControlSignal::zero(8, mask, g);
    for (auto& gv : v.values) gv = to_grid(0.2 * random_field(b, rng));
    const SpectralField w0 = random_field(b, rng);

    const Trajectory both = simulate_oseen(w0, h, v, g);
    const Trajectory only_ic = simulate_oseen(w0, h, v0, g);
    const Trajectory only_v = simulate_oseen(SpectralField(b), h, v, g);
    double sup = 0.0;
    for (int n = 0; n <= g.steps; ++n) {
        SpectralField d = both.states[n];
        d -= only_ic.states[n];
        d -= only_v.states[n];
        sup = std::max(sup, l2_norm(d));
    }
    CHECK(sup <= 1e-12);

    // Feeding the filtered Leray trajectory back as a frozen drift
    // reproduces the Leray run: the drift of the converged midpoint step
    // is exactly the filter of the stored midpoint averages.
    const SpectralField u0 = two_mode_field(b, 0.5);
    const FilterParams p{0.2};
    const Trajectory leray = simulate_leray(u0, v0, p, g);
    const Trajectory oseen = simulate_oseen(u0, OseenDrift::filtered(leray, p), v0, g);
    CHECK(c0l2_distance(leray, oseen) <= 1e-8);
}

TEST_CASE("simulate_adjoint: heat decay and exact discrete duality") {
    auto b = m8_basis();
    const TimeGrid g{1.0, 200};
    const ControlMask mask = ControlMask::rectangle(8, 0.5, 3.5, 0.5, 3.5);
    const OseenDrift h0 = OseenDrift::zero(b, g);

    const SpectralField phiT = single_mode_field(b, {0, 1}, Complex{1.0, 0.0});
    const Trajectory adj = simulate_adjoint(phiT, h0, g);
    CHECK(std::abs(l2_norm(adj.front()) - std::exp(-1.0)) <= 1e-6);

    // Duality on random triples with a random frozen drift:
    // (y_M, phi_M) - (y_0, phi_0) = sum_n dt (mask vbar_n, phibar_n).
    Rng rng(7);
    OseenDrift h = OseenDrift::zero(b, g);
    for (auto& f : h.fields) f = 0.4 * random_field(b, rng);

    for (int trial = 0; trial < 10; ++trial) {
        const SpectralField y0 = random_field(b, rng);
        const SpectralField pT = random_field(b, rng);
        ControlSignal v = ControlSignal::zero(8, mask, g);
        for (auto& gv : v.values) gv = mask.apply(to_grid(random_field(b, rng)));

        const Trajectory y = simulate_oseen(y0, h, v, g);
        const Trajectory phi = simulate_adjoint(pT, h, g);

        const double lhs = inner(y.back(), phi.back()) - inner(y.front(), phi.front());
        double rhs = 0.0;
        const double dt = g.dt();
        for (int n = 0; n < g.steps; ++n) {
            GridField vbar = v.values[n];
            vbar += v.values[n + 1];
            vbar *= 0.5;
            SpectralField phibar = phi.states[n];
            phibar += phi.states[n + 1];
            phibar *= 0.5;
            rhs += dt * grid_inner(mask.apply(vbar), to_grid(phibar));
        }
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        CHECK(std::abs(lhs - rhs) / scale <= 1e-10);
    }
}

TEST_CASE("simulate_adjoint: one-step operator is the dense transpose of the forward") {
    auto b = m8_basis();
    const TimeGrid g{0.1, 2};  // isolate a single step, dt = 0.05
    Rng rng(9);
    OseenDrift h = OseenDrift::zero(b, g);
    for (auto& f : h.fields) f = 0.5 * random_field(b, rng);

    const int m = b->size();
    Eigen::MatrixXd fwd(m, m), bwd(m, m);
    const ControlSignal v0 = ControlSignal::zero(8, ControlMask::full(8), g);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j] = 1.0;
        const Trajectory y = simulate_oseen(from_real_vector(b, e), h, v0, g);
        fwd.col(j) = to_real_vector(y.states[1]);
        const Trajectory phi = simulate_adjoint(from_real_vector(b, e), h, g);
        // phi.states[g.steps-1] is the result of one backward step from T.
        bwd.col(j) = to_real_vector(phi.states[g.steps - 1]);
    }
    // The first forward step and the last backward step share the same
    // drift average only when the drift is constant in time; rebuild with
    // constant drift to compare cleanly.
    OseenDrift hc = OseenDrift::zero(b, g);
    for (auto& f : hc.fields) f = h.fields[0];
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j] = 1.0;
        fwd.col(j) = to_real_vector(simulate_oseen(from_real_vector(b, e), hc, v0, g).states[1]);
        bwd.col(j) = to_real_vector(simulate_adjoint(from_real_vector(b, e), hc, g).states[g.steps - 1]);
    }
    CHECK((fwd.transpose() - bwd).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("duhamel_reconstruct: pure semigroup and closed-form control") {
    auto b = pair_basis();
    const TimeGrid g{1.0, 1000};
    const ControlMask mask = ControlMask::full(8);
    const ControlSignal v0 = ControlSignal::zero(8, mask, g);
    const OseenDrift h0 = OseenDrift::zero(b, g);

    const SpectralField y0 = single_mode_field(b, {1, 0}, Complex{0.8, 0.1});
    const Trajectory free_run = duhamel_reconstruct(y0, h0, v0, g);
    for (int n = 0; n <= g.steps; ++n) {
        SpectralField d = free_run.states[n] - apply_semigroup(y0, g.time(n));
        CHECK(l2_norm(d) <= 1e-13);
    }

    // Constant-in-time single-mode control, h = 0:
    // y_hat(T) = e^{-lambda T} y0_hat + v_hat (1 - e^{-lambda T}) / lambda.
    const SpectralField vmode = single_mode_field(b, {1, 0}, Complex{0.3, -0.2});
    ControlSignal v = ControlSignal::zero(8, mask, g);
    for (auto& gv : v.values) gv = to_grid(vmode);
    const Trajectory controlled = duhamel_reconstruct(y0, h0, v, g);
    const double lam = 1.0;
    const int j = b->index_of({1, 0});
    const Complex expect =
        std::exp(-lam) * y0[j] + vmode[j] * (1.0 - std::exp(-lam)) / lam;
    CHECK(std::abs(controlled.back()[j] - expect) <= 1e-6);
}

TEST_CASE("duhamel_reconstruct vs IMEX on a random smooth drift") {
    auto b = m8_basis();
    const TimeGrid g{1.0, 1000};
    const ControlMask mask = ControlMask::full(8);
    const ControlSignal v0 = ControlSignal::zero(8, mask, g);
    Rng rng(13);
    OseenDrift h = OseenDrift::zero(b, g);
    // Smooth-in-time drift: decayed random field.
    const SpectralField hbase = 0.5 * random_field(b, rng);
    for (int n = 0; n <= g.steps; ++n) h.fields[n] = apply_semigroup(hbase, 0.3 * g.time(n));

    const SpectralField y0 = random_field(b, rng);
    const Trajectory imex = simulate_oseen(y0, h, v0, g);
    const Trajectory duh = duhamel_reconstruct(y0, h, v0, g);
    CHECK(c0l2_distance(imex, duh) <= 1e-3);

    const Trajectory rk4 = dense_rk4(y0, g, 100, oseen_rhs(h, {}, g));
    CHECK(c0l2_distance(imex, rk4) <= 1e-5);
    CHECK(c0l2_distance(duh, rk4) <= 1e-3);
}

TEST_CASE("energy_report") {
    auto b = Basis::make(16, 5);
    const TimeGrid g{0.5, 500};
    const ControlMask mask = ControlMask::full(16);
    const ControlSignal v0 = ControlSignal::zero(16, mask, g);

    // Zero trajectory: all residuals vanish.
    const Trajectory znull = simulate_leray(SpectralField(b), v0, {0.1}, g);
    const auto r0 = energy_report(znull, v0, {0.1});
    CHECK(r0.max_abs_residual == 0.0);

    // Single-mode decay: linear problem, residual at rounding level.
    const SpectralField y1 = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    const auto r1 = energy_report(simulate_leray(y1, v0, {0.0}, g), v0, {0.0});
    CHECK(r1.max_abs_residual <= 1e-10);
    CHECK(r1.monotone_l2);

    // Random band-limited data with the nonlinearity active.
    const SpectralField y2 = random_band_field(b, 1001, 3, 1.0);
    const auto r2 = energy_report(simulate_leray(y2, v0, {0.1}, g), v0, {0.1});
    CHECK(r2.max_abs_residual <= 1e-8 * l2_norm(y2) * l2_norm(y2));
    CHECK(r2.monotone_l2);
}

TEST_CASE("regularization_times") {
    auto b = Basis::make(16, 5);
    const TimeGrid g{1.0, 1000};
    const ControlSignal v0 = ControlSignal::zero(16, ControlMask::full(16), g);

    // Single mode k=(1,0): ||grad y(t)||^2 = e^{-2t} ||y0||_V^2 and the
    // V-norm equals the L2 norm, so R(k,tau) = { t : e^{-2t} <= k/tau }.
    const SpectralField y0 = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    const Trajectory tr = simulate_leray(y0, v0, {0.0}, g);
    {
        const double k = 2.0, tau = 0.5;
        const auto rep = regularization_times(tr, k, tau);
        CHECK(rep.measure == doctest::Approx(tau).epsilon(0.01));  // k/tau = 4 >= 1: all of [0,tau]
        CHECK(rep.measure >= rep.bound);
    }
    {
        // Force a nontrivial crossing: k/tau < 1 requires tau > k, which
        // tau <= T/2 forbids for k > 3/2; use k just above 3/2 with a
        // larger-amplitude mode so the threshold bites.
        const SpectralField ybig = single_mode_field(b, {2, 0}, Complex{1.0, 0.0});
        const Trajectory trb = simulate_leray(ybig, v0, {0.0}, g);
        const double k = 1.6, tau = 0.5;
        // ||grad y||^2 = 4 e^{-8t} ||y0||^2, threshold (k/tau) ||y0||^2 = 3.2:
        // crossing at t = ln(4/3.2)/8.
        const auto rep = regularization_times(trb, k, tau);
        const double crossing = std::log(4.0 / 3.2) / 8.0;
        CHECK(rep.measure == doctest::Approx(tau - crossing).epsilon(0.02));
        CHECK(rep.measure >= rep.bound);
    }

    // Very large k saturates the window.
    CHECK(regularization_times(tr, 1e9, 0.5).measure == doctest::Approx(0.5));

    // Ten random initial states at two alphas.
    for (double alpha : {0.0, 0.1}) {
        for (int i = 0; i < 10; ++i) {
            const SpectralField yr = random_band_field(b, 300 + i, 4, 1.0);
            const auto rep = regularization_times(simulate_leray(yr, v0, {alpha}, g), 2.0, 0.5);
            CHECK(rep.measure >= rep.bound);
        }
    }

    CHECK_THROWS_AS(regularization_times(tr, 1.2, 0.5), ConfigError);
    CHECK_THROWS_AS(regularization_times(tr, 2.0, 0.9), ConfigError);
}
