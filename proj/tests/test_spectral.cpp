#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lal/errors.hpp"
#include "lal/rng.hpp"
#include "lal/transforms.hpp"

using namespace lal;

namespace {

double rel_diff(const SpectralField& a, const SpectralField& b) {
    SpectralField d = a;
    d -= b;
    const double nb = l2_norm(b);
    return nb > 0.0 ? l2_norm(d) / nb : l2_norm(d);
}

}  // namespace

TEST_CASE("basis construction and counting") {
    auto b = Basis::make(8, 1);
    CHECK(b->size() == 8);
    // Eigenvalues sorted: the four |k|=1 modes then the four diagonal ones.
    for (int j = 0; j < 4; ++j) CHECK(b->eigenvalue(j) == doctest::Approx(1.0));
    for (int j = 4; j < 8; ++j) CHECK(b->eigenvalue(j) == doctest::Approx(2.0));

    auto big = Basis::make(64, 21);
    CHECK(big->size() == (2 * 21 + 1) * (2 * 21 + 1) - 1);  // 1848

    CHECK_THROWS_AS(Basis::make(8, 4), ConfigError);   // dealiasing margin
    CHECK_THROWS_AS(Basis::make(12, 2), ConfigError);  // not a power of two
    CHECK_THROWS_AS(Basis::make(4, 1), ConfigError);   // too small
    CHECK_THROWS_AS(Basis::make(64, 0), ConfigError);

    // Explicit mode lists must be closed under negation.
    CHECK_THROWS_AS(Basis::from_modes(8, {{1, 0}}), ConfigError);
    auto pair = Basis::from_modes(8, {{1, 0}, {-1, 0}});
    CHECK(pair->size() == 2);
    CHECK(pair->conjugate_index(0) == 1);
}

TEST_CASE("mode ordering is (eigenvalue, k1, k2) and duplicate-free") {
    auto b = Basis::make(16, 5);
    for (int j = 1; j < b->size(); ++j) {
        const auto &p = b->mode(j - 1), &q = b->mode(j);
        const double lp = b->eigenvalue(j - 1), lq = b->eigenvalue(j);
        const bool ordered = lp < lq || (lp == lq && (p.k1 < q.k1 || (p.k1 == q.k1 && p.k2 < q.k2)));
        CHECK(ordered);
    }
}

TEST_CASE("single mode renders the analytic pattern") {
    auto b = Basis::make(8, 2);
    // Pair k=(1,0), amplitude 1: u(x) = -sqrt(2) * (0,1) * sin(x1).
    const SpectralField u = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    const GridField g = to_grid(u);
    const int n = b->grid_size();
    for (int i = 0; i < n; ++i) {
        const double x1 = 2.0 * std::numbers::pi * i / n;
        for (int j = 0; j < n; ++j) {
            const size_t p = static_cast<size_t>(i) * n + j;
            CHECK(std::abs(g.u1(p)) <= 1e-13);
            CHECK(std::abs(g.u2(p) - (-std::numbers::sqrt2 * std::sin(x1))) <= 1e-13);
        }
    }
    CHECK(l2_norm(u) == doctest::Approx(1.0));
    CHECK(grid_l2_norm(g) == doctest::Approx(1.0));
}

TEST_CASE("zero field round trip") {
    auto b = Basis::make(8, 2);
    SpectralField z(b);
    const GridField g = to_grid(z);
    for (size_t p = 0; p < g.points(); ++p) {
        CHECK(g.u1(p) == 0.0);
        CHECK(g.u2(p) == 0.0);
    }
    CHECK(l2_norm(to_spectral(g, b)) == 0.0);
}

TEST_CASE("transform round trip and projector idempotence on random fields") {
    auto b = Basis::make(32, 10);
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralField u = random_field(b, rng);
        const SpectralField back = to_spectral(to_grid(u), b);
        CHECK(rel_diff(back, u) <= 1e-12);
    }
}

TEST_CASE("Leray projection annihilates gradients and keeps divergence-free parts") {
    auto b = Basis::make(16, 4);
    const int n = b->grid_size();

    // Pure gradient: grad cos(x1) = (-sin(x1), 0).
    GridField grad(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad.u1(static_cast<size_t>(i) * n + j) = -std::sin(2.0 * std::numbers::pi * i / n);
    CHECK(l2_norm(to_spectral(grad, b)) <= 1e-14);

    // Gradient plus a divergence-free mode separates exactly.
    const SpectralField u = single_mode_field(b, {2, 1}, Complex{0.3, -0.7});
    GridField mixed = to_grid(u);
    mixed += grad;
    CHECK(rel_diff(to_spectral(mixed, b), u) <= 1e-12);
}

TEST_CASE("grid rendering is discretely divergence-free") {
    auto b = Basis::make(32, 10);
    Rng rng(7);
    const SpectralField u = random_field(b, rng);
    const GridField d1 = to_grid_derivative(u, 0);
    const GridField d2 = to_grid_derivative(u, 1);
    double div = 0.0, scale = 0.0;
    for (size_t p = 0; p < d1.points(); ++p) {
        div = std::max(div, std::abs(d1.u1(p) + d2.u2(p)));
        scale = std::max({scale, std::abs(d1.u1(p)), std::abs(d2.u2(p))});
    }
    CHECK(div <= 1e-10 * std::max(scale, 1.0));
}

TEST_CASE("stokes powers") {
    auto b = Basis::make(8, 2);
    const SpectralField u = single_mode_field(b, {1, 1}, Complex{1.0, 0.0});
    CHECK(rel_diff(apply_stokes_power(u, 0.0), u) == 0.0);
    CHECK(l2_norm(apply_stokes_power(u, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));

    const SpectralField w = single_mode_field(b, {2, 0}, Complex{1.0, 0.0});
    CHECK(l2_norm(apply_stokes_power(w, 0.5)) == doctest::Approx(2.0).epsilon(1e-14));

    // Composition adds exponents.
    Rng rng(3);
    const SpectralField r = random_field(b, rng);
    CHECK(rel_diff(apply_stokes_power(apply_stokes_power(r, 0.7), 0.55), apply_stokes_power(r, 1.25)) <= 1e-14);

    CHECK_THROWS_AS(apply_stokes_power(u, 2.5), ConfigError);
}

TEST_CASE("semigroup decay and the semigroup law") {
    auto b = Basis::make(8, 2);
    const SpectralField u = single_mode_field(b, {1, 0}, Complex{1.0, 0.0});
    CHECK(rel_diff(apply_semigroup(u, 0.0), u) == 0.0);
    CHECK(l2_norm(apply_semigroup(u, 1.0)) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

    Rng rng(11);
    const SpectralField r = random_field(b, rng);
    CHECK(rel_diff(apply_semigroup(apply_semigroup(r, 0.3), 0.7), apply_semigroup(r, 1.0)) <= 1e-12);

    CHECK_THROWS_AS(apply_semigroup(u, -0.1), ConfigError);
}

TEST_CASE("sobolev norms") {
    auto b = Basis::make(8, 2);
    SpectralField z(b);
    CHECK(sobolev_norm(z, -1.3) == 0.0);
    CHECK(sobolev_norm(z, 1.7) == 0.0);

    CHECK(sobolev_norm(single_mode_field(b, {1, 0}, Complex{1.0, 0.0}), 1.0) == doctest::Approx(1.0));
    CHECK(sobolev_norm(single_mode_field(b, {2, 0}, Complex{1.0, 0.0}), 1.0) == doctest::Approx(2.0));

    // Monotone nondecreasing in r (lambda >= 1).
    Rng rng(5);
    const SpectralField u = random_field(b, rng);
    double prev = 0.0;
    for (double r : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double cur = sobolev_norm(u, r);
        CHECK(cur >= prev * (1.0 - 1e-13));
        prev = cur;
    }
}

TEST_CASE("Parseval: grid quadrature matches the spectral norm") {
    auto b = Basis::make(32, 10);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralField u = random_field(b, rng);
        CHECK(grid_l2_norm(to_grid(u)) == doctest::Approx(sobolev_norm(u, 0.0)).epsilon(1e-10));
    }
}

TEST_CASE("H1 norm equivalence with grid quadrature of the gradient") {
    auto b = Basis::make(32, 10);
    Rng rng(42);
    const SpectralField u = random_field(b, rng);
    const GridField d1 = to_grid_derivative(u, 0);
    const GridField d2 = to_grid_derivative(u, 1);
    const double grid_h1 = std::sqrt(grid_inner(d1, d1) + grid_inner(d2, d2));
    CHECK(grid_h1 == doctest::Approx(sobolev_norm(u, 1.0)).epsilon(1e-8));
}

TEST_CASE("semigroup decay bound with the paper's sharp constant") {
    auto b = Basis::make(64, 21);
    Rng rng(17);
    for (double r : {0.25, 0.5, 1.0}) {
        const double sharp = std::pow(r / std::numbers::e, r);
        for (double t : {0.01, 0.1, 1.0}) {
            for (int trial = 0; trial < 10; ++trial) {
                const SpectralField u = random_field(b, rng);
                const double lhs = sobolev_norm(apply_semigroup(u, t), 2.0 * r);
                CHECK(lhs <= sharp * std::pow(t, -r) * l2_norm(u) * (1.0 + 1e-10));
            }
        }
        // Near-equality: all mass on the mode with lambda closest to r/t
        // over the t grid. lambda = 100 r is available (k = (10,0) etc.),
        // so t = 0.01 realizes t*lambda = r exactly.
        double best = 0.0;
        for (double t : {0.01, 0.1, 1.0}) {
            for (int j = 0; j < b->size(); ++j) {
                const double s = t * b->eigenvalue(j);
                best = std::max(best, std::pow(t, r) * std::pow(b->eigenvalue(j), r) * std::exp(-s));
            }
        }
        CHECK(best >= 0.95 * sharp);
        CHECK(best <= sharp * (1.0 + 1e-10));
    }
}
