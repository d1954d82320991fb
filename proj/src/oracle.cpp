#include "lal/oracle.hpp"

#include <cmath>
#include <numbers>

#include "lal/errors.hpp"

namespace lal {

Eigen::VectorXd to_real_vector(const SpectralField& u) {
    const auto& reps = u.basis()->pair_representatives();
    Eigen::VectorXd x(2 * static_cast<int>(reps.size()));
    for (size_t i = 0; i < reps.size(); ++i) {
        x[2 * i] = u[reps[i]].real();
        x[2 * i + 1] = u[reps[i]].imag();
    }
    return x;
}

SpectralField from_real_vector(const BasisPtr& basis, const Eigen::VectorXd& x) {
    const auto& reps = basis->pair_representatives();
    if (x.size() != 2 * static_cast<int>(reps.size()))
        throw ConfigError(ConfigError::Kind::constraint, "real vector dimension mismatch");
    SpectralField u(basis);
    for (size_t i = 0; i < reps.size(); ++i) u.set_pair(basis->mode(reps[i]), Complex{x[2 * i], x[2 * i + 1]});
    return u;
}

SpectralField convolution_advect(const SpectralField& z, const SpectralField& y) {
    const auto& basis = y.basis();
    if (!z.basis()->same_as(*basis)) throw ConfigError(ConfigError::Kind::constraint, "basis mismatch");
    const int m = basis->size();
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    SpectralField w(basis);
    for (int a = 0; a < m; ++a) {
        if (z[a] == Complex{0.0, 0.0}) continue;
        const auto& p = basis->mode(a);
        const double pmag = std::sqrt(basis->eigenvalue(a));
        // Z_p = z_a * i * p_perp / (|p| sqrt(2))
        const Complex zfac = z[a] * Complex{0.0, inv_sqrt2 / pmag};
        const double zp1 = -p.k2, zp2 = p.k1;
        for (int b = 0; b < m; ++b) {
            const auto& q = basis->mode(b);
            const int idx = basis->index_of({p.k1 + q.k1, p.k2 + q.k2});
            if (idx < 0) continue;
            // i (Z_p . q) Y_q, and Y_q = y_b * i * q_perp / (|q| sqrt(2)).
            const Complex zdotq = zfac * (zp1 * q.k1 + zp2 * q.k2);
            const Complex c = Complex{0.0, 1.0} * zdotq * y[b] * Complex{0.0, inv_sqrt2 / std::sqrt(basis->eigenvalue(b))};
            const auto& kappa = basis->mode(idx);
            const double kmag = std::sqrt(basis->eigenvalue(idx));
            // Accumulate the psi_kappa component: amp += sqrt(2) (W . conj(psi)).
            const Complex w1 = c * static_cast<double>(-q.k2);
            const Complex w2 = c * static_cast<double>(q.k1);
            const Complex perp = (w1 * static_cast<double>(-kappa.k2) + w2 * static_cast<double>(kappa.k1)) / kmag;
            w[idx] += Complex{0.0, -std::numbers::sqrt2} * perp;
        }
    }
    return w;
}

Trajectory dense_rk4(const SpectralField& y0, const TimeGrid& g, int substeps, const OdeRhs& rhs) {
    g.validate();
    if (substeps < 1) throw ConfigError(ConfigError::Kind::constraint, "substeps must be >= 1");
    const double h = g.dt() / substeps;

    Trajectory tr;
    tr.grid = g;
    tr.states.reserve(g.steps + 1);
    tr.states.push_back(y0);

    SpectralField x = y0;
    for (int n = 0; n < g.steps; ++n) {
        double t = g.time(n);
        for (int s = 0; s < substeps; ++s) {
            const SpectralField k1 = rhs(t, x);
            SpectralField x2 = x;
            x2.axpy(0.5 * h, k1);
            const SpectralField k2 = rhs(t + 0.5 * h, x2);
            SpectralField x3 = x;
            x3.axpy(0.5 * h, k2);
            const SpectralField k3 = rhs(t + 0.5 * h, x3);
            SpectralField x4 = x;
            x4.axpy(h, k3);
            const SpectralField k4 = rhs(t + h, x4);
            x.axpy(h / 6.0, k1);
            x.axpy(h / 3.0, k2);
            x.axpy(h / 3.0, k3);
            x.axpy(h / 6.0, k4);
            t += h;
        }
        tr.states.push_back(x);
    }
    return tr;
}

namespace {

SpectralField lerp_sample(const std::vector<SpectralField>& nodes, const TimeGrid& g, double t) {
    const double dt = g.dt();
    double pos = t / dt;
    int n = static_cast<int>(std::floor(pos));
    n = std::max(0, std::min(n, g.steps - 1));
    const double w = pos - n;
    SpectralField out = nodes[n];
    out *= (1.0 - w);
    out.axpy(w, nodes[n + 1]);
    return out;
}

SpectralField diffusion_term(const SpectralField& y) {
    SpectralField out = y;
    const auto& lam = y.basis()->eigenvalues();
    for (int j = 0; j < out.size(); ++j) out[j] *= -lam[j];
    return out;
}

}  // namespace

OdeRhs oseen_rhs(const OseenDrift& h, const std::vector<SpectralField>& forces, const TimeGrid& g) {
    return [&h, &forces, g](double t, const SpectralField& x) {
        SpectralField out = diffusion_term(x);
        const SpectralField z = lerp_sample(h.fields, g, t);
        out -= convolution_advect(z, x);
        if (!forces.empty()) out += lerp_sample(forces, g, t);
        return out;
    };
}

OdeRhs leray_rhs(const FilterParams& p, const std::vector<SpectralField>& forces, const TimeGrid& g) {
    return [p, &forces, g](double t, const SpectralField& x) {
        SpectralField out = diffusion_term(x);
        out -= convolution_advect(apply_filter(x, p), x);
        if (!forces.empty()) out += lerp_sample(forces, g, t);
        return out;
    };
}

std::vector<SpectralField> node_forces(const ControlSignal& v, const BasisPtr& basis) {
    std::vector<SpectralField> forces;
    if (v.is_zero()) return forces;
    forces.reserve(v.values.size());
    for (const auto& gv : v.values) forces.push_back(to_spectral(v.mask.apply(gv), basis));
    return forces;
}

double discrete_diagonal_gramian(double lambda, const TimeGrid& g) {
    const double c = 0.5 * g.dt();
    const double S = 1.0 / (1.0 + c * lambda);
    const double E = (1.0 - c * lambda) * S;
    const double E2 = E * E;
    double geom;
    if (std::abs(1.0 - E2) < 1e-14) {
        geom = g.steps;
    } else {
        geom = (1.0 - std::pow(E2, g.steps)) / (1.0 - E2);
    }
    return g.dt() * S * S * geom;
}

double continuous_diagonal_gramian(double lambda, double horizon) {
    return (1.0 - std::exp(-2.0 * lambda * horizon)) / (2.0 * lambda);
}

}  // namespace lal
