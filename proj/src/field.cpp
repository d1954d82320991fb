#include "lal/field.hpp"

#include <cmath>
#include <sstream>

#include "lal/errors.hpp"

namespace lal {

namespace {

void require_shared_basis(const SpectralField& a, const SpectralField& b) {
    if (!a.basis() || !b.basis() || !a.basis()->same_as(*b.basis()))
        throw ConfigError(ConfigError::Kind::constraint, "spectral fields do not share a basis");
}

void require_power_range(double r) {
    if (!(r >= -2.0 && r <= 2.0)) {
        std::ostringstream os;
        os << "operator power r must lie in [-2, 2], got " << r;
        throw ConfigError(ConfigError::Kind::constraint, os.str());
    }
}

}  // namespace

void SpectralField::set_pair(const WaveVector& k, Complex a) {
    const int j = basis_->index_of(k);
    if (j < 0) throw ConfigError(ConfigError::Kind::constraint, "wavevector not retained in basis");
    amps_[j] = a;
    amps_[basis_->conjugate_index(j)] = std::conj(a);
}

bool SpectralField::finite() const {
    for (const auto& a : amps_)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_shared_basis(*this, o);
    for (size_t j = 0; j < amps_.size(); ++j) amps_[j] += o.amps_[j];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_shared_basis(*this, o);
    for (size_t j = 0; j < amps_.size(); ++j) amps_[j] -= o.amps_[j];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& a : amps_) a *= s;
    return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
    require_shared_basis(*this, o);
    for (size_t j = 0; j < amps_.size(); ++j) amps_[j] += s * o.amps_[j];
}

void SpectralField::canonicalize_zeros() {
    for (auto& a : amps_) a = {a.real() + 0.0, a.imag() + 0.0};
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
    a += b;
    return a;
}
SpectralField operator-(SpectralField a, const SpectralField& b) {
    a -= b;
    return a;
}
SpectralField operator*(double s, SpectralField a) {
    a *= s;
    return a;
}

double inner(const SpectralField& a, const SpectralField& b) {
    require_shared_basis(a, b);
    double s = 0.0;
    for (int j = 0; j < a.size(); ++j)
        s += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
    return 0.5 * s;
}

double sobolev_norm(const SpectralField& u, double r) {
    require_power_range(r);
    const auto& lam = u.basis()->eigenvalues();
    double s = 0.0;
    if (r == 0.0) {
        for (int j = 0; j < u.size(); ++j) s += std::norm(u[j]);
    } else {
        for (int j = 0; j < u.size(); ++j) s += std::pow(lam[j], r) * std::norm(u[j]);
    }
    return std::sqrt(0.5 * s);
}

SpectralField apply_stokes_power(const SpectralField& u, double r) {
    require_power_range(r);
    SpectralField out = u;
    if (r == 0.0) return out;
    const auto& lam = u.basis()->eigenvalues();
    for (int j = 0; j < out.size(); ++j) out[j] *= std::pow(lam[j], r);
    return out;
}

SpectralField apply_semigroup(const SpectralField& u, double t) {
    if (!(t >= 0.0)) throw ConfigError(ConfigError::Kind::constraint, "semigroup time must be >= 0");
    SpectralField out = u;
    if (t == 0.0) return out;
    const auto& lam = u.basis()->eigenvalues();
    for (int j = 0; j < out.size(); ++j) out[j] *= std::exp(-t * lam[j]);
    return out;
}

bool GridField::finite() const {
    for (double v : u1_)
        if (!std::isfinite(v)) return false;
    for (double v : u2_)
        if (!std::isfinite(v)) return false;
    return true;
}

double GridField::sup_norm() const {
    double m = 0.0;
    for (size_t p = 0; p < u1_.size(); ++p) m = std::max(m, u1_[p] * u1_[p] + u2_[p] * u2_[p]);
    return std::sqrt(m);
}

GridField& GridField::operator+=(const GridField& o) {
    for (size_t p = 0; p < u1_.size(); ++p) {
        u1_[p] += o.u1_[p];
        u2_[p] += o.u2_[p];
    }
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    for (size_t p = 0; p < u1_.size(); ++p) {
        u1_[p] -= o.u1_[p];
        u2_[p] -= o.u2_[p];
    }
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (size_t p = 0; p < u1_.size(); ++p) {
        u1_[p] *= s;
        u2_[p] *= s;
    }
    return *this;
}

void GridField::axpy(double s, const GridField& o) {
    for (size_t p = 0; p < u1_.size(); ++p) {
        u1_[p] += s * o.u1_[p];
        u2_[p] += s * o.u2_[p];
    }
}

double grid_inner(const GridField& a, const GridField& b) {
    double s = 0.0;
    for (size_t p = 0; p < a.points(); ++p) s += a.u1(p) * b.u1(p) + a.u2(p) * b.u2(p);
    return s / static_cast<double>(a.points());
}

double grid_l2_norm(const GridField& a) { return std::sqrt(grid_inner(a, a)); }

}  // namespace lal
