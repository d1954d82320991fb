#pragma once

#include <complex>
#include <vector>

#include "lal/basis.hpp"

namespace lal {

using Complex = std::complex<double>;

/// Divergence-free velocity field as complex amplitudes on the retained
/// Fourier-Stokes modes.
///
/// The field represented is
///     u(x) = sum_k (u_k / sqrt(2)) * psi_k * exp(i k.x),
/// with polarization psi_k = i k_perp / |k|, k_perp = (-k2, k1). A real
/// field satisfies the conjugate symmetry u_{-k} = conj(u_k); all
/// constructors and generators in this library maintain it. With this
/// normalization the L2 inner product is (u,v) = 1/2 sum_k Re(conj(u_k) v_k),
/// so a single conjugate pair with |u_k| = 1 has unit norm.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(BasisPtr basis) : basis_(std::move(basis)), amps_(basis_->size(), Complex{0.0, 0.0}) {}

    const BasisPtr& basis() const { return basis_; }
    int size() const { return static_cast<int>(amps_.size()); }

    Complex& operator[](int j) { return amps_[j]; }
    const Complex& operator[](int j) const { return amps_[j]; }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    std::vector<Complex>& amplitudes() { return amps_; }

    /// Sets u_k = a and u_{-k} = conj(a). Throws if k is not retained.
    void set_pair(const WaveVector& k, Complex a);

    bool finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);

    /// this += s * o
    void axpy(double s, const SpectralField& o);

    /// Flushes negative zeros to +0.0 in place. Keeps structurally-zero
    /// amplitudes bit-identical across algebraically equivalent code paths.
    void canonicalize_zeros();

  private:
    BasisPtr basis_;
    std::vector<Complex> amps_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// L2 inner product (real-valued on conjugate-symmetric fields).
double inner(const SpectralField& a, const SpectralField& b);

/// (u, A^r u)^{1/2} = (1/2 sum_k lambda_k^r |u_k|^2)^{1/2} with the pair
/// normalization above; r = 0 gives the L2 norm. Requires r in [-2, 2].
double sobolev_norm(const SpectralField& u, double r);

inline double l2_norm(const SpectralField& u) { return sobolev_norm(u, 0.0); }

/// A^r u: per-mode multiplication by lambda_k^r. Requires r in [-2, 2];
/// safe for negative r since lambda_k >= 1 on the torus basis.
SpectralField apply_stokes_power(const SpectralField& u, double r);

/// e^{-tA} u: per-mode multiplication by exp(-t lambda_k). Requires t >= 0.
SpectralField apply_semigroup(const SpectralField& u, double t);

/// Velocity samples on the uniform N x N torus grid, x_i = 2 pi i / N.
/// Row-major storage, component arrays u1, u2 of length N^2.
class GridField {
  public:
    GridField() = default;
    explicit GridField(int n) : n_(n), u1_(static_cast<size_t>(n) * n, 0.0), u2_(static_cast<size_t>(n) * n, 0.0) {}

    int grid_size() const { return n_; }
    size_t points() const { return u1_.size(); }

    double& u1(size_t p) { return u1_[p]; }
    double& u2(size_t p) { return u2_[p]; }
    double u1(size_t p) const { return u1_[p]; }
    double u2(size_t p) const { return u2_[p]; }
    std::vector<double>& u1() { return u1_; }
    std::vector<double>& u2() { return u2_; }
    const std::vector<double>& u1() const { return u1_; }
    const std::vector<double>& u2() const { return u2_; }

    bool finite() const;
    double sup_norm() const;  // max_x |u(x)| (Euclidean magnitude)

    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double s);
    void axpy(double s, const GridField& o);

  private:
    int n_ = 0;
    std::vector<double> u1_, u2_;
};

/// Grid quadrature inner product, (1/N^2) sum_x f(x).g(x); matches the
/// spectral inner product for band-limited fields (Parseval).
double grid_inner(const GridField& a, const GridField& b);
double grid_l2_norm(const GridField& a);

}  // namespace lal
