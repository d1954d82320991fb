#include "lal/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <numbers>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "lal/errors.hpp"

namespace lal {

namespace {

// FFTW's planner is not reentrant; executions on private buffers are.
std::mutex planner_mutex;

class Workspace {
  public:
    explicit Workspace(int n) : n_(n) {
        const size_t count = static_cast<size_t>(n) * n;
        in_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * count));
        out_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * count));
        std::lock_guard<std::mutex> lock(planner_mutex);
        fwd_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in_), reinterpret_cast<fftw_complex*>(out_),
                                FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in_), reinterpret_cast<fftw_complex*>(out_),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Workspace() {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    void clear_in() { std::fill_n(in_, static_cast<size_t>(n_) * n_, Complex{0.0, 0.0}); }
    Complex* in() { return in_; }
    const Complex* out() const { return out_; }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

  private:
    int n_;
    Complex* in_;
    Complex* out_;
    fftw_plan fwd_, bwd_;
};

Workspace& workspace_for(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Workspace>(n);
    return *slot;
}

// Vector Fourier coefficient of mode j: U = (amp/sqrt(2)) * i * k_perp/|k|,
// optionally times an extra per-mode factor (derivatives pass i*k_axis).
inline void coefficients(const SpectralField& u, int j, Complex extra, Complex& c1, Complex& c2) {
    const auto& k = u.basis()->mode(j);
    const double inv_mag = 1.0 / std::sqrt(u.basis()->eigenvalue(j));
    const Complex base = u[j] * extra * Complex{0.0, inv_mag / std::numbers::sqrt2};
    c1 = base * static_cast<double>(-k.k2);
    c2 = base * static_cast<double>(k.k1);
}

GridField render(const SpectralField& u, int derivative_axis) {
    const auto& basis = *u.basis();
    const int n = basis.grid_size();
    auto& ws = workspace_for(n);
    GridField g(n);

    for (int comp = 0; comp < 2; ++comp) {
        ws.clear_in();
        for (int j = 0; j < basis.size(); ++j) {
            Complex extra{1.0, 0.0};
            if (derivative_axis >= 0) {
                const auto& k = basis.mode(j);
                extra = Complex{0.0, static_cast<double>(derivative_axis == 0 ? k.k1 : k.k2)};
            }
            Complex c1, c2;
            coefficients(u, j, extra, c1, c2);
            ws.in()[basis.fft_bin(j)] = (comp == 0) ? c1 : c2;
        }
        ws.backward();
        auto& dst = (comp == 0) ? g.u1() : g.u2();
        const Complex* src = ws.out();
        for (size_t p = 0; p < dst.size(); ++p) dst[p] = src[p].real();
    }
    return g;
}

}  // namespace

GridField to_grid(const SpectralField& u) { return render(u, -1); }

GridField to_grid_derivative(const SpectralField& u, int axis) {
    if (axis != 0 && axis != 1) throw ConfigError(ConfigError::Kind::constraint, "derivative axis must be 0 or 1");
    return render(u, axis);
}

SpectralField to_spectral(const GridField& g, const BasisPtr& basis) {
    if (g.grid_size() != basis->grid_size())
        throw ConfigError(ConfigError::Kind::constraint, "grid size does not match basis");
    const int n = g.grid_size();
    auto& ws = workspace_for(n);
    const double scale = 1.0 / (static_cast<double>(n) * n);

    std::vector<Complex> hat1(basis->size()), hat2(basis->size());
    for (int comp = 0; comp < 2; ++comp) {
        const auto& src = (comp == 0) ? g.u1() : g.u2();
        Complex* in = ws.in();
        for (size_t p = 0; p < src.size(); ++p) in[p] = Complex{src[p], 0.0};
        ws.forward();
        auto& dst = (comp == 0) ? hat1 : hat2;
        for (int j = 0; j < basis->size(); ++j) dst[j] = ws.out()[basis->fft_bin(j)] * scale;
    }

    SpectralField out(basis);
    for (int j = 0; j < basis->size(); ++j) {
        const auto& k = basis->mode(j);
        const double inv_mag = 1.0 / std::sqrt(basis->eigenvalue(j));
        // amplitude = sqrt(2) * (U . conj(psi_k)); keeping only the k-perp
        // component is the Leray projection on this basis.
        const Complex perp = hat1[j] * (static_cast<double>(-k.k2) * inv_mag) +
                             hat2[j] * (static_cast<double>(k.k1) * inv_mag);
        out[j] = Complex{0.0, -std::numbers::sqrt2} * perp;
    }
    out.canonicalize_zeros();
    return out;
}

}  // namespace lal
