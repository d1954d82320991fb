#pragma once

#include <memory>
#include <vector>

namespace lal {

/// Integer Fourier index on the periodic box [0,2pi)^2. The origin (0,0)
/// is never a member of a Basis: states have zero spatial mean.
struct WaveVector {
    int k1 = 0;
    int k2 = 0;

    bool operator==(const WaveVector&) const = default;
};

/// Explicit Stokes eigenstructure on the 2D torus.
///
/// Holds the retained divergence-free Fourier modes. Eigenvalue of mode k
/// is |k|^2 = k1^2 + k2^2. The mode list is closed under negation, sorted
/// by (eigenvalue, k1, k2) and duplicate-free. Immutable after
/// construction; share via shared_ptr.
class Basis {
  public:
    /// Standard construction: all wavevectors with max(|k1|,|k2|) <= k_max,
    /// excluding the origin. Requires grid_size >= 8, a power of two, and
    /// 1 <= k_max <= grid_size/3 (the 2/3-rule dealiasing margin, which
    /// keeps pseudospectral quadratic products exact on the retained band).
    static std::shared_ptr<const Basis> make(int grid_size, int k_max);

    /// Construction from an explicit mode list (test benches, reduced
    /// systems). The list must be nonempty, duplicate-free, closed under
    /// negation, exclude the origin, and respect the dealiasing margin.
    static std::shared_ptr<const Basis> from_modes(int grid_size, std::vector<WaveVector> modes);

    int grid_size() const { return grid_size_; }
    int k_max() const { return k_max_; }
    int size() const { return static_cast<int>(modes_.size()); }

    const std::vector<WaveVector>& modes() const { return modes_; }
    const WaveVector& mode(int j) const { return modes_[j]; }
    double eigenvalue(int j) const { return eigenvalues_[j]; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double max_eigenvalue() const { return eigenvalues_.back(); }

    /// Index of -k for mode j.
    int conjugate_index(int j) const { return conjugate_[j]; }

    /// Indices of the canonical representative of each conjugate pair
    /// (k1 > 0, or k1 == 0 and k2 > 0). size() == 2 * pair count.
    const std::vector<int>& pair_representatives() const { return pair_reps_; }

    /// Flat index of mode j in the grid_size x grid_size FFT spectrum.
    int fft_bin(int j) const { return fft_bin_[j]; }

    /// Index of wavevector k in the mode list, or -1 when not retained.
    int index_of(const WaveVector& k) const;

    bool same_as(const Basis& other) const;

  private:
    Basis() = default;
    void finalize();

    int grid_size_ = 0;
    int k_max_ = 0;
    std::vector<WaveVector> modes_;
    std::vector<double> eigenvalues_;
    std::vector<int> conjugate_;
    std::vector<int> pair_reps_;
    std::vector<int> fft_bin_;
    std::vector<int> lookup_;  // dense (2K+1)^2 table -> mode index
};

using BasisPtr = std::shared_ptr<const Basis>;

}  // namespace lal
