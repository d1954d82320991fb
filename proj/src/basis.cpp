#include "lal/basis.hpp"

#include <algorithm>
#include <sstream>

#include "lal/errors.hpp"

namespace lal {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_grid(int grid_size, int k_max) {
    if (grid_size < 8 || !power_of_two(grid_size)) {
        std::ostringstream os;
        os << "grid_size must be a power of two >= 8, got " << grid_size;
        throw ConfigError(ConfigError::Kind::constraint, os.str());
    }
    if (k_max < 1 || 3 * k_max > grid_size) {
        std::ostringstream os;
        os << "k_max must satisfy 1 <= k_max <= grid_size/3 (dealiasing margin), got k_max=" << k_max
           << " with grid_size=" << grid_size;
        throw ConfigError(ConfigError::Kind::constraint, os.str());
    }
}

}  // namespace

std::shared_ptr<const Basis> Basis::make(int grid_size, int k_max) {
    check_grid(grid_size, k_max);
    std::vector<WaveVector> modes;
    modes.reserve(static_cast<size_t>(2 * k_max + 1) * (2 * k_max + 1) - 1);
    for (int k1 = -k_max; k1 <= k_max; ++k1)
        for (int k2 = -k_max; k2 <= k_max; ++k2)
            if (k1 != 0 || k2 != 0) modes.push_back({k1, k2});
    return from_modes(grid_size, std::move(modes));
}

std::shared_ptr<const Basis> Basis::from_modes(int grid_size, std::vector<WaveVector> modes) {
    if (modes.empty()) throw ConfigError(ConfigError::Kind::constraint, "mode list must be nonempty");
    int k_inf = 0;
    for (const auto& k : modes) k_inf = std::max({k_inf, std::abs(k.k1), std::abs(k.k2)});
    check_grid(grid_size, k_inf);
    for (const auto& k : modes)
        if (k.k1 == 0 && k.k2 == 0)
            throw ConfigError(ConfigError::Kind::constraint, "the mean mode (0,0) is excluded from the basis");

    auto b = std::shared_ptr<Basis>(new Basis());
    b->grid_size_ = grid_size;
    b->k_max_ = k_inf;
    b->modes_ = std::move(modes);
    b->finalize();
    return b;
}

void Basis::finalize() {
    auto lam = [](const WaveVector& k) {
        return static_cast<double>(k.k1) * k.k1 + static_cast<double>(k.k2) * k.k2;
    };
    std::sort(modes_.begin(), modes_.end(), [&](const WaveVector& a, const WaveVector& b) {
        double la = lam(a), lb = lam(b);
        if (la != lb) return la < lb;
        if (a.k1 != b.k1) return a.k1 < b.k1;
        return a.k2 < b.k2;
    });
    for (size_t j = 1; j < modes_.size(); ++j)
        if (modes_[j] == modes_[j - 1])
            throw ConfigError(ConfigError::Kind::constraint, "duplicate wavevector in mode list");

    const int side = 2 * k_max_ + 1;
    lookup_.assign(static_cast<size_t>(side) * side, -1);
    eigenvalues_.resize(modes_.size());
    fft_bin_.resize(modes_.size());
    for (size_t j = 0; j < modes_.size(); ++j) {
        const auto& k = modes_[j];
        eigenvalues_[j] = lam(k);
        lookup_[static_cast<size_t>(k.k1 + k_max_) * side + (k.k2 + k_max_)] = static_cast<int>(j);
        const int b1 = (k.k1 % grid_size_ + grid_size_) % grid_size_;
        const int b2 = (k.k2 % grid_size_ + grid_size_) % grid_size_;
        fft_bin_[j] = b1 * grid_size_ + b2;
    }

    conjugate_.resize(modes_.size());
    pair_reps_.clear();
    for (size_t j = 0; j < modes_.size(); ++j) {
        const auto& k = modes_[j];
        const int jc = index_of({-k.k1, -k.k2});
        if (jc < 0) throw ConfigError(ConfigError::Kind::constraint, "mode list is not closed under negation");
        conjugate_[j] = jc;
        if (k.k1 > 0 || (k.k1 == 0 && k.k2 > 0)) pair_reps_.push_back(static_cast<int>(j));
    }
}

int Basis::index_of(const WaveVector& k) const {
    if (std::abs(k.k1) > k_max_ || std::abs(k.k2) > k_max_) return -1;
    const int side = 2 * k_max_ + 1;
    return lookup_[static_cast<size_t>(k.k1 + k_max_) * side + (k.k2 + k_max_)];
}

bool Basis::same_as(const Basis& other) const {
    return this == &other || (grid_size_ == other.grid_size_ && modes_ == other.modes_);
}

}  // namespace lal
