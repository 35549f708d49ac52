#ifndef MESS_POD_HPP
#define MESS_POD_HPP

#include <span>
#include <variant>
#include <vector>

#include "mess/basis.hpp"
#include "mess/matrix.hpp"

namespace mess {

/// Economy SVD X = U diag(sigma) V^T with r = min(m, n) columns.
struct SvdFactors {
    Matrix u;                  ///< m x r
    std::vector<double> sigma; ///< length r, non-increasing, non-negative
    Matrix v;                  ///< n x r
};

SvdFactors svd(const Matrix& x);

struct EnergyTruncation {
    std::size_t ell = 0;
    /// True when no size below the positive rank meets the energy target and
    /// ell was capped at the rank.
    bool reached_rank = false;
};

/// Smallest ell with sum_{k<=ell} sigma_k^2 >= (1 - eps^2) * sum_k sigma_k^2.
EnergyTruncation truncate_energy(std::span<const double> sigma, double eps);

struct BasisSize {
    std::size_t ell;
};
struct EnergyFraction {
    double eps;
};
using PodTarget = std::variant<BasisSize, EnergyFraction>;

/// Leading left singular vectors as a ReducedBasis. A requested size larger
/// than the numerical rank is a parameter error.
ReducedBasis pod_basis(const Matrix& x, const PodTarget& target);

/// Numerical rank threshold used by pod_basis: sigma_max * max(m, n) * ulp.
double rank_threshold(const SvdFactors& f, std::size_t m, std::size_t n) noexcept;

} // namespace mess

#endif
