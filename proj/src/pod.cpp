#include "mess/pod.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "mess/errors.hpp"

namespace mess {

SvdFactors svd(const Matrix& x) {
    validate_snapshot_matrix(x);
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    const std::size_t r = std::min(m, n);
    const auto lm = static_cast<lapack_int>(m);
    const auto ln = static_cast<lapack_int>(n);
    const auto lr = static_cast<lapack_int>(r);

    std::vector<double> a(x.storage().begin(), x.storage().end());
    std::vector<double> u(m * r);
    std::vector<double> sigma(r);
    std::vector<double> vt(r * n);

    lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', lm, ln, a.data(),
                                     lm, sigma.data(), u.data(), lm, vt.data(),
                                     lr);
    if (info != 0) {
        // divide-and-conquer failed to converge; retry with the QR-based driver
        a.assign(x.storage().begin(), x.storage().end());
        std::vector<double> superb(r > 1 ? r - 1 : 1);
        info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', lm, ln, a.data(), lm,
                              sigma.data(), u.data(), lm, vt.data(), lr,
                              superb.data());
        if (info != 0) {
            std::ostringstream msg;
            msg << "SVD failed to converge (driver info = " << info << ", "
                << m << "x" << n << " input)";
            throw NumericalError(msg.str());
        }
    }

    SvdFactors f;
    f.u = Matrix::from_column_major(m, r, u);
    f.sigma = std::move(sigma);
    Matrix v(n, r);
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            v(j, k) = vt[k + j * r];
        }
    }
    f.v = std::move(v);
    return f;
}

EnergyTruncation truncate_energy(std::span<const double> sigma, double eps) {
    if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
        throw ParameterError("energy fraction must lie in (0, 1)");
    }
    if (sigma.empty()) {
        throw ParameterError("empty singular value list");
    }
    double total = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        const double s = sigma[k];
        if (!std::isfinite(s) || s < 0.0) {
            throw ParameterError("singular values must be finite and non-negative");
        }
        if (k > 0 && s > sigma[k - 1]) {
            throw ParameterError("singular values must be non-increasing");
        }
        total += s * s;
        if (s > 0.0) rank = k + 1;
    }
    if (rank == 0) {
        throw DegenerateInputError("all singular values are zero");
    }
    const double target = (1.0 - eps * eps) * total;
    double cum = 0.0;
    EnergyTruncation t;
    for (std::size_t k = 0; k < rank; ++k) {
        cum += sigma[k] * sigma[k];
        if (cum >= target) {
            t.ell = k + 1;
            t.reached_rank = (t.ell == rank);
            return t;
        }
    }
    t.ell = rank;
    t.reached_rank = true;
    return t;
}

double rank_threshold(const SvdFactors& f, std::size_t m, std::size_t n) noexcept {
    const double smax = f.sigma.empty() ? 0.0 : f.sigma.front();
    return smax * static_cast<double>(std::max(m, n)) *
           std::numeric_limits<double>::epsilon();
}

ReducedBasis pod_basis(const Matrix& x, const PodTarget& target) {
    const SvdFactors f = svd(x);
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    const double tol = rank_threshold(f, m, n);

    std::size_t rank = 0;
    for (double s : f.sigma) {
        if (s > tol) ++rank;
    }
    if (rank == 0) {
        throw DegenerateInputError("input matrix is numerically zero");
    }

    std::size_t ell = 0;
    if (const auto* size = std::get_if<BasisSize>(&target)) {
        if (size->ell < 1 || size->ell > rank) {
            std::ostringstream msg;
            msg << "requested basis size " << size->ell
                << " outside [1, " << rank << "] (numerical rank)";
            throw ParameterError(msg.str());
        }
        ell = size->ell;
    } else {
        const auto& frac = std::get<EnergyFraction>(target);
        ell = truncate_energy(f.sigma, frac.eps).ell;
        if (ell > rank) ell = rank;
    }

    ReducedBasis basis;
    basis.m = m;
    basis.ell = ell;
    basis.provenance = BasisProvenance::Pod;
    basis.numerical_rank_tol = tol;
    std::vector<std::size_t> keep(ell);
    for (std::size_t k = 0; k < ell; ++k) keep[k] = k;
    basis.q = f.u.select_columns(keep);
    return basis;
}

} // namespace mess
