#include "mess/basis.hpp"

#include <cmath>
#include <sstream>

#include "mess/errors.hpp"
#include "mess/metrics.hpp"

namespace mess {

ReducedBasis orthonormalize(const Matrix& y, double rank_tol) {
    validate_snapshot_matrix(y);
    if (!std::isfinite(rank_tol) || rank_tol <= 0.0) {
        throw ParameterError("rank tolerance must be a finite positive number");
    }
    const std::size_t m = y.rows();
    const std::size_t n = y.cols();

    ReducedBasis basis;
    basis.m = m;
    basis.provenance = BasisProvenance::MessQr;
    basis.numerical_rank_tol = rank_tol;

    std::vector<double> qdata;
    std::vector<double> r(m);
    std::size_t ell = 0;

    for (std::size_t j = 0; j < n; ++j) {
        const double* col = y.col(j);
        r.assign(col, col + m);
        const double norm0 = euclidean_norm(r);
        if (norm0 == 0.0) {
            basis.dropped_columns.push_back(j);
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < ell; ++k) {
                const double* qk = qdata.data() + k * m;
                double c = 0.0;
                for (std::size_t i = 0; i < m; ++i) c += qk[i] * r[i];
                for (std::size_t i = 0; i < m; ++i) r[i] -= c * qk[i];
            }
        }
        const double norm1 = euclidean_norm(r);
        if (norm1 <= rank_tol * norm0) {
            basis.dropped_columns.push_back(j);
            continue;
        }
        const double inv = 1.0 / norm1;
        for (std::size_t i = 0; i < m; ++i) r[i] *= inv;
        qdata.insert(qdata.end(), r.begin(), r.end());
        ++ell;
    }

    if (ell == 0) {
        throw DegenerateInputError("every input column is zero; no basis exists");
    }
    basis.ell = ell;
    basis.q = Matrix::from_column_major(m, ell, qdata);
    return basis;
}

std::vector<double> project(const ReducedBasis& b, std::span<const double> x) {
    if (x.size() != b.m) {
        std::ostringstream msg;
        msg << "vector length " << x.size() << " does not match basis dimension "
            << b.m;
        throw ParameterError(msg.str());
    }
    const std::size_t m = b.m;
    const std::size_t ell = b.ell;
    std::vector<double> coeff(ell, 0.0);
    for (std::size_t k = 0; k < ell; ++k) {
        const double* qk = b.q.col(k);
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += qk[i] * x[i];
        coeff[k] = c;
    }
    std::vector<double> xhat(m, 0.0);
    for (std::size_t k = 0; k < ell; ++k) {
        const double* qk = b.q.col(k);
        const double c = coeff[k];
        for (std::size_t i = 0; i < m; ++i) xhat[i] += c * qk[i];
    }
    return xhat;
}

double frobenius_norm(const Matrix& x) noexcept {
    double s = 0.0;
    for (double v : x.storage()) s += v * v;
    return std::sqrt(s);
}

ErrorReport reconstruction_errors(const Matrix& x, const ReducedBasis& b,
                                  double eps_abs, RelativeErrorNorm rel_norm,
                                  std::optional<double> known_scale,
                                  int threads) {
    validate_snapshot_matrix(x);
    if (x.rows() != b.m) {
        std::ostringstream msg;
        msg << "snapshot dimension " << x.rows()
            << " does not match basis dimension " << b.m;
        throw ParameterError(msg.str());
    }
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    const std::size_t ell = b.ell;

    ErrorReport report;
    report.per_snapshot.assign(n, 0.0);
    report.eps_abs = eps_abs;

    parallel_for(0, n, threads, [&](std::size_t j) {
        const double* xj = x.col(j);
        std::vector<double> coeff(ell);
        for (std::size_t k = 0; k < ell; ++k) {
            const double* qk = b.q.col(k);
            double c = 0.0;
            for (std::size_t i = 0; i < m; ++i) c += qk[i] * xj[i];
            coeff[k] = c;
        }
        std::vector<double> resid(xj, xj + m);
        for (std::size_t k = 0; k < ell; ++k) {
            const double* qk = b.q.col(k);
            const double c = coeff[k];
            for (std::size_t i = 0; i < m; ++i) resid[i] -= c * qk[i];
        }
        report.per_snapshot[j] = euclidean_norm(resid);
    });

    for (double e : report.per_snapshot) {
        if (e > report.max_abs) report.max_abs = e;
    }
    double scale = 0.0;
    if (known_scale) {
        scale = *known_scale;
    } else if (rel_norm == RelativeErrorNorm::Diameter) {
        scale = diameter(x, threads);
    } else {
        scale = frobenius_norm(x);
    }
    report.max_rel = scale > 0.0 ? report.max_abs / scale : 0.0;
    return report;
}

} // namespace mess
