#ifndef MESS_BASIS_HPP
#define MESS_BASIS_HPP

#include <optional>
#include <vector>

#include "mess/matrix.hpp"

namespace mess {

enum class BasisProvenance { MessQr, Pod };

/// Column-orthonormal basis Q for (an approximation of) the range of a
/// snapshot sample, with the rank tolerance that produced it.
struct ReducedBasis {
    std::size_t m = 0;
    std::size_t ell = 0;
    Matrix q; ///< m x ell, column-orthonormal
    BasisProvenance provenance = BasisProvenance::MessQr;
    double numerical_rank_tol = 0.0;
    std::vector<std::size_t> dropped_columns; ///< input columns dropped as rank-deficient
};

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// residual after projection onto the accepted basis falls to
/// rank_tol * (original column norm) or below are dropped and reported in
/// dropped_columns; dropped columns stay within the span up to rank_tol.
ReducedBasis orthonormalize(const Matrix& y, double rank_tol = 1e-12);

/// Orthogonal projection x_hat = Q (Q^T x). The m x m projector is never
/// formed. Idempotent and non-expansive.
std::vector<double> project(const ReducedBasis& b, std::span<const double> x);

/// Normalization used for the relative error field of an ErrorReport.
enum class RelativeErrorNorm { Diameter, FrobeniusNorm };

/// Per-snapshot Euclidean reconstruction errors of x through a basis.
struct ErrorReport {
    std::vector<double> per_snapshot;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double eps_abs = 0.0;
};

/// Errors ||x_j - Q Q^T x_j|| for every column. max_rel divides max_abs by
/// the sample diameter or by ||X||_F; a precomputed diameter can be passed
/// to avoid recomputing it.
ErrorReport reconstruction_errors(
    const Matrix& x, const ReducedBasis& b, double eps_abs,
    RelativeErrorNorm rel_norm = RelativeErrorNorm::Diameter,
    std::optional<double> known_scale = std::nullopt, int threads = 1);

double frobenius_norm(const Matrix& x) noexcept;

} // namespace mess

#endif
