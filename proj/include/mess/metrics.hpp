#ifndef MESS_METRICS_HPP
#define MESS_METRICS_HPP

#include <cstdint>
#include <vector>

#include "mess/matrix.hpp"

namespace mess {

/// Symmetric matrix of pairwise Euclidean distances, zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return entries_[j * n_ + i];
    }
    double& at(std::size_t i, std::size_t j) noexcept {
        return entries_[j * n_ + i];
    }
    double max_entry() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

/// Boolean recurrence pattern: entry (i,j) marks whether snapshots i and j
/// lie strictly within distance eps of each other. Open balls, so the
/// diagonal is always set and a distance exactly equal to eps is not
/// recurrent. Symmetric by construction.
class RecurrenceMatrix {
public:
    RecurrenceMatrix() = default;
    explicit RecurrenceMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }
    bool operator()(std::size_t i, std::size_t j) const noexcept {
        return entries_[j * n_ + i] != 0;
    }
    void set(std::size_t i, std::size_t j, bool value) noexcept {
        entries_[j * n_ + i] = value ? 1 : 0;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> entries_;
};

/// Entropy quantities of a snapshot stream at a fixed radius eps.
///
/// With S_j the number of set entries in the leading j-by-j recurrence
/// block, the potential is v_j = S_j / j^2, the entropy eta_j = -ln v_j,
/// and the dynamical entropy h_j = eta_{j+1} - eta_j. delta_j counts twice
/// the recurrences of snapshot j+1 with its predecessors plus one, which
/// drives the potential recursion
///
///     v_1 = 1,   v_{j+1} = (j^2 v_j + delta_j) / (j+1)^2.
///
/// Vectors are 0-based: v[0] = v_1 = 1, delta[0] = delta_1. v and eta have
/// one entry per snapshot; h and delta have one entry per transition.
struct EntropyTrace {
    std::vector<double> v;
    std::vector<double> eta;
    std::vector<double> h;
    std::vector<std::uint64_t> delta;

    std::size_t steps() const noexcept { return v.size(); }
};

/// Incrementally builds an EntropyTrace from per-snapshot recurrence
/// counts. The potential recursion is evaluated over the integer count
/// S_j, which keeps every v_j an exactly rounded ratio of integers.
class EntropyTraceBuilder {
public:
    EntropyTraceBuilder();

    /// Advances the trace by one snapshot. `recurrent_with_previous` is the
    /// number of previous snapshots whose ball contains the new one.
    void push(std::uint64_t recurrent_with_previous);

    std::size_t steps() const noexcept { return trace_.v.size(); }
    double current_v() const noexcept { return trace_.v.back(); }
    const EntropyTrace& trace() const noexcept { return trace_; }
    EntropyTrace take() && noexcept { return std::move(trace_); }

private:
    EntropyTrace trace_;
    std::uint64_t frobenius_count_ = 1; // set entries in the leading block
};

/// Pairwise Euclidean distances between the columns of x, by direct
/// differencing of the column pairs.
DistanceMatrix pairwise_distances(const Matrix& x, int threads = 1);

/// Maximum pairwise distance between columns of x. Computed streaming,
/// without materializing the distance matrix.
double diameter(const Matrix& x, int threads = 1);

/// Thresholds a distance matrix at radius eps (strict inequality).
RecurrenceMatrix recurrence_matrix(const DistanceMatrix& d, double eps);

/// Full entropy trace of a recurrence matrix, leading block by leading
/// block via the potential recursion.
EntropyTrace entropy_trace(const RecurrenceMatrix& r);

/// True iff eta is strictly increasing step over step.
bool strictly_increasing(const std::vector<double>& eta) noexcept;

} // namespace mess

#endif
