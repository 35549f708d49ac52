#include "mess/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "mess/errors.hpp"

namespace mess {

double DistanceMatrix::max_entry() const noexcept {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, v);
    return m;
}

EntropyTraceBuilder::EntropyTraceBuilder() {
    trace_.v.push_back(1.0);
    trace_.eta.push_back(0.0);
}

void EntropyTraceBuilder::push(std::uint64_t recurrent_with_previous) {
    const std::uint64_t j = trace_.v.size(); // steps so far, 1-based index j
    const std::uint64_t delta = 2 * recurrent_with_previous + 1;
    frobenius_count_ += delta;
    const std::uint64_t next = j + 1;
    const double v = static_cast<double>(frobenius_count_) /
                     (static_cast<double>(next) * static_cast<double>(next));
    trace_.delta.push_back(delta);
    trace_.v.push_back(v);
    trace_.eta.push_back(v == 1.0 ? 0.0 : -std::log(v));
    trace_.h.push_back(trace_.eta[next - 1] - trace_.eta[next - 2]);
}

DistanceMatrix pairwise_distances(const Matrix& x, int threads) {
    validate_snapshot_matrix(x);
    const std::size_t n = x.cols();
    DistanceMatrix d(n);
    parallel_for(0, n, threads, [&](std::size_t j) {
        for (std::size_t i = 0; i < j; ++i) {
            const double dist = euclidean_distance(x.col_span(i), x.col_span(j));
            d.at(i, j) = dist;
            d.at(j, i) = dist;
        }
    });
    return d;
}

double diameter(const Matrix& x, int threads) {
    validate_snapshot_matrix(x);
    const std::size_t n = x.cols();
    std::vector<double> col_max(n, 0.0);
    parallel_for(0, n, threads, [&](std::size_t j) {
        double m = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            m = std::max(m, euclidean_distance(x.col_span(i), x.col_span(j)));
        col_max[j] = m;
    });
    return *std::max_element(col_max.begin(), col_max.end());
}

RecurrenceMatrix recurrence_matrix(const DistanceMatrix& d, double eps) {
    if (!(eps > 0.0))
        throw ParameterError("recurrence radius eps must be positive");
    const std::size_t n = d.size();
    RecurrenceMatrix r(n);
    for (std::size_t j = 0; j < n; ++j) {
        r.set(j, j, true);
        for (std::size_t i = 0; i < j; ++i) {
            const bool rec = d(i, j) < eps;
            r.set(i, j, rec);
            r.set(j, i, rec);
        }
    }
    return r;
}

EntropyTrace entropy_trace(const RecurrenceMatrix& r) {
    const std::size_t n = r.size();
    if (n == 0) throw ValidationError("recurrence matrix is empty");
    EntropyTraceBuilder builder;
    for (std::size_t j = 1; j < n; ++j) {
        std::uint64_t count = 0;
        for (std::size_t k = 0; k < j; ++k)
            if (r(j, k)) ++count;
        builder.push(count);
    }
    return std::move(builder).take();
}

bool strictly_increasing(const std::vector<double>& eta) noexcept {
    for (std::size_t i = 1; i < eta.size(); ++i)
        if (!(eta[i] > eta[i - 1])) return false;
    return true;
}

} // namespace mess
