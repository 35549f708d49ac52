#include "mess/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "mess/errors.hpp"

namespace mess {

Matrix Matrix::from_column_major(std::size_t rows, std::size_t cols,
                                 std::vector<double> data) {
    if (data.size() != rows * cols)
        throw ParameterError("matrix data length " +
                             std::to_string(data.size()) + " does not match " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

Matrix Matrix::select_columns(std::span<const std::size_t> indices) const {
    Matrix out(rows_, indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= cols_)
            throw ParameterError("column index " + std::to_string(indices[k]) +
                                 " out of range for " + std::to_string(cols_) +
                                 " columns");
        const double* src = col(indices[k]);
        double* dst = out.col(k);
        for (std::size_t i = 0; i < rows_; ++i) dst[i] = src[i];
    }
    return out;
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void validate_snapshot_matrix(const Matrix& x) {
    if (x.rows() == 0 || x.cols() == 0)
        throw ValidationError("snapshot matrix must have at least one row and one column");
    if (!x.all_finite())
        throw ValidationError("snapshot matrix contains non-finite entries");
}

double euclidean_norm(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void parallel_for(std::size_t begin, std::size_t end, int threads,
                  const std::function<void(std::size_t)>& body) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    std::size_t workers = threads > 1 ? static_cast<std::size_t>(threads) : 1;
    if (workers > count) workers = count;
    if (workers == 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    // Contiguous blocks, worker w gets [begin + w*chunk, ...). Deterministic
    // regardless of scheduling since bodies are independent.
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace mess
