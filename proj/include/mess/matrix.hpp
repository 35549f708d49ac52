#ifndef MESS_MATRIX_HPP
#define MESS_MATRIX_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mess {

/// Dense real matrix in column-major order. Snapshot matrices store one
/// state vector per column, so a column is always contiguous in memory.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Adopts `data` (length rows*cols) laid out column by column.
    static Matrix from_column_major(std::size_t rows, std::size_t cols,
                                    std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept {
        return data_[j * rows_ + i];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[j * rows_ + i];
    }

    double* col(std::size_t j) noexcept { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const noexcept {
        return data_.data() + j * rows_;
    }
    std::span<double> col_span(std::size_t j) noexcept {
        return {col(j), rows_};
    }
    std::span<const double> col_span(std::size_t j) const noexcept {
        return {col(j), rows_};
    }

    std::vector<double>& storage() noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    /// New matrix made of the given columns, in the given order.
    Matrix select_columns(std::span<const std::size_t> indices) const;

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Throws ValidationError unless `x` is a well-formed snapshot matrix:
/// at least one row and one column, every entry finite.
void validate_snapshot_matrix(const Matrix& x);

double euclidean_norm(std::span<const double> x) noexcept;
double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Runs body(i) for i in [begin, end) on up to `threads` workers. The
/// partition is deterministic; bodies must be independent.
void parallel_for(std::size_t begin, std::size_t end, int threads,
                  const std::function<void(std::size_t)>& body);

} // namespace mess

#endif
