#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adacnp::num {

// Dense row-major matrix of doubles. Exported operations keep every entry
// finite; violations raise NumericalError.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> row_vec(std::size_t r) const;

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product; throws DimensionError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// y = A x for a length-cols vector.
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws NumericalError with the failing pivot when the factorization breaks down.
Matrix cholesky(const Matrix& a);

// Solves A x = rhs given the lower Cholesky factor of A.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> rhs);

// Sums values in ascending order so any permutation of the inputs produces a
// bit-identical result (used by the permutation-invariant aggregation paths).
double ordered_sum(std::span<const double> values);

} // namespace adacnp::num
