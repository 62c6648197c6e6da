#include "adacnp/numeric/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "adacnp/errors.hpp"

namespace adacnp::num {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_str(rows_, cols_));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::row_vec(std::size_t r) const {
    auto s = row(r);
    return {s.begin(), s.end()};
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul shape mismatch: " + shape_str(a.rows(), a.cols()) +
                             " * " + shape_str(b.rows(), b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    if (!out.all_finite()) {
        throw NumericalError("matmul produced a non-finite entry");
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw DimensionError("matvec shape mismatch: " + shape_str(a.rows(), a.cols()) +
                             " * vector of length " + std::to_string(x.size()));
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("cholesky requires a square matrix, got " +
                             shape_str(a.rows(), a.cols()));
    }
    std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw NumericalError("cholesky pivot " + std::to_string(j) +
                                 " is non-positive (" + std::to_string(diag) +
                                 "); system is not positive definite");
        }
        double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> rhs) {
    std::size_t n = lower.rows();
    if (rhs.size() != n) {
        throw DimensionError("cholesky_solve rhs length " + std::to_string(rhs.size()) +
                             " does not match factor " + shape_str(n, n));
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
        y[i] = s / lower(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
        x[ii] = s / lower(ii, ii);
    }
    return x;
}

double ordered_sum(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (double v : sorted) acc += v;
    return acc;
}

} // namespace adacnp::num
