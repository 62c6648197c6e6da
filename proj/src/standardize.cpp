#include "adacnp/standardize.hpp"

#include <cmath>
#include <string>

#include "adacnp/errors.hpp"

namespace adacnp {

namespace {

// Population mean/std per column; constant columns keep scale 1.
void fit_columns(const num::Matrix& m, std::vector<double>& mean, std::vector<double>& scale) {
    std::size_t n = m.rows();
    if (n == 0) throw ContractError("standardization fit needs at least one row");
    mean.assign(m.cols(), 0.0);
    scale.assign(m.cols(), 1.0);
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += m(r, c);
        double mu = acc / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double d = m(r, c) - mu;
            var += d * d;
        }
        var /= static_cast<double>(n);
        mean[c] = mu;
        double sd = std::sqrt(var);
        scale[c] = sd > 1e-12 ? sd : 1.0;
    }
}

void apply(num::Matrix& m, const std::vector<double>& mean, const std::vector<double>& scale,
           const char* what) {
    if (m.cols() != mean.size()) {
        throw ContractError(std::string("standardization ") + what + " width " +
                            std::to_string(m.cols()) + " does not match statistics width " +
                            std::to_string(mean.size()));
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = (m(r, c) - mean[c]) / scale[c];
        }
    }
}

void invert(num::Matrix& m, const std::vector<double>& mean, const std::vector<double>& scale,
            const char* what) {
    if (m.cols() != mean.size()) {
        throw ContractError(std::string("standardization ") + what + " width " +
                            std::to_string(m.cols()) + " does not match statistics width " +
                            std::to_string(mean.size()));
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = m(r, c) * scale[c] + mean[c];
        }
    }
}

} // namespace

Standardization Standardization::fit(const num::Matrix& x, const num::Matrix& y) {
    Standardization s;
    fit_columns(x, s.x_mean, s.x_scale);
    fit_columns(y, s.y_mean, s.y_scale);
    return s;
}

void Standardization::apply_x(num::Matrix& x) const { apply(x, x_mean, x_scale, "input"); }
void Standardization::apply_y(num::Matrix& y) const { apply(y, y_mean, y_scale, "target"); }
void Standardization::invert_y(num::Matrix& y) const { invert(y, y_mean, y_scale, "target"); }
void Standardization::invert_x(num::Matrix& x) const { invert(x, x_mean, x_scale, "input"); }

void Standardization::invert_y_variance(num::Matrix& var) const {
    if (var.cols() != y_scale.size()) {
        throw ContractError("variance width " + std::to_string(var.cols()) +
                            " does not match statistics width " + std::to_string(y_scale.size()));
    }
    for (std::size_t r = 0; r < var.rows(); ++r) {
        for (std::size_t c = 0; c < var.cols(); ++c) {
            var(r, c) *= y_scale[c] * y_scale[c];
        }
    }
}

} // namespace adacnp
