#include "adacnp/models/gaussian.hpp"

#include <cmath>
#include <string>

#include "adacnp/errors.hpp"

namespace adacnp::model {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void ContextSet::validate() const {
    if (inputs.rows() == 0) {
        throw ContractError("context set must contain at least one point");
    }
    if (inputs.rows() != outputs.rows()) {
        throw ContractError("context inputs/outputs row counts disagree: " +
                            std::to_string(inputs.rows()) + " vs " +
                            std::to_string(outputs.rows()));
    }
}

void TargetBatch::validate() const {
    if (inputs.rows() == 0) {
        throw ContractError("target batch must contain at least one point");
    }
    if (outputs && outputs->rows() != inputs.rows()) {
        throw ContractError("target inputs/outputs row counts disagree: " +
                            std::to_string(inputs.rows()) + " vs " +
                            std::to_string(outputs->rows()));
    }
}

void WeightMatrix::validate() const {
    for (std::size_t j = 0; j < w.rows(); ++j) {
        double row_sum = 0.0;
        for (std::size_t i = 0; i < w.cols(); ++i) {
            double v = w(j, i);
            if (v < 0.0 || v > 1.0) {
                throw ContractError("weight outside [0, 1] at row " + std::to_string(j));
            }
            row_sum += v;
        }
        if (std::abs(row_sum - 1.0) > 1e-12) {
            throw ContractError("weight row " + std::to_string(j) + " sums to " +
                                std::to_string(row_sum));
        }
    }
}

double gaussian_nll(const GaussianPrediction& pred, const num::Matrix& truths) {
    if (pred.mean.rows() != truths.rows() || pred.mean.cols() != truths.cols() ||
        pred.variance.rows() != truths.rows() || pred.variance.cols() != truths.cols()) {
        throw ContractError("gaussian_nll shape mismatch: prediction " +
                            std::to_string(pred.mean.rows()) + "x" +
                            std::to_string(pred.mean.cols()) + ", truths " +
                            std::to_string(truths.rows()) + "x" +
                            std::to_string(truths.cols()));
    }
    auto mu = pred.mean.data();
    auto var = pred.variance.data();
    auto y = truths.data();
    std::vector<double> terms(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(var[i] > 0.0)) {
            throw ContractError("gaussian_nll requires positive variances");
        }
        double d = y[i] - mu[i];
        terms[i] = 0.5 * std::log(kTwoPi * var[i]) + d * d / (2.0 * var[i]);
    }
    return num::ordered_sum(terms) / static_cast<double>(terms.size());
}

} // namespace adacnp::model
