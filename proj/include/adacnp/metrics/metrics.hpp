#pragma once

#include <string>
#include <vector>

#include "adacnp/models/types.hpp"

namespace adacnp::metrics {

// Inverse standard-normal CDF (rational approximation, absolute error well
// below 1e-9). Requires p in (0, 1).
double inverse_normal_cdf(double p);

// Deciles {0.1, ..., 0.9}; the paper reports one pinball number without
// naming its level set.
std::vector<double> default_quantile_levels();

// Mean squared error on standardized targets, times 100.
double mse_percent(const num::Matrix& pred_means, const num::Matrix& truths);

// Mean Gaussian negative log-likelihood; shares the models implementation.
double nll_mean(const model::GaussianPrediction& pred, const num::Matrix& truths);

// Quantile forecasts are Gaussian: y_q = mu + sigma * z_q. Loss per point is
// q*(y - y_q) when y >= y_q, else (1-q)*(y_q - y); averaged over points,
// dimensions and levels.
double pinball(const model::GaussianPrediction& pred, const num::Matrix& truths,
               const std::vector<double>& quantile_levels);

// Per-metric mean and spread (standard deviation) over context resamples.
struct MetricsReport {
    double mse_percent = 0.0;
    double nll = 0.0;
    double pinball = 0.0;
    double mse_percent_spread = 0.0;
    double nll_spread = 0.0;
    double pinball_spread = 0.0;
    std::size_t resamples = 0;
    std::size_t points_per_resample = 0;

    // Structured key-value document consumed by the CLI's report writer.
    std::string to_text() const;
};

} // namespace adacnp::metrics
