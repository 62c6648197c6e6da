#pragma once

#include <vector>

#include "adacnp/models/types.hpp"

namespace adacnp::model {

// Squared-exponential kernel hyperparameters for the exact GP baseline.
struct GpConfig {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 1e-2;

    void validate() const;
};

// Exact GP regression with a shared kernel across output dimensions: posterior
// mean per dimension via one Cholesky solve, posterior variance broadcast over
// dimensions and clamped to >= 0.
GaussianPrediction gp_predict(const GpConfig& cfg, const ContextSet& ctx,
                              const TargetBatch& targets);

// Log marginal likelihood of the context observations, summed over output
// dimensions.
double gp_log_marginal_likelihood(const GpConfig& cfg, const ContextSet& ctx);

// Grid search over fixed logarithmic grids, maximizing the summed log marginal
// likelihood across the supplied episodes. Deterministic.
GpConfig fit_gp(const std::vector<ContextSet>& episodes);

} // namespace adacnp::model
