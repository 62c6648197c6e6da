#pragma once

#include <optional>

#include "adacnp/numeric/matrix.hpp"

namespace adacnp::model {

// Observed conditioning pairs for one prediction episode; one row per point.
struct ContextSet {
    num::Matrix inputs;   // n_c x d_x
    num::Matrix outputs;  // n_c x d_y

    std::size_t size() const { return inputs.rows(); }
    void validate() const;
};

// Query inputs; outputs are present when the batch is used for scoring.
struct TargetBatch {
    num::Matrix inputs;                  // n_t x d_x
    std::optional<num::Matrix> outputs;  // n_t x d_y

    std::size_t size() const { return inputs.rows(); }
    void validate() const;
};

// Per-target Gaussian predictive parameters (diagonal covariance).
struct GaussianPrediction {
    num::Matrix mean;      // n_t x d_y
    num::Matrix variance;  // n_t x d_y, strictly positive
};

// Target-conditioned context weights; each row is a distribution over the
// context points.
struct WeightMatrix {
    num::Matrix w;  // n_t x n_c

    void validate() const;
};

} // namespace adacnp::model
