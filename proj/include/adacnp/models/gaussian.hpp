#pragma once

#include "adacnp/models/types.hpp"

namespace adacnp::model {

// Smallest variance any decoder head can emit, in standardized-target units.
inline constexpr double kVarianceFloor = 1e-4;

// Mean over targets and output dimensions of the Gaussian negative
// log-density 0.5*ln(2*pi*var) + (y - mu)^2 / (2*var). Accumulation is
// permutation independent. Shared by the training loss and the NLL metric.
double gaussian_nll(const GaussianPrediction& pred, const num::Matrix& truths);

} // namespace adacnp::model
