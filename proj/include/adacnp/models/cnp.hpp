#pragma once

#include <utility>
#include <vector>

#include "adacnp/models/bundle.hpp"
#include "adacnp/models/types.hpp"

namespace adacnp::model {

// r_i = h(x_i, y_i) per context pair; one representation row per context.
num::Matrix encode_context(const ModelBundle& bundle, const ContextSet& ctx);

// Permutation-invariant arithmetic mean over the context axis. Summation is
// value-ordered, so any permutation of the rows gives a bit-identical result.
std::vector<double> uniform_aggregate(const num::Matrix& reps);

// Decoder head: first d_y outputs are the mean, second half maps through
// softplus plus the variance floor.
std::pair<std::vector<double>, std::vector<double>> decode(const ModelBundle& bundle,
                                                           std::span<const double> target_input,
                                                           std::span<const double> representation);

// Standard CNP pipeline: encode, mean-aggregate, decode each target.
GaussianPrediction cnp_predict(const ModelBundle& bundle, const ContextSet& ctx,
                               const TargetBatch& targets);

} // namespace adacnp::model
