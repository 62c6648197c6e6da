#pragma once

#include <span>
#include <utility>
#include <vector>

#include "adacnp/models/bundle.hpp"
#include "adacnp/models/types.hpp"

namespace adacnp::model {

// Shared embedding applied to context and target inputs alike; one embedding
// row per input row.
num::Matrix embed(const ModelBundle& bundle, const num::Matrix& xs);

// Scalar relevance score of a (context, target) embedding pair. The context
// embedding comes first in the concatenation.
double score(const ModelBundle& bundle, std::span<const double> e_ctx,
             std::span<const double> e_tgt);

// Max-shifted softmax of scores/tau; the normalizer is a value-ordered sum so
// permuted inputs give bit-identical (reordered) weights.
std::vector<double> softmax_weights(std::span<const double> scores, double tau);

// r = sum_i w_i * reps_i with value-ordered accumulation per dimension.
std::vector<double> weighted_aggregate(std::span<const double> weights,
                                       const num::Matrix& reps);

// Adaptive inference: encode contexts, embed contexts and targets, score all
// pairs, softmax per target, weighted-aggregate, decode. Returns the weight
// matrix for interpretability.
std::pair<GaussianPrediction, WeightMatrix> adacnp_predict(const ModelBundle& bundle,
                                                           const ContextSet& ctx,
                                                           const TargetBatch& targets);

} // namespace adacnp::model
