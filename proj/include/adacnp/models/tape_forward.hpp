#pragma once

#include <vector>

#include "adacnp/models/bundle.hpp"
#include "adacnp/models/types.hpp"
#include "adacnp/numeric/tape.hpp"

namespace adacnp::model {

// One network's parameters registered as tape leaves (weights and biases per
// layer, declaration order).
struct TapeMlp {
    const num::MlpParams* params = nullptr;
    std::vector<num::NodeId> weight_leaves;
    std::vector<num::NodeId> bias_leaves;

    static TapeMlp record(num::Tape& tape, const num::MlpParams& params);
    num::NodeId forward(num::Tape& tape, num::NodeId input) const;
};

// All four networks on one tape; leaf order mirrors
// ModelBundle::param_spans().
struct TapeBundle {
    TapeMlp encoder, embedding, scorer, decoder;

    static TapeBundle record(num::Tape& tape, const ModelBundle& bundle);
    // Gradient blocks in param_spans() order; call after tape.backward().
    std::vector<std::vector<double>> gradient_blocks(const num::Tape& tape) const;
};

// Records the full episode loss (mean Gaussian NLL over targets and output
// dimensions) for the chosen prediction path. Target outputs must be present.
num::NodeId record_episode_nll(num::Tape& tape, const TapeBundle& nets,
                               const ModelBundle& bundle, const ContextSet& ctx,
                               const TargetBatch& targets, ModelKind kind);

} // namespace adacnp::model
