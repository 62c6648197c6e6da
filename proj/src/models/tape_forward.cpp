#include "adacnp/models/tape_forward.hpp"

#include "adacnp/errors.hpp"
#include "adacnp/models/gaussian.hpp"

namespace adacnp::model {

using num::NodeId;
using num::Tape;

TapeMlp TapeMlp::record(Tape& tape, const num::MlpParams& params) {
    TapeMlp net;
    net.params = &params;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        net.weight_leaves.push_back(tape.leaf(params.weights[k].data()));
        net.bias_leaves.push_back(tape.leaf(std::span<const double>(params.biases[k])));
    }
    return net;
}

NodeId TapeMlp::forward(Tape& tape, NodeId input) const {
    NodeId h = input;
    for (std::size_t k = 0; k < weight_leaves.size(); ++k) {
        h = tape.affine(weight_leaves[k], bias_leaves[k], h);
        if (k + 1 < weight_leaves.size()) {
            h = params->activation == num::Activation::kTanh ? tape.tanh_activation(h)
                                                             : tape.relu(h);
        }
    }
    return h;
}

TapeBundle TapeBundle::record(Tape& tape, const ModelBundle& bundle) {
    TapeBundle nets;
    nets.encoder = TapeMlp::record(tape, bundle.encoder);
    nets.embedding = TapeMlp::record(tape, bundle.embedding);
    nets.scorer = TapeMlp::record(tape, bundle.scorer);
    nets.decoder = TapeMlp::record(tape, bundle.decoder);
    return nets;
}

std::vector<std::vector<double>> TapeBundle::gradient_blocks(const Tape& tape) const {
    std::vector<std::vector<double>> blocks;
    for (const TapeMlp* net : {&encoder, &embedding, &scorer, &decoder}) {
        for (std::size_t k = 0; k < net->weight_leaves.size(); ++k) {
            auto gw = tape.grad(net->weight_leaves[k]);
            blocks.emplace_back(gw.begin(), gw.end());
            auto gb = tape.grad(net->bias_leaves[k]);
            blocks.emplace_back(gb.begin(), gb.end());
        }
    }
    return blocks;
}

NodeId record_episode_nll(Tape& tape, const TapeBundle& nets, const ModelBundle& bundle,
                          const ContextSet& ctx, const TargetBatch& targets,
                          ModelKind kind) {
    if (!targets.outputs) {
        throw ContractError("record_episode_nll requires target outputs");
    }
    if (kind == ModelKind::kGp) {
        throw ContractError("the GP baseline has no gradient-trained parameters");
    }
    ctx.validate();
    targets.validate();

    std::size_t n_c = ctx.size();
    std::size_t n_t = targets.size();

    // Context constants and encodings.
    std::vector<NodeId> ctx_x(n_c), reps(n_c);
    for (std::size_t i = 0; i < n_c; ++i) {
        ctx_x[i] = tape.constant(ctx.inputs.row(i));
        NodeId y = tape.constant(ctx.outputs.row(i));
        reps[i] = nets.encoder.forward(tape, tape.concat(ctx_x[i], y));
    }

    std::vector<NodeId> ctx_e;
    if (kind == ModelKind::kAdaCnp) {
        ctx_e.resize(n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
            ctx_e[i] = nets.embedding.forward(tape, ctx_x[i]);
        }
    }

    NodeId shared_r = 0;
    if (kind == ModelKind::kCnp) {
        shared_r = tape.mean_stack(reps);
    }

    std::vector<NodeId> per_target(n_t);
    std::vector<NodeId> scores(n_c);
    for (std::size_t j = 0; j < n_t; ++j) {
        NodeId x_t = tape.constant(targets.inputs.row(j));
        NodeId r_j;
        if (kind == ModelKind::kAdaCnp) {
            NodeId e_t = nets.embedding.forward(tape, x_t);
            for (std::size_t i = 0; i < n_c; ++i) {
                scores[i] = nets.scorer.forward(tape, tape.concat(ctx_e[i], e_t));
            }
            NodeId packed = tape.collect(scores);
            NodeId weights = tape.softmax_temperature(packed, bundle.tau);
            r_j = tape.weighted_sum(weights, reps);
        } else {
            r_j = shared_r;
        }
        NodeId raw = nets.decoder.forward(tape, tape.concat(x_t, r_j));
        NodeId mu = tape.slice(raw, 0, bundle.d_y);
        NodeId var = tape.softplus_floor(tape.slice(raw, bundle.d_y, bundle.d_y),
                                         kVarianceFloor);
        NodeId y_t = tape.constant(targets.outputs->row(j));
        per_target[j] = tape.gaussian_nll_sum(mu, var, y_t);
    }
    NodeId total = tape.sum(per_target);
    return tape.scale(total, 1.0 / static_cast<double>(n_t * bundle.d_y));
}

} // namespace adacnp::model
