#include "adacnp/models/cnp.hpp"

#include <cmath>
#include <string>

#include "adacnp/errors.hpp"
#include "adacnp/models/gaussian.hpp"

namespace adacnp::model {

namespace {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_episode(const ModelBundle& bundle, const ContextSet& ctx,
                   const TargetBatch& targets) {
    ctx.validate();
    targets.validate();
    if (ctx.inputs.cols() != bundle.d_x || ctx.outputs.cols() != bundle.d_y) {
        throw ContractError("context dims " + std::to_string(ctx.inputs.cols()) + "/" +
                            std::to_string(ctx.outputs.cols()) +
                            " do not match bundle d_x/d_y " + std::to_string(bundle.d_x) +
                            "/" + std::to_string(bundle.d_y));
    }
    if (targets.inputs.cols() != bundle.d_x) {
        throw ContractError("target input dim " + std::to_string(targets.inputs.cols()) +
                            " does not match bundle d_x " + std::to_string(bundle.d_x));
    }
}

} // namespace

num::Matrix encode_context(const ModelBundle& bundle, const ContextSet& ctx) {
    ctx.validate();
    if (ctx.inputs.cols() != bundle.d_x || ctx.outputs.cols() != bundle.d_y) {
        throw ContractError("encode_context dims " + std::to_string(ctx.inputs.cols()) +
                            "/" + std::to_string(ctx.outputs.cols()) +
                            " do not match bundle d_x/d_y " + std::to_string(bundle.d_x) +
                            "/" + std::to_string(bundle.d_y));
    }
    num::Matrix reps(ctx.size(), bundle.d_r);
    std::vector<double> pair(bundle.d_x + bundle.d_y);
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        auto x = ctx.inputs.row(i);
        auto y = ctx.outputs.row(i);
        std::copy(x.begin(), x.end(), pair.begin());
        std::copy(y.begin(), y.end(), pair.begin() + static_cast<std::ptrdiff_t>(bundle.d_x));
        auto r = num::mlp_forward(bundle.encoder, pair);
        std::copy(r.begin(), r.end(), reps.row(i).begin());
    }
    return reps;
}

std::vector<double> uniform_aggregate(const num::Matrix& reps) {
    if (reps.rows() == 0) {
        throw ContractError("uniform_aggregate needs at least one representation");
    }
    std::vector<double> out(reps.cols());
    std::vector<double> column(reps.rows());
    for (std::size_t d = 0; d < reps.cols(); ++d) {
        for (std::size_t i = 0; i < reps.rows(); ++i) column[i] = reps(i, d);
        out[d] = num::ordered_sum(column) / static_cast<double>(reps.rows());
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> decode(const ModelBundle& bundle,
                                                           std::span<const double> target_input,
                                                           std::span<const double> representation) {
    if (target_input.size() != bundle.d_x || representation.size() != bundle.d_r) {
        throw ContractError("decode input dims " + std::to_string(target_input.size()) + "/" +
                            std::to_string(representation.size()) +
                            " do not match bundle d_x/d_r " + std::to_string(bundle.d_x) + "/" +
                            std::to_string(bundle.d_r));
    }
    std::vector<double> joint(bundle.d_x + bundle.d_r);
    std::copy(target_input.begin(), target_input.end(), joint.begin());
    std::copy(representation.begin(), representation.end(),
              joint.begin() + static_cast<std::ptrdiff_t>(bundle.d_x));
    std::vector<double> raw = num::mlp_forward(bundle.decoder, joint);
    std::vector<double> mean(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(bundle.d_y));
    std::vector<double> variance(bundle.d_y);
    for (std::size_t d = 0; d < bundle.d_y; ++d) {
        variance[d] = softplus(raw[bundle.d_y + d]) + kVarianceFloor;
    }
    return {std::move(mean), std::move(variance)};
}

GaussianPrediction cnp_predict(const ModelBundle& bundle, const ContextSet& ctx,
                               const TargetBatch& targets) {
    check_episode(bundle, ctx, targets);
    num::Matrix reps = encode_context(bundle, ctx);
    std::vector<double> r = uniform_aggregate(reps);
    GaussianPrediction pred{num::Matrix(targets.size(), bundle.d_y),
                            num::Matrix(targets.size(), bundle.d_y)};
    for (std::size_t j = 0; j < targets.size(); ++j) {
        auto [mu, var] = decode(bundle, targets.inputs.row(j), r);
        std::copy(mu.begin(), mu.end(), pred.mean.row(j).begin());
        std::copy(var.begin(), var.end(), pred.variance.row(j).begin());
    }
    return pred;
}

} // namespace adacnp::model
