#include "adacnp/models/adacnp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adacnp/errors.hpp"
#include "adacnp/models/cnp.hpp"
#include "adacnp/models/gaussian.hpp"

namespace adacnp::model {

num::Matrix embed(const ModelBundle& bundle, const num::Matrix& xs) {
    if (xs.cols() != bundle.d_x) {
        throw ContractError("embed input dim " + std::to_string(xs.cols()) +
                            " does not match bundle d_x " + std::to_string(bundle.d_x));
    }
    num::Matrix out(xs.rows(), bundle.d_e);
    for (std::size_t i = 0; i < xs.rows(); ++i) {
        auto e = num::mlp_forward(bundle.embedding, xs.row(i));
        std::copy(e.begin(), e.end(), out.row(i).begin());
    }
    return out;
}

double score(const ModelBundle& bundle, std::span<const double> e_ctx,
             std::span<const double> e_tgt) {
    if (e_ctx.size() != bundle.d_e || e_tgt.size() != bundle.d_e) {
        throw ContractError("score embedding dims " + std::to_string(e_ctx.size()) + "/" +
                            std::to_string(e_tgt.size()) + " do not match bundle d_e " +
                            std::to_string(bundle.d_e));
    }
    std::vector<double> joint(2 * bundle.d_e);
    std::copy(e_ctx.begin(), e_ctx.end(), joint.begin());
    std::copy(e_tgt.begin(), e_tgt.end(), joint.begin() + static_cast<std::ptrdiff_t>(bundle.d_e));
    return num::mlp_forward(bundle.scorer, joint)[0];
}

std::vector<double> softmax_weights(std::span<const double> scores, double tau) {
    if (!(tau > 0.0)) {
        throw ContractError("softmax temperature must be positive, got " + std::to_string(tau));
    }
    if (scores.empty()) {
        throw ContractError("softmax_weights needs at least one score");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw ContractError("softmax_weights requires finite scores");
        }
    }
    double m = scores[0];
    for (double s : scores) m = std::max(m, s);
    std::vector<double> w(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) w[i] = std::exp((scores[i] - m) / tau);
    double z = num::ordered_sum(w);
    for (double& v : w) v /= z;
    return w;
}

std::vector<double> weighted_aggregate(std::span<const double> weights,
                                       const num::Matrix& reps) {
    if (weights.size() != reps.rows()) {
        throw ContractError("weighted_aggregate got " + std::to_string(weights.size()) +
                            " weights for " + std::to_string(reps.rows()) +
                            " representations");
    }
    std::vector<double> out(reps.cols());
    std::vector<double> products(reps.rows());
    for (std::size_t d = 0; d < reps.cols(); ++d) {
        for (std::size_t i = 0; i < reps.rows(); ++i) products[i] = weights[i] * reps(i, d);
        out[d] = num::ordered_sum(products);
    }
    return out;
}

std::pair<GaussianPrediction, WeightMatrix> adacnp_predict(const ModelBundle& bundle,
                                                           const ContextSet& ctx,
                                                           const TargetBatch& targets) {
    ctx.validate();
    targets.validate();
    num::Matrix reps = encode_context(bundle, ctx);
    num::Matrix e_ctx = embed(bundle, ctx.inputs);
    num::Matrix e_tgt = embed(bundle, targets.inputs);

    GaussianPrediction pred{num::Matrix(targets.size(), bundle.d_y),
                            num::Matrix(targets.size(), bundle.d_y)};
    WeightMatrix weights{num::Matrix(targets.size(), ctx.size())};
    std::vector<double> scores(ctx.size());
    for (std::size_t j = 0; j < targets.size(); ++j) {
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            scores[i] = score(bundle, e_ctx.row(i), e_tgt.row(j));
        }
        std::vector<double> w = softmax_weights(scores, bundle.tau);
        std::copy(w.begin(), w.end(), weights.w.row(j).begin());
        std::vector<double> r = weighted_aggregate(w, reps);
        auto [mu, var] = decode(bundle, targets.inputs.row(j), r);
        std::copy(mu.begin(), mu.end(), pred.mean.row(j).begin());
        std::copy(var.begin(), var.end(), pred.variance.row(j).begin());
    }
    return {std::move(pred), std::move(weights)};
}

} // namespace adacnp::model
