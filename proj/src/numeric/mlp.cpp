#include "adacnp/numeric/mlp.hpp"

#include <cmath>
#include <string>

#include "adacnp/errors.hpp"

namespace adacnp::num {

double apply_activation(Activation act, double x) {
    switch (act) {
        case Activation::kRelu: return x > 0.0 ? x : 0.0;
        case Activation::kTanh: return std::tanh(x);
    }
    return x;
}

double activation_derivative(Activation act, double x) {
    switch (act) {
        case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::kTanh: {
            double t = std::tanh(x);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        n += weights[k].size() + biases[k].size();
    }
    return n;
}

void MlpParams::validate() const {
    if (layer_sizes.size() < 2) {
        throw ContractError("MlpParams needs at least one layer");
    }
    if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
        throw ContractError("MlpParams layer map inconsistent: " +
                            std::to_string(layer_sizes.size()) + " sizes, " +
                            std::to_string(weights.size()) + " weight blocks, " +
                            std::to_string(biases.size()) + " bias blocks");
    }
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows() != layer_sizes[k + 1] || weights[k].cols() != layer_sizes[k]) {
            throw ContractError("MlpParams weights[" + std::to_string(k) + "] is " +
                                std::to_string(weights[k].rows()) + "x" +
                                std::to_string(weights[k].cols()) + ", expected " +
                                std::to_string(layer_sizes[k + 1]) + "x" +
                                std::to_string(layer_sizes[k]));
        }
        if (biases[k].size() != layer_sizes[k + 1]) {
            throw ContractError("MlpParams biases[" + std::to_string(k) + "] length " +
                                std::to_string(biases[k].size()) + ", expected " +
                                std::to_string(layer_sizes[k + 1]));
        }
    }
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, Activation act, Rng& rng) {
    if (layer_sizes.size() < 2) {
        throw ContractError("init_mlp needs at least one layer");
    }
    MlpParams p;
    p.layer_sizes = layer_sizes;
    p.activation = act;
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        std::size_t fan_in = layer_sizes[k];
        std::size_t fan_out = layer_sizes[k + 1];
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        std::vector<double> b(fan_out);
        for (double& v : b) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> x) {
    if (x.size() != params.input_dim()) {
        throw DimensionError("mlp_forward input length " + std::to_string(x.size()) +
                             " does not match first layer size " +
                             std::to_string(params.input_dim()));
    }
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        std::vector<double> z = matvec(params.weights[k], h);
        const auto& b = params.biases[k];
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += b[i];
        if (k + 1 < params.weights.size()) {
            for (double& v : z) v = apply_activation(params.activation, v);
        }
        h = std::move(z);
    }
    return h;
}

} // namespace adacnp::num
