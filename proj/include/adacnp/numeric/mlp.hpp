#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adacnp/numeric/matrix.hpp"
#include "adacnp/rng.hpp"

namespace adacnp::num {

enum class Activation : std::uint32_t { kRelu = 0, kTanh = 1 };

double apply_activation(Activation act, double x);
double activation_derivative(Activation act, double x);

// Fully connected network parameters. weights[k] maps layer_sizes[k] ->
// layer_sizes[k+1]; the final layer is affine with no output nonlinearity.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;          // weights[k]: layer_sizes[k+1] x layer_sizes[k]
    std::vector<std::vector<double>> biases;
    Activation activation = Activation::kRelu;

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;

    // Throws ContractError when shapes are internally inconsistent.
    void validate() const;
};

// Uniform fan-in initialization: every weight and bias of layer k is drawn
// from U[-1/sqrt(fan_in), 1/sqrt(fan_in)] with the supplied stream.
MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, Activation act, Rng& rng);

// Alternating affine map and activation; final layer affine only.
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> x);

} // namespace adacnp::num
