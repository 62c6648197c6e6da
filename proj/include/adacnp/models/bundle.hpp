#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adacnp/numeric/mlp.hpp"
#include "adacnp/rng.hpp"
#include "adacnp/standardize.hpp"

namespace adacnp::model {

enum class ModelKind : std::uint32_t { kAdaCnp = 0, kCnp = 1, kGp = 2 };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// Network widths and episode-level hyperparameters. The paper leaves hidden
// widths and the temperature value open; these defaults are sized to train in
// minutes and are fully configurable.
struct BundleConfig {
    std::size_t d_x = 1;
    std::size_t d_y = 1;
    std::size_t d_e = 32;
    std::size_t d_r = 128;
    std::vector<std::size_t> encoder_hidden{128, 128};
    std::vector<std::size_t> decoder_hidden{128, 128};
    std::vector<std::size_t> embedding_hidden{64};
    std::vector<std::size_t> scorer_hidden{64};
    double tau = 1.0;
    num::Activation activation = num::Activation::kRelu;
};

// Parameters for the encoder h, embedding network phi, scorer f and decoder
// g, plus the softmax temperature. One bundle serves both the CNP path
// (encoder/decoder only) and the adaptive path.
struct ModelBundle {
    std::size_t d_x = 0;
    std::size_t d_y = 0;
    std::size_t d_e = 0;
    std::size_t d_r = 0;
    double tau = 1.0;
    num::MlpParams encoder;    // d_x + d_y -> d_r
    num::MlpParams embedding;  // d_x -> d_e
    num::MlpParams scorer;     // 2*d_e -> 1
    num::MlpParams decoder;    // d_x + d_r -> 2*d_y

    // Checks the dimension chain and tau; throws ContractError.
    void validate() const;

    // Parameter blocks in declaration order (encoder, embedding, scorer,
    // decoder; per layer weights then biases). Optimizer state and tape
    // gradients mirror this order.
    std::vector<std::span<double>> param_spans();
    std::vector<std::size_t> param_block_sizes() const;
};

ModelBundle init_bundle(const BundleConfig& cfg, Rng& rng);

// Bundle checkpoint: magic, version, activation tag, model kind, dimensions,
// tau, the resolved run configuration (for replay), an optional
// standardization block, then the four parameter blocks in the numeric-core
// layout.
struct BundleCheckpoint {
    ModelBundle bundle;
    ModelKind kind = ModelKind::kAdaCnp;
    std::string config_text;
    std::optional<Standardization> standardization;
};

void save_bundle(const std::string& path, const BundleCheckpoint& ckpt);
BundleCheckpoint load_bundle(const std::string& path);

} // namespace adacnp::model
