#include "adacnp/models/bundle.hpp"

#include <cstring>
#include <fstream>

#include "adacnp/errors.hpp"
#include "adacnp/numeric/checkpoint.hpp"

namespace adacnp::model {

namespace {

constexpr char kBundleMagic[8] = {'A', 'C', 'N', 'P', 'B', 'N', 'D', 'L'};

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden,
                               std::size_t out) {
    std::vector<std::size_t> sizes;
    sizes.push_back(in);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

void check_io(const num::MlpParams& p, std::size_t in, std::size_t out, const char* name) {
    if (p.input_dim() != in || p.output_dim() != out) {
        throw ContractError(std::string(name) + " maps " + std::to_string(p.input_dim()) +
                            " -> " + std::to_string(p.output_dim()) + ", expected " +
                            std::to_string(in) + " -> " + std::to_string(out));
    }
}

void append_spans(std::vector<std::span<double>>& out, num::MlpParams& p) {
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
        out.push_back(p.weights[k].data());
        out.push_back(std::span<double>(p.biases[k]));
    }
}

void append_sizes(std::vector<std::size_t>& out, const num::MlpParams& p) {
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
        out.push_back(p.weights[k].size());
        out.push_back(p.biases[k].size());
    }
}

void write_std_vector(std::ostream& out, const std::vector<double>& v) {
    num::write_u64(out, v.size());
    for (double x : v) num::write_f64(out, x);
}

std::vector<double> read_std_vector(std::istream& in) {
    std::vector<double> v(num::read_u64(in));
    for (double& x : v) x = num::read_f64(in);
    return v;
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::kAdaCnp: return "adacnp";
        case ModelKind::kCnp: return "cnp";
        case ModelKind::kGp: return "gp";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "adacnp") return ModelKind::kAdaCnp;
    if (name == "cnp") return ModelKind::kCnp;
    if (name == "gp") return ModelKind::kGp;
    throw ContractError("unknown model kind '" + name + "' (expected adacnp, cnp or gp)");
}

void ModelBundle::validate() const {
    if (!(tau > 0.0)) {
        throw ContractError("bundle temperature must be positive, got " + std::to_string(tau));
    }
    encoder.validate();
    embedding.validate();
    scorer.validate();
    decoder.validate();
    check_io(encoder, d_x + d_y, d_r, "encoder");
    check_io(embedding, d_x, d_e, "embedding");
    check_io(scorer, 2 * d_e, 1, "scorer");
    check_io(decoder, d_x + d_r, 2 * d_y, "decoder");
}

std::vector<std::span<double>> ModelBundle::param_spans() {
    std::vector<std::span<double>> spans;
    append_spans(spans, encoder);
    append_spans(spans, embedding);
    append_spans(spans, scorer);
    append_spans(spans, decoder);
    return spans;
}

std::vector<std::size_t> ModelBundle::param_block_sizes() const {
    std::vector<std::size_t> sizes;
    append_sizes(sizes, encoder);
    append_sizes(sizes, embedding);
    append_sizes(sizes, scorer);
    append_sizes(sizes, decoder);
    return sizes;
}

ModelBundle init_bundle(const BundleConfig& cfg, Rng& rng) {
    ModelBundle b;
    b.d_x = cfg.d_x;
    b.d_y = cfg.d_y;
    b.d_e = cfg.d_e;
    b.d_r = cfg.d_r;
    b.tau = cfg.tau;
    b.encoder = num::init_mlp(chain(cfg.d_x + cfg.d_y, cfg.encoder_hidden, cfg.d_r),
                              cfg.activation, rng);
    b.embedding = num::init_mlp(chain(cfg.d_x, cfg.embedding_hidden, cfg.d_e),
                                cfg.activation, rng);
    b.scorer = num::init_mlp(chain(2 * cfg.d_e, cfg.scorer_hidden, 1), cfg.activation, rng);
    b.decoder = num::init_mlp(chain(cfg.d_x + cfg.d_r, cfg.decoder_hidden, 2 * cfg.d_y),
                              cfg.activation, rng);
    b.validate();
    return b;
}

void save_bundle(const std::string& path, const BundleCheckpoint& ckpt) {
    ckpt.bundle.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out.write(kBundleMagic, sizeof kBundleMagic);
    num::write_u32(out, num::kCheckpointVersion);
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.bundle.encoder.activation));
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.kind));
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.bundle.d_x));
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.bundle.d_y));
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.bundle.d_e));
    num::write_u32(out, static_cast<std::uint32_t>(ckpt.bundle.d_r));
    num::write_f64(out, ckpt.bundle.tau);
    num::write_u64(out, ckpt.config_text.size());
    out.write(ckpt.config_text.data(), static_cast<std::streamsize>(ckpt.config_text.size()));
    out.put(ckpt.standardization ? '\1' : '\0');
    if (ckpt.standardization) {
        write_std_vector(out, ckpt.standardization->x_mean);
        write_std_vector(out, ckpt.standardization->x_scale);
        write_std_vector(out, ckpt.standardization->y_mean);
        write_std_vector(out, ckpt.standardization->y_scale);
    }
    num::write_params_block(out, ckpt.bundle.encoder);
    num::write_params_block(out, ckpt.bundle.embedding);
    num::write_params_block(out, ckpt.bundle.scorer);
    num::write_params_block(out, ckpt.bundle.decoder);
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

BundleCheckpoint load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kBundleMagic, sizeof magic) != 0) {
        throw DataError("not a bundle checkpoint: " + path);
    }
    std::uint32_t version = num::read_u32(in);
    if (version != num::kCheckpointVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    BundleCheckpoint ckpt;
    auto activation = static_cast<num::Activation>(num::read_u32(in));
    ckpt.kind = static_cast<ModelKind>(num::read_u32(in));
    ckpt.bundle.d_x = num::read_u32(in);
    ckpt.bundle.d_y = num::read_u32(in);
    ckpt.bundle.d_e = num::read_u32(in);
    ckpt.bundle.d_r = num::read_u32(in);
    ckpt.bundle.tau = num::read_f64(in);
    std::uint64_t config_len = num::read_u64(in);
    ckpt.config_text.resize(config_len);
    in.read(ckpt.config_text.data(), static_cast<std::streamsize>(config_len));
    int has_std = in.get();
    if (has_std == 1) {
        Standardization s;
        s.x_mean = read_std_vector(in);
        s.x_scale = read_std_vector(in);
        s.y_mean = read_std_vector(in);
        s.y_scale = read_std_vector(in);
        ckpt.standardization = std::move(s);
    } else if (has_std != 0) {
        throw DataError("corrupt standardization flag in checkpoint: " + path);
    }
    ckpt.bundle.encoder = num::read_params_block(in, activation);
    ckpt.bundle.embedding = num::read_params_block(in, activation);
    ckpt.bundle.scorer = num::read_params_block(in, activation);
    ckpt.bundle.decoder = num::read_params_block(in, activation);
    ckpt.bundle.validate();
    return ckpt;
}

} // namespace adacnp::model
