#include "adacnp/numeric/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "adacnp/errors.hpp"

namespace adacnp::num {

namespace {

void write_bytes_le(std::ostream& out, std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, n);
}

std::uint64_t read_bytes_le(std::istream& in, int n) {
    unsigned char buf[8] = {0};
    in.read(reinterpret_cast<char*>(buf), n);
    if (!in) throw DataError("checkpoint truncated while reading " + std::to_string(n) + " bytes");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

} // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_bytes_le(out, v, 4); }
void write_u64(std::ostream& out, std::uint64_t v) { write_bytes_le(out, v, 8); }

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    write_bytes_le(out, bits, 8);
}

std::uint32_t read_u32(std::istream& in) { return static_cast<std::uint32_t>(read_bytes_le(in, 4)); }
std::uint64_t read_u64(std::istream& in) { return read_bytes_le(in, 8); }

double read_f64(std::istream& in) {
    std::uint64_t bits = read_bytes_le(in, 8);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

void write_params_block(std::ostream& out, const MlpParams& params) {
    write_u64(out, params.layer_sizes.size());
    for (std::size_t s : params.layer_sizes) write_u64(out, s);
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        for (double v : params.weights[k].data()) write_f64(out, v);
        for (double v : params.biases[k]) write_f64(out, v);
    }
}

MlpParams read_params_block(std::istream& in, Activation activation) {
    MlpParams p;
    p.activation = activation;
    std::uint64_t n_sizes = read_u64(in);
    if (n_sizes < 2 || n_sizes > 64) {
        throw DataError("checkpoint layer-size count " + std::to_string(n_sizes) +
                        " is out of range");
    }
    p.layer_sizes.resize(n_sizes);
    for (auto& s : p.layer_sizes) s = static_cast<std::size_t>(read_u64(in));
    for (std::size_t k = 0; k + 1 < n_sizes; ++k) {
        Matrix w(p.layer_sizes[k + 1], p.layer_sizes[k]);
        for (double& v : w.data()) v = read_f64(in);
        std::vector<double> b(p.layer_sizes[k + 1]);
        for (double& v : b) v = read_f64(in);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    p.validate();
    return p;
}

void save_mlp_params(const std::string& path, const MlpParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out.write(kMlpMagic, sizeof kMlpMagic);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(params.activation));
    write_params_block(out, params);
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

MlpParams load_mlp_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMlpMagic, sizeof magic) != 0) {
        throw DataError("not a parameter checkpoint: " + path);
    }
    std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    auto act = static_cast<Activation>(read_u32(in));
    return read_params_block(in, act);
}

} // namespace adacnp::num
