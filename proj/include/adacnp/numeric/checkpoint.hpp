#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "adacnp/numeric/mlp.hpp"

namespace adacnp::num {

// Binary layout primitives; everything on disk is little-endian.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);

// Parameter block: u64 layer-size count, u64 sizes, then per layer the weight
// matrix (row-major) followed by the bias vector, all as little-endian f64 in
// declaration order. The activation tag is carried by the enclosing header.
void write_params_block(std::ostream& out, const MlpParams& params);
MlpParams read_params_block(std::istream& in, Activation activation);

// Standalone parameter checkpoint: magic, format version, activation tag,
// then one parameter block.
void save_mlp_params(const std::string& path, const MlpParams& params);
MlpParams load_mlp_params(const std::string& path);

inline constexpr char kMlpMagic[8] = {'A', 'C', 'N', 'P', 'M', 'L', 'P', 'S'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

} // namespace adacnp::num
