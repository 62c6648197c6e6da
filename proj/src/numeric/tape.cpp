#include "adacnp/numeric/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adacnp/errors.hpp"

namespace adacnp::num {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

} // namespace

NodeId Tape::push(OpKind op, std::size_t length, std::span<const NodeId> inputs, double aux) {
    Node n;
    n.op = op;
    n.offset = static_cast<std::uint32_t>(values_.size());
    n.length = static_cast<std::uint32_t>(length);
    n.input_offset = static_cast<std::uint32_t>(inputs_.size());
    n.input_count = static_cast<std::uint32_t>(inputs.size());
    n.aux = aux;
    inputs_.insert(inputs_.end(), inputs.begin(), inputs.end());
    values_.resize(values_.size() + length, 0.0);
    nodes_.push_back(n);
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_exists(NodeId id) const {
    if (id >= nodes_.size()) {
        throw ContractError("tape node id " + std::to_string(id) + " out of range");
    }
}

std::span<double> Tape::mutable_value(NodeId id) {
    const Node& n = nodes_[id];
    return {values_.data() + n.offset, n.length};
}

std::span<double> Tape::mutable_grad(NodeId id) {
    const Node& n = nodes_[id];
    return {grads_.data() + n.offset, n.length};
}

std::span<const double> Tape::value(NodeId id) const {
    check_exists(id);
    const Node& n = nodes_[id];
    return {values_.data() + n.offset, n.length};
}

std::span<const double> Tape::grad(NodeId id) const {
    check_exists(id);
    const Node& n = nodes_[id];
    if (grads_.size() < values_.size()) {
        throw ContractError("tape gradients are not available before backward()");
    }
    return {grads_.data() + n.offset, n.length};
}

NodeId Tape::leaf(std::span<const double> value) {
    NodeId id = push(OpKind::kLeaf, value.size(), {});
    std::copy(value.begin(), value.end(), mutable_value(id).begin());
    return id;
}

NodeId Tape::constant(std::span<const double> value) {
    NodeId id = push(OpKind::kConstant, value.size(), {});
    std::copy(value.begin(), value.end(), mutable_value(id).begin());
    return id;
}

NodeId Tape::affine(NodeId w, NodeId b, NodeId x) {
    check_exists(w);
    check_exists(b);
    check_exists(x);
    std::size_t rows = nodes_[b].length;
    std::size_t cols = nodes_[x].length;
    if (nodes_[w].length != rows * cols) {
        throw DimensionError("affine weight block of length " + std::to_string(nodes_[w].length) +
                             " does not factor as " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    NodeId inputs[3] = {w, b, x};
    NodeId id = push(OpKind::kAffine, rows, inputs);
    auto wv = value(w);
    auto bv = value(b);
    auto xv = value(x);
    auto out = mutable_value(id);
    for (std::size_t o = 0; o < rows; ++o) {
        double acc = bv[o];
        const double* wrow = wv.data() + o * cols;
        for (std::size_t i = 0; i < cols; ++i) acc += wrow[i] * xv[i];
        out[o] = acc;
    }
    return id;
}

NodeId Tape::relu(NodeId x) {
    check_exists(x);
    NodeId inputs[1] = {x};
    NodeId id = push(OpKind::kRelu, nodes_[x].length, inputs);
    auto xv = value(x);
    auto out = mutable_value(id);
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
    return id;
}

NodeId Tape::tanh_activation(NodeId x) {
    check_exists(x);
    NodeId inputs[1] = {x};
    NodeId id = push(OpKind::kTanh, nodes_[x].length, inputs);
    auto xv = value(x);
    auto out = mutable_value(id);
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = std::tanh(xv[i]);
    return id;
}

NodeId Tape::concat(NodeId a, NodeId b) {
    check_exists(a);
    check_exists(b);
    NodeId inputs[2] = {a, b};
    NodeId id = push(OpKind::kConcat, nodes_[a].length + nodes_[b].length, inputs);
    auto av = value(a);
    auto bv = value(b);
    auto out = mutable_value(id);
    std::copy(av.begin(), av.end(), out.begin());
    std::copy(bv.begin(), bv.end(), out.begin() + av.size());
    return id;
}

NodeId Tape::slice(NodeId x, std::size_t offset, std::size_t length) {
    check_exists(x);
    if (offset + length > nodes_[x].length) {
        throw DimensionError("slice [" + std::to_string(offset) + ", " +
                             std::to_string(offset + length) + ") exceeds node length " +
                             std::to_string(nodes_[x].length));
    }
    NodeId inputs[1] = {x};
    NodeId id = push(OpKind::kSlice, length, inputs, static_cast<double>(offset));
    auto xv = value(x);
    auto out = mutable_value(id);
    std::copy(xv.begin() + offset, xv.begin() + offset + length, out.begin());
    return id;
}

NodeId Tape::softplus_floor(NodeId x, double floor) {
    check_exists(x);
    NodeId inputs[1] = {x};
    NodeId id = push(OpKind::kSoftplusFloor, nodes_[x].length, inputs, floor);
    auto xv = value(x);
    auto out = mutable_value(id);
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = softplus(xv[i]) + floor;
    return id;
}

NodeId Tape::softmax_temperature(NodeId scores, double tau) {
    check_exists(scores);
    if (!(tau > 0.0)) {
        throw ContractError("softmax temperature must be positive, got " + std::to_string(tau));
    }
    NodeId inputs[1] = {scores};
    NodeId id = push(OpKind::kSoftmaxTemperature, nodes_[scores].length, inputs, tau);
    auto sv = value(scores);
    auto out = mutable_value(id);
    double m = sv[0];
    for (double s : sv) m = std::max(m, s);
    double z = 0.0;
    for (std::size_t i = 0; i < sv.size(); ++i) {
        out[i] = std::exp((sv[i] - m) / tau);
        z += out[i];
    }
    for (std::size_t i = 0; i < sv.size(); ++i) out[i] /= z;
    return id;
}

NodeId Tape::weighted_sum(NodeId weights, std::span<const NodeId> vectors) {
    check_exists(weights);
    if (vectors.empty()) {
        throw ContractError("weighted_sum needs at least one vector");
    }
    if (nodes_[weights].length != vectors.size()) {
        throw DimensionError("weighted_sum got " + std::to_string(vectors.size()) +
                             " vectors but " + std::to_string(nodes_[weights].length) +
                             " weights");
    }
    std::size_t dim = nodes_[vectors[0]].length;
    std::vector<NodeId> inputs;
    inputs.reserve(vectors.size() + 1);
    inputs.push_back(weights);
    for (NodeId v : vectors) {
        check_exists(v);
        if (nodes_[v].length != dim) {
            throw DimensionError("weighted_sum vectors disagree in length");
        }
        inputs.push_back(v);
    }
    NodeId id = push(OpKind::kWeightedSum, dim, inputs);
    auto wv = value(weights);
    auto out = mutable_value(id);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        auto vv = value(vectors[k]);
        double wk = wv[k];
        for (std::size_t i = 0; i < dim; ++i) out[i] += wk * vv[i];
    }
    return id;
}

NodeId Tape::mean_stack(std::span<const NodeId> vectors) {
    if (vectors.empty()) {
        throw ContractError("mean_stack needs at least one vector");
    }
    std::size_t dim = nodes_[vectors[0]].length;
    for (NodeId v : vectors) {
        check_exists(v);
        if (nodes_[v].length != dim) {
            throw DimensionError("mean_stack vectors disagree in length");
        }
    }
    NodeId id = push(OpKind::kMeanStack, dim, vectors);
    auto out = mutable_value(id);
    double inv = 1.0 / static_cast<double>(vectors.size());
    for (NodeId v : vectors) {
        auto vv = value(v);
        for (std::size_t i = 0; i < dim; ++i) out[i] += vv[i] * inv;
    }
    return id;
}

NodeId Tape::collect(std::span<const NodeId> scalars) {
    if (scalars.empty()) {
        throw ContractError("collect needs at least one scalar");
    }
    for (NodeId s : scalars) {
        check_exists(s);
        if (nodes_[s].length != 1) {
            throw ContractError("collect inputs must be scalar nodes");
        }
    }
    NodeId id = push(OpKind::kCollect, scalars.size(), scalars);
    auto out = mutable_value(id);
    for (std::size_t k = 0; k < scalars.size(); ++k) out[k] = value(scalars[k])[0];
    return id;
}

NodeId Tape::gaussian_nll_sum(NodeId mu, NodeId var, NodeId y) {
    check_exists(mu);
    check_exists(var);
    check_exists(y);
    std::size_t dim = nodes_[mu].length;
    if (nodes_[var].length != dim || nodes_[y].length != dim) {
        throw DimensionError("gaussian_nll_sum operands disagree in length");
    }
    auto vv = value(var);
    for (double v : vv) {
        if (!(v > 0.0)) {
            throw ContractError("gaussian_nll_sum requires positive variances");
        }
    }
    NodeId inputs[3] = {mu, var, y};
    NodeId id = push(OpKind::kGaussianNllSum, 1, inputs);
    auto mv = value(mu);
    auto yv = value(y);
    vv = value(var);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double d = yv[i] - mv[i];
        acc += 0.5 * std::log(kTwoPi * vv[i]) + d * d / (2.0 * vv[i]);
    }
    mutable_value(id)[0] = acc;
    return id;
}

NodeId Tape::sum(std::span<const NodeId> scalars) {
    if (scalars.empty()) {
        throw ContractError("sum needs at least one scalar");
    }
    for (NodeId s : scalars) {
        check_exists(s);
        if (nodes_[s].length != 1) {
            throw ContractError("sum inputs must be scalar nodes");
        }
    }
    NodeId id = push(OpKind::kSum, 1, scalars);
    double acc = 0.0;
    for (NodeId s : scalars) acc += value(s)[0];
    mutable_value(id)[0] = acc;
    return id;
}

NodeId Tape::scale(NodeId x, double factor) {
    check_exists(x);
    NodeId inputs[1] = {x};
    NodeId id = push(OpKind::kScale, nodes_[x].length, inputs, factor);
    auto xv = value(x);
    auto out = mutable_value(id);
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = factor * xv[i];
    return id;
}

void Tape::backward(NodeId loss) {
    check_exists(loss);
    if (nodes_[loss].length != 1) {
        throw ContractError("backward requires a scalar loss node, got length " +
                            std::to_string(nodes_[loss].length));
    }
    grads_.assign(values_.size(), 0.0);
    mutable_grad(loss)[0] = 1.0;

    for (std::size_t idx = nodes_.size(); idx-- > 0;) {
        const Node& n = nodes_[idx];
        auto g = std::span<const double>(grads_.data() + n.offset, n.length);
        const NodeId* in = inputs_.data() + n.input_offset;
        switch (n.op) {
            case OpKind::kLeaf:
            case OpKind::kConstant:
                break;
            case OpKind::kAffine: {
                auto wv = value(in[0]);
                auto xv = value(in[2]);
                auto gw = mutable_grad(in[0]);
                auto gb = mutable_grad(in[1]);
                auto gx = mutable_grad(in[2]);
                std::size_t rows = n.length;
                std::size_t cols = nodes_[in[2]].length;
                for (std::size_t o = 0; o < rows; ++o) {
                    double go = g[o];
                    if (go == 0.0) continue;
                    gb[o] += go;
                    double* gwrow = gw.data() + o * cols;
                    const double* wrow = wv.data() + o * cols;
                    for (std::size_t i = 0; i < cols; ++i) {
                        gwrow[i] += go * xv[i];
                        gx[i] += go * wrow[i];
                    }
                }
                break;
            }
            case OpKind::kRelu: {
                auto xv = value(in[0]);
                auto gx = mutable_grad(in[0]);
                for (std::size_t i = 0; i < n.length; ++i) {
                    if (xv[i] > 0.0) gx[i] += g[i];
                }
                break;
            }
            case OpKind::kTanh: {
                auto yv = value(static_cast<NodeId>(idx));
                auto gx = mutable_grad(in[0]);
                for (std::size_t i = 0; i < n.length; ++i) {
                    gx[i] += g[i] * (1.0 - yv[i] * yv[i]);
                }
                break;
            }
            case OpKind::kConcat: {
                auto ga = mutable_grad(in[0]);
                auto gb = mutable_grad(in[1]);
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[ga.size() + i];
                break;
            }
            case OpKind::kSlice: {
                auto gx = mutable_grad(in[0]);
                std::size_t offset = static_cast<std::size_t>(n.aux);
                for (std::size_t i = 0; i < n.length; ++i) gx[offset + i] += g[i];
                break;
            }
            case OpKind::kSoftplusFloor: {
                auto xv = value(in[0]);
                auto gx = mutable_grad(in[0]);
                for (std::size_t i = 0; i < n.length; ++i) {
                    gx[i] += g[i] * sigmoid(xv[i]);
                }
                break;
            }
            case OpKind::kSoftmaxTemperature: {
                auto wv = value(static_cast<NodeId>(idx));
                auto gs = mutable_grad(in[0]);
                double dot = 0.0;
                for (std::size_t i = 0; i < n.length; ++i) dot += g[i] * wv[i];
                double inv_tau = 1.0 / n.aux;
                for (std::size_t i = 0; i < n.length; ++i) {
                    gs[i] += inv_tau * wv[i] * (g[i] - dot);
                }
                break;
            }
            case OpKind::kWeightedSum: {
                auto wv = value(in[0]);
                auto gw = mutable_grad(in[0]);
                for (std::size_t k = 0; k + 1 < n.input_count; ++k) {
                    NodeId vid = in[k + 1];
                    auto vv = value(vid);
                    auto gv = mutable_grad(vid);
                    double acc = 0.0;
                    double wk = wv[k];
                    for (std::size_t i = 0; i < n.length; ++i) {
                        acc += vv[i] * g[i];
                        gv[i] += wk * g[i];
                    }
                    gw[k] += acc;
                }
                break;
            }
            case OpKind::kMeanStack: {
                double inv = 1.0 / static_cast<double>(n.input_count);
                for (std::size_t k = 0; k < n.input_count; ++k) {
                    auto gv = mutable_grad(in[k]);
                    for (std::size_t i = 0; i < n.length; ++i) gv[i] += inv * g[i];
                }
                break;
            }
            case OpKind::kCollect: {
                for (std::size_t k = 0; k < n.input_count; ++k) {
                    mutable_grad(in[k])[0] += g[k];
                }
                break;
            }
            case OpKind::kGaussianNllSum: {
                auto mv = value(in[0]);
                auto vv = value(in[1]);
                auto yv = value(in[2]);
                auto gm = mutable_grad(in[0]);
                auto gv = mutable_grad(in[1]);
                double go = g[0];
                for (std::size_t i = 0; i < mv.size(); ++i) {
                    double d = yv[i] - mv[i];
                    gm[i] += go * (mv[i] - yv[i]) / vv[i];
                    gv[i] += go * (0.5 / vv[i] - d * d / (2.0 * vv[i] * vv[i]));
                }
                break;
            }
            case OpKind::kSum: {
                for (std::size_t k = 0; k < n.input_count; ++k) {
                    mutable_grad(in[k])[0] += g[0];
                }
                break;
            }
            case OpKind::kScale: {
                auto gx = mutable_grad(in[0]);
                for (std::size_t i = 0; i < n.length; ++i) gx[i] += n.aux * g[i];
                break;
            }
        }
    }
}

void Tape::reset() {
    nodes_.clear();
    values_.clear();
    grads_.clear();
    inputs_.clear();
}

} // namespace adacnp::num
