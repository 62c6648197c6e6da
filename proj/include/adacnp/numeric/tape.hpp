#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adacnp::num {

using NodeId = std::uint32_t;

// Reverse-mode differentiation tape over vector-valued nodes. Values are
// computed eagerly at record time into a shared arena; backward() replays the
// recorded operations in reverse creation order, which is a reverse
// topological order because every input precedes its consumers.
//
// Single-writer: one thread owns a Tape for its whole record/backward cycle.
class Tape {
public:
    // Differentiable leaf (a parameter block); value is copied in.
    NodeId leaf(std::span<const double> value);
    // Non-differentiable input; gradients are accumulated but unused.
    NodeId constant(std::span<const double> value);

    // w is a leaf/constant holding a rows x cols matrix flattened row-major,
    // b has length rows, x has length cols. Output: W x + b.
    NodeId affine(NodeId w, NodeId b, NodeId x);
    NodeId relu(NodeId x);
    NodeId tanh_activation(NodeId x);
    NodeId concat(NodeId a, NodeId b);
    NodeId slice(NodeId x, std::size_t offset, std::size_t length);
    // Elementwise softplus followed by an additive floor: ln(1+e^x) + floor.
    NodeId softplus_floor(NodeId x, double floor);
    // Max-shifted softmax of scores/tau. Requires tau > 0.
    NodeId softmax_temperature(NodeId scores, double tau);
    // sum_k weights[k] * vectors[k]; weights length must equal vectors count.
    NodeId weighted_sum(NodeId weights, std::span<const NodeId> vectors);
    // Arithmetic mean of equally shaped vectors.
    NodeId mean_stack(std::span<const NodeId> vectors);
    // Packs scalar nodes into one vector.
    NodeId collect(std::span<const NodeId> scalars);
    // Sum over dimensions of 0.5*ln(2*pi*var) + (y-mu)^2/(2*var); y is a
    // constant node. All inputs must share one length; var entries must be > 0.
    NodeId gaussian_nll_sum(NodeId mu, NodeId var, NodeId y);
    NodeId sum(std::span<const NodeId> scalars);
    NodeId scale(NodeId x, double factor);

    // Reverse pass from a scalar loss node. Gradients of every node
    // (including all leaves) are available afterwards via grad().
    void backward(NodeId loss);

    std::span<const double> value(NodeId id) const;
    std::span<const double> grad(NodeId id) const;
    std::size_t node_count() const { return nodes_.size(); }

    // Drops all nodes but keeps arena capacity for the next episode.
    void reset();

private:
    enum class OpKind : std::uint8_t {
        kLeaf,
        kConstant,
        kAffine,
        kRelu,
        kTanh,
        kConcat,
        kSlice,
        kSoftplusFloor,
        kSoftmaxTemperature,
        kWeightedSum,
        kMeanStack,
        kCollect,
        kGaussianNllSum,
        kSum,
        kScale,
    };

    struct Node {
        OpKind op;
        std::uint32_t offset;    // into values_/grads_
        std::uint32_t length;
        std::uint32_t input_offset;  // into inputs_
        std::uint32_t input_count;
        double aux = 0.0;        // slice offset / floor / tau / scale factor
    };

    NodeId push(OpKind op, std::size_t length, std::span<const NodeId> inputs, double aux = 0.0);
    std::span<double> mutable_value(NodeId id);
    std::span<double> mutable_grad(NodeId id);
    void check_exists(NodeId id) const;

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<NodeId> inputs_;
};

} // namespace adacnp::num
