#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adacnp::num {

// Adaptive-moment first-order optimizer state. Accumulator blocks mirror the
// parameter blocks they were built from, in the same order.
struct OptimizerState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
};

OptimizerState make_optimizer_state(const std::vector<std::size_t>& block_sizes,
                                    double learning_rate);

// One bias-corrected adaptive-moment update, in place. Block count and block
// lengths of params/grads must mirror the state exactly.
void optimizer_step(const std::vector<std::span<double>>& params,
                    const std::vector<std::span<const double>>& grads,
                    OptimizerState& state);

} // namespace adacnp::num
