#include "adacnp/numeric/optimizer.hpp"

#include <cmath>
#include <string>

#include "adacnp/errors.hpp"

namespace adacnp::num {

OptimizerState make_optimizer_state(const std::vector<std::size_t>& block_sizes,
                                    double learning_rate) {
    OptimizerState s;
    s.learning_rate = learning_rate;
    s.first_moment.reserve(block_sizes.size());
    s.second_moment.reserve(block_sizes.size());
    for (std::size_t n : block_sizes) {
        s.first_moment.emplace_back(n, 0.0);
        s.second_moment.emplace_back(n, 0.0);
    }
    return s;
}

void optimizer_step(const std::vector<std::span<double>>& params,
                    const std::vector<std::span<const double>>& grads,
                    OptimizerState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw DimensionError("optimizer_step block counts disagree: " +
                             std::to_string(params.size()) + " params, " +
                             std::to_string(grads.size()) + " grads, " +
                             std::to_string(state.first_moment.size()) + " accumulators");
    }
    state.step_count += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = grads[b];
        auto& m = state.first_moment[b];
        auto& v = state.second_moment[b];
        if (p.size() != g.size() || p.size() != m.size()) {
            throw DimensionError("optimizer_step block " + std::to_string(b) +
                                 " shapes disagree: " + std::to_string(p.size()) +
                                 " params, " + std::to_string(g.size()) + " grads, " +
                                 std::to_string(m.size()) + " moments");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            double m_hat = m[i] / bc1;
            double v_hat = v[i] / bc2;
            p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

} // namespace adacnp::num
