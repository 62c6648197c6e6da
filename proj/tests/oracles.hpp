#pragma once

// Test-side reference implementations, written independently of the library
// paths they check. Keep these naive and obvious.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "adacnp/numeric/matrix.hpp"
#include "adacnp/numeric/mlp.hpp"
#include "adacnp/numeric/tape.hpp"

namespace oracles {

inline adacnp::num::Matrix naive_matmul(const adacnp::num::Matrix& a,
                                        const adacnp::num::Matrix& b) {
    adacnp::num::Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

// Straight-line forward pass over explicit loops; shares nothing with the
// library's mlp_forward or the tape.
inline std::vector<double> straightline_mlp(const adacnp::num::MlpParams& p,
                                            std::span<const double> x) {
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t layer = 0; layer < p.weights.size(); ++layer) {
        std::vector<double> next(p.layer_sizes[layer + 1]);
        for (std::size_t o = 0; o < next.size(); ++o) {
            double acc = p.biases[layer][o];
            for (std::size_t i = 0; i < h.size(); ++i) acc += p.weights[layer](o, i) * h[i];
            next[o] = acc;
        }
        bool last = layer + 1 == p.weights.size();
        if (!last) {
            for (double& v : next) {
                if (p.activation == adacnp::num::Activation::kTanh) {
                    v = std::tanh(v);
                } else {
                    v = v > 0.0 ? v : 0.0;
                }
            }
        }
        h = std::move(next);
    }
    return h;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

// Scalar loss as a function of a flat input vector, expressed as a tape build.
using TapeScalarFn =
    std::function<adacnp::num::NodeId(adacnp::num::Tape&, adacnp::num::NodeId)>;

inline double tape_eval(const TapeScalarFn& build, std::span<const double> x,
                        std::vector<double>* grads_out = nullptr) {
    adacnp::num::Tape tape;
    adacnp::num::NodeId leaf = tape.leaf(x);
    adacnp::num::NodeId loss = build(tape, leaf);
    double value = tape.value(loss)[0];
    if (grads_out) {
        tape.backward(loss);
        auto g = tape.grad(leaf);
        grads_out->assign(g.begin(), g.end());
    }
    return value;
}

// Central finite differences with step 1e-5; returns the worst relative error
// across coordinates.
inline double max_fd_error(const TapeScalarFn& build, std::vector<double> x) {
    std::vector<double> analytic;
    tape_eval(build, x, &analytic);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double keep = x[i];
        x[i] = keep + h;
        double up = tape_eval(build, x);
        x[i] = keep - h;
        double down = tape_eval(build, x);
        x[i] = keep;
        double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, rel_err(analytic[i], fd));
    }
    return worst;
}

// Reference adaptive-moment recurrence on one scalar coordinate.
struct ScalarAdam {
    double lr, beta1, beta2, eps;
    double m = 0.0, v = 0.0;
    int t = 0;

    double step(double param, double grad) {
        t += 1;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad * grad;
        double mh = m / (1.0 - std::pow(beta1, t));
        double vh = v / (1.0 - std::pow(beta2, t));
        return param - lr * mh / (std::sqrt(vh) + eps);
    }
};

} // namespace oracles
