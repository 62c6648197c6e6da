#include "adacnp/models/gp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "adacnp/errors.hpp"
#include "adacnp/numeric/matrix.hpp"

namespace adacnp::model {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double kernel(const GpConfig& cfg, std::span<const double> a, std::span<const double> b) {
    return cfg.signal_variance *
           std::exp(-sq_dist(a, b) / (2.0 * cfg.length_scale * cfg.length_scale));
}

num::Matrix gram(const GpConfig& cfg, const ContextSet& ctx) {
    std::size_t n = ctx.size();
    num::Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = kernel(cfg, ctx.inputs.row(i), ctx.inputs.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
        k(i, i) += cfg.noise_variance;
    }
    return k;
}

// Factors K with an escalating jitter ladder; the smallest jitter keeps the
// noiseless interpolation error below 1e-8.
num::Matrix safe_cholesky(const GpConfig& cfg, const num::Matrix& k, std::size_t n) {
    const double jitter_scales[] = {1e-12, 1e-10, 1e-8, 1e-6};
    std::string last;
    for (double js : jitter_scales) {
        num::Matrix jk = k;
        double jitter = js * cfg.signal_variance;
        for (std::size_t i = 0; i < n; ++i) jk(i, i) += jitter;
        try {
            return num::cholesky(jk);
        } catch (const NumericalError& e) {
            last = e.what();
        }
    }
    throw NumericalError("GP kernel system is not positive definite after jitter (n=" +
                         std::to_string(n) + ", length_scale=" +
                         std::to_string(cfg.length_scale) + ", signal=" +
                         std::to_string(cfg.signal_variance) + ", noise=" +
                         std::to_string(cfg.noise_variance) + "): " + last);
}

// Forward substitution only: solves L v = rhs.
std::vector<double> solve_lower(const num::Matrix& l, std::span<const double> rhs) {
    std::size_t n = l.rows();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * v[k];
        v[i] = s / l(i, i);
    }
    return v;
}

} // namespace

void GpConfig::validate() const {
    if (!(length_scale > 0.0) || !(signal_variance > 0.0) || noise_variance < 0.0) {
        throw ContractError("GpConfig requires length_scale > 0, signal_variance > 0, "
                            "noise_variance >= 0");
    }
}

GaussianPrediction gp_predict(const GpConfig& cfg, const ContextSet& ctx,
                              const TargetBatch& targets) {
    cfg.validate();
    ctx.validate();
    targets.validate();
    std::size_t n = ctx.size();
    std::size_t d_y = ctx.outputs.cols();
    num::Matrix l = safe_cholesky(cfg, gram(cfg, ctx), n);

    // One solve per output dimension against the shared kernel matrix.
    std::vector<std::vector<double>> alphas(d_y);
    std::vector<double> column(n);
    for (std::size_t d = 0; d < d_y; ++d) {
        for (std::size_t i = 0; i < n; ++i) column[i] = ctx.outputs(i, d);
        alphas[d] = num::cholesky_solve(l, column);
    }

    GaussianPrediction pred{num::Matrix(targets.size(), d_y), num::Matrix(targets.size(), d_y)};
    std::vector<double> k_star(n);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        auto x = targets.inputs.row(t);
        for (std::size_t i = 0; i < n; ++i) k_star[i] = kernel(cfg, ctx.inputs.row(i), x);
        std::vector<double> v = solve_lower(l, k_star);
        double reduction = 0.0;
        for (double vi : v) reduction += vi * vi;
        double variance = cfg.signal_variance + cfg.noise_variance - reduction;
        if (variance < 0.0) variance = 0.0;
        for (std::size_t d = 0; d < d_y; ++d) {
            double mu = 0.0;
            for (std::size_t i = 0; i < n; ++i) mu += k_star[i] * alphas[d][i];
            pred.mean(t, d) = mu;
            pred.variance(t, d) = variance;
        }
    }
    return pred;
}

double gp_log_marginal_likelihood(const GpConfig& cfg, const ContextSet& ctx) {
    cfg.validate();
    ctx.validate();
    std::size_t n = ctx.size();
    std::size_t d_y = ctx.outputs.cols();
    num::Matrix l = safe_cholesky(cfg, gram(cfg, ctx), n);
    double log_det_half = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_det_half += std::log(l(i, i));
    double lml = 0.0;
    std::vector<double> column(n);
    for (std::size_t d = 0; d < d_y; ++d) {
        for (std::size_t i = 0; i < n; ++i) column[i] = ctx.outputs(i, d);
        std::vector<double> alpha = num::cholesky_solve(l, column);
        double fit = 0.0;
        for (std::size_t i = 0; i < n; ++i) fit += column[i] * alpha[i];
        lml += -0.5 * fit - log_det_half - 0.5 * static_cast<double>(n) * kLog2Pi;
    }
    return lml;
}

GpConfig fit_gp(const std::vector<ContextSet>& episodes) {
    if (episodes.empty()) {
        throw ContractError("fit_gp needs at least one episode");
    }
    const double length_grid[] = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    const double signal_grid[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    const double noise_grid[] = {1e-4, 1e-3, 1e-2, 0.1, 0.5};
    GpConfig best;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (double ls : length_grid) {
        for (double sv : signal_grid) {
            for (double nv : noise_grid) {
                GpConfig cfg{ls, sv, nv};
                double total = 0.0;
                bool ok = true;
                for (const auto& ep : episodes) {
                    try {
                        total += gp_log_marginal_likelihood(cfg, ep);
                    } catch (const NumericalError&) {
                        ok = false;
                        break;
                    }
                }
                if (ok && total > best_lml) {
                    best_lml = total;
                    best = cfg;
                }
            }
        }
    }
    if (!std::isfinite(best_lml)) {
        throw NumericalError("fit_gp: no grid point produced a positive-definite system");
    }
    return best;
}

} // namespace adacnp::model
