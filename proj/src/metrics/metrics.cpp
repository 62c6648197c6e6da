#include "adacnp/metrics/metrics.hpp"

#include <cmath>
#include <sstream>

#include "adacnp/errors.hpp"
#include "adacnp/models/gaussian.hpp"
#include "adacnp/numeric/matrix.hpp"

namespace adacnp::metrics {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ContractError("inverse_normal_cdf requires p in (0, 1), got " + std::to_string(p));
    }
    // Wichura's algorithm AS 241 (PPND16).
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((1.42151175831644588870e-15 * r + 1.84631831751005468180e-6) * r +
                      7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r +
                    1.36929880922735805310e-1) * r + 5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

std::vector<double> default_quantile_levels() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

double mse_percent(const num::Matrix& pred_means, const num::Matrix& truths) {
    if (pred_means.rows() != truths.rows() || pred_means.cols() != truths.cols()) {
        throw ContractError("mse_percent shape mismatch: " + std::to_string(pred_means.rows()) +
                            "x" + std::to_string(pred_means.cols()) + " vs " +
                            std::to_string(truths.rows()) + "x" + std::to_string(truths.cols()));
    }
    auto mu = pred_means.data();
    auto y = truths.data();
    std::vector<double> sq(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = mu[i] - y[i];
        sq[i] = d * d;
    }
    return 100.0 * num::ordered_sum(sq) / static_cast<double>(sq.size());
}

double nll_mean(const model::GaussianPrediction& pred, const num::Matrix& truths) {
    return model::gaussian_nll(pred, truths);
}

double pinball(const model::GaussianPrediction& pred, const num::Matrix& truths,
               const std::vector<double>& quantile_levels) {
    if (pred.mean.rows() != truths.rows() || pred.mean.cols() != truths.cols()) {
        throw ContractError("pinball shape mismatch: " + std::to_string(pred.mean.rows()) + "x" +
                            std::to_string(pred.mean.cols()) + " vs " +
                            std::to_string(truths.rows()) + "x" + std::to_string(truths.cols()));
    }
    if (quantile_levels.empty()) {
        throw ContractError("pinball needs at least one quantile level");
    }
    auto mu = pred.mean.data();
    auto var = pred.variance.data();
    auto y = truths.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(var[i] > 0.0)) {
            throw ContractError("pinball requires positive variances");
        }
    }
    std::vector<double> per_level(quantile_levels.size());
    std::vector<double> losses(y.size());
    for (std::size_t l = 0; l < quantile_levels.size(); ++l) {
        double q = quantile_levels[l];
        if (!(q > 0.0 && q < 1.0)) {
            throw ContractError("quantile level must lie in (0, 1), got " + std::to_string(q));
        }
        double z = inverse_normal_cdf(q);
        for (std::size_t i = 0; i < y.size(); ++i) {
            double forecast = mu[i] + std::sqrt(var[i]) * z;
            losses[i] = y[i] >= forecast ? q * (y[i] - forecast)
                                         : (1.0 - q) * (forecast - y[i]);
        }
        per_level[l] = num::ordered_sum(losses) / static_cast<double>(losses.size());
    }
    return num::ordered_sum(per_level) / static_cast<double>(per_level.size());
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "mse_percent_mean = " << mse_percent << "\n";
    out << "mse_percent_std = " << mse_percent_spread << "\n";
    out << "nll_mean = " << nll << "\n";
    out << "nll_std = " << nll_spread << "\n";
    out << "pinball_mean = " << pinball << "\n";
    out << "pinball_std = " << pinball_spread << "\n";
    out << "resamples = " << resamples << "\n";
    out << "points_per_resample = " << points_per_resample << "\n";
    return out.str();
}

} // namespace adacnp::metrics
