#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "adacnp/errors.hpp"
#include "adacnp/models/adacnp.hpp"
#include "adacnp/models/bundle.hpp"
#include "adacnp/models/cnp.hpp"
#include "adacnp/models/gaussian.hpp"
#include "adacnp/models/gp.hpp"
#include "adacnp/models/predictor.hpp"
#include "adacnp/models/tape_forward.hpp"
#include "adacnp/rng.hpp"
#include "oracles.hpp"

using namespace adacnp;
using namespace adacnp::model;
using num::Matrix;

namespace {

constexpr double kPi = 3.14159265358979323846;

BundleConfig tiny_config(std::size_t d_x, std::size_t d_y) {
    BundleConfig cfg;
    cfg.d_x = d_x;
    cfg.d_y = d_y;
    cfg.d_e = 4;
    cfg.d_r = 6;
    cfg.encoder_hidden = {8};
    cfg.decoder_hidden = {8};
    cfg.embedding_hidden = {5};
    cfg.scorer_hidden = {5};
    return cfg;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

ContextSet random_context(const ModelBundle& b, std::size_t n_c, Rng& rng) {
    return ContextSet{random_matrix(n_c, b.d_x, rng), random_matrix(n_c, b.d_y, rng)};
}

TargetBatch random_targets(const ModelBundle& b, std::size_t n_t, Rng& rng, bool outputs) {
    TargetBatch t{random_matrix(n_t, b.d_x, rng), std::nullopt};
    if (outputs) t.outputs = random_matrix(n_t, b.d_y, rng);
    return t;
}

void zero_out(num::MlpParams& p) {
    for (auto& w : p.weights)
        for (double& v : w.data()) v = 0.0;
    for (auto& b : p.biases)
        for (double& v : b) v = 0.0;
}

// Per-point Gaussian negative log density written with different algebra than
// the library (log sigma form instead of log variance).
double density_oracle(double mu, double var, double y) {
    double sigma = std::sqrt(var);
    double z = (y - mu) / sigma;
    return std::log(sigma) + 0.5 * std::log(2.0 * kPi) + 0.5 * z * z;
}

double softplus_oracle(double x) { return std::log(1.0 + std::exp(x)); }

// Chained straight-line oracle for the adaptive path: every stage is naive
// test code over oracles::straightline_mlp.
void adacnp_oracle(const ModelBundle& b, const ContextSet& ctx, const TargetBatch& targets,
                   Matrix& mu_out, Matrix& var_out, Matrix& w_out) {
    std::size_t n_c = ctx.size(), n_t = targets.size();
    std::vector<std::vector<double>> reps(n_c), e_ctx(n_c);
    for (std::size_t i = 0; i < n_c; ++i) {
        std::vector<double> pair;
        auto x = ctx.inputs.row(i);
        auto y = ctx.outputs.row(i);
        pair.insert(pair.end(), x.begin(), x.end());
        pair.insert(pair.end(), y.begin(), y.end());
        reps[i] = oracles::straightline_mlp(b.encoder, pair);
        e_ctx[i] = oracles::straightline_mlp(b.embedding, ctx.inputs.row(i));
    }
    mu_out = Matrix(n_t, b.d_y);
    var_out = Matrix(n_t, b.d_y);
    w_out = Matrix(n_t, n_c);
    for (std::size_t j = 0; j < n_t; ++j) {
        std::vector<double> e_t = oracles::straightline_mlp(b.embedding, targets.inputs.row(j));
        std::vector<double> s(n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
            std::vector<double> joint = e_ctx[i];
            joint.insert(joint.end(), e_t.begin(), e_t.end());
            s[i] = oracles::straightline_mlp(b.scorer, joint)[0];
        }
        double m = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        std::vector<double> w(n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
            w[i] = std::exp((s[i] - m) / b.tau);
            z += w[i];
        }
        for (std::size_t i = 0; i < n_c; ++i) {
            w[i] /= z;
            w_out(j, i) = w[i];
        }
        std::vector<double> r(b.d_r, 0.0);
        for (std::size_t i = 0; i < n_c; ++i)
            for (std::size_t d = 0; d < b.d_r; ++d) r[d] += w[i] * reps[i][d];
        std::vector<double> joint(targets.inputs.row(j).begin(), targets.inputs.row(j).end());
        joint.insert(joint.end(), r.begin(), r.end());
        std::vector<double> raw = oracles::straightline_mlp(b.decoder, joint);
        for (std::size_t d = 0; d < b.d_y; ++d) {
            mu_out(j, d) = raw[d];
            var_out(j, d) = softplus_oracle(raw[b.d_y + d]) + kVarianceFloor;
        }
    }
}

} // namespace

TEST_CASE("encode_context: zero-weight encoder emits its bias") {
    Rng rng(101);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    zero_out(b.encoder);
    for (std::size_t d = 0; d < b.d_r; ++d) b.encoder.biases.back()[d] = 0.25 * (d + 1);
    ContextSet ctx = random_context(b, 3, rng);
    Matrix reps = encode_context(b, ctx);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t d = 0; d < b.d_r; ++d) CHECK(reps(i, d) == 0.25 * (d + 1));
}

TEST_CASE("encode_context: duplicated context point duplicates its row") {
    Rng rng(103);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    ContextSet ctx = random_context(b, 2, rng);
    for (std::size_t c = 0; c < b.d_x; ++c) ctx.inputs(1, c) = ctx.inputs(0, c);
    for (std::size_t c = 0; c < b.d_y; ++c) ctx.outputs(1, c) = ctx.outputs(0, c);
    Matrix reps = encode_context(b, ctx);
    for (std::size_t d = 0; d < b.d_r; ++d) CHECK(reps(0, d) == reps(1, d));
}

TEST_CASE("encode_context matches the straight-line oracle") {
    Rng rng(107);
    ModelBundle b = init_bundle(tiny_config(3, 2), rng);
    ContextSet ctx = random_context(b, 4, rng);
    Matrix reps = encode_context(b, ctx);
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> pair;
        auto x = ctx.inputs.row(i);
        auto y = ctx.outputs.row(i);
        pair.insert(pair.end(), x.begin(), x.end());
        pair.insert(pair.end(), y.begin(), y.end());
        auto want = oracles::straightline_mlp(b.encoder, pair);
        for (std::size_t d = 0; d < b.d_r; ++d)
            CHECK(reps(i, d) == doctest::Approx(want[d]).epsilon(1e-13));
    }
}

TEST_CASE("uniform_aggregate basics") {
    Matrix constant(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        constant(i, 0) = 1.5;
        constant(i, 1) = -2.0;
    }
    auto mean = uniform_aggregate(constant);
    CHECK(mean[0] == 1.5);
    CHECK(mean[1] == -2.0);

    Matrix anti(2, 2, {0.7, -0.3, -0.7, 0.3});
    auto zero = uniform_aggregate(anti);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    Rng rng(109);
    Matrix r = random_matrix(3, 4, rng);
    auto got = uniform_aggregate(r);
    for (std::size_t d = 0; d < 4; ++d) {
        double want = (r(0, d) + r(1, d) + r(2, d)) / 3.0;
        CHECK(got[d] == doctest::Approx(want).epsilon(1e-14));
    }

    Matrix empty(0, 4);
    CHECK_THROWS_AS(uniform_aggregate(empty), ContractError);
}

TEST_CASE("embed: identity single-layer embedding returns inputs") {
    Rng rng(113);
    BundleConfig cfg = tiny_config(3, 1);
    cfg.d_e = 3;
    cfg.embedding_hidden = {};
    ModelBundle b = init_bundle(cfg, rng);
    b.embedding.weights[0] = Matrix::identity(3);
    b.embedding.biases[0] = {0, 0, 0};
    Matrix xs = random_matrix(4, 3, rng);
    Matrix e = embed(b, xs);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t d = 0; d < 3; ++d) CHECK(e(i, d) == xs(i, d));
}

TEST_CASE("embed: identical inputs embed identically, matches oracle") {
    Rng rng(127);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    Matrix xs = random_matrix(3, 2, rng);
    xs(2, 0) = xs(0, 0);
    xs(2, 1) = xs(0, 1);
    Matrix e = embed(b, xs);
    for (std::size_t d = 0; d < b.d_e; ++d) CHECK(e(0, d) == e(2, d));
    for (std::size_t i = 0; i < 3; ++i) {
        auto want = oracles::straightline_mlp(b.embedding, xs.row(i));
        for (std::size_t d = 0; d < b.d_e; ++d)
            CHECK(e(i, d) == doctest::Approx(want[d]).epsilon(1e-13));
    }
}

TEST_CASE("score: constant scorer and symmetry on identical embeddings") {
    Rng rng(131);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    zero_out(b.scorer);
    b.scorer.biases.back()[0] = -0.75;
    std::vector<double> e1(b.d_e, 0.3), e2(b.d_e, -0.9);
    CHECK(score(b, e1, e2) == -0.75);
    CHECK(score(b, e2, e1) == -0.75);

    ModelBundle c = init_bundle(tiny_config(2, 1), rng);
    CHECK(score(c, e1, e1) == score(c, e1, e1));
    std::vector<double> joint(e1);
    joint.insert(joint.end(), e2.begin(), e2.end());
    CHECK(score(c, e1, e2) ==
          doctest::Approx(oracles::straightline_mlp(c.scorer, joint)[0]).epsilon(1e-13));
}

TEST_CASE("softmax_weights closed forms") {
    std::vector<double> equal{0.4, 0.4, 0.4};
    auto w = softmax_weights(equal, 2.0);
    for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    std::vector<double> pair{std::log(2.0), 0.0};
    w = softmax_weights(pair, 1.0);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // Direct evaluation oracle: exp(1/0.5)=e^2 against exp(0)=1.
    std::vector<double> hot{1.0, 0.0};
    w = softmax_weights(hot, 0.5);
    double e2 = std::exp(2.0);
    CHECK(w[0] == doctest::Approx(e2 / (e2 + 1.0)).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0 / (e2 + 1.0)).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(0.88080).epsilon(1e-4));
    CHECK(w[1] == doctest::Approx(0.11920).epsilon(1e-4));

    CHECK_THROWS_AS(softmax_weights(hot, 0.0), ContractError);
    CHECK_THROWS_AS(softmax_weights(hot, -1.0), ContractError);
}

TEST_CASE("softmax_weights: monotone sharpening and flattening") {
    Rng rng(137);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 10));
        std::vector<double> s(n);
        for (double& v : s) v = rng.uniform(-2.0, 2.0);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (s[i] > s[arg]) arg = i;
        s[arg] += 0.5; // force a unique maximum
        double t1 = rng.uniform(0.5, 4.0);
        double t2 = t1 * rng.uniform(0.2, 0.8);
        auto w1 = softmax_weights(s, t1);
        auto w2 = softmax_weights(s, t2);
        CHECK(w2[arg] > w1[arg]);

        auto flat = softmax_weights(s, 1e6);
        for (double v : flat) CHECK(std::abs(v - 1.0 / static_cast<double>(n)) < 1e-6);
    }
}

TEST_CASE("weighted_aggregate selection, reduction and oracle") {
    Rng rng(139);
    Matrix reps = random_matrix(4, 3, rng);
    std::vector<double> onehot{0.0, 0.0, 1.0, 0.0};
    auto sel = weighted_aggregate(onehot, reps);
    for (std::size_t d = 0; d < 3; ++d) CHECK(sel[d] == reps(2, d));

    std::vector<double> uniform(4, 0.25);
    auto wa = weighted_aggregate(uniform, reps);
    auto ua = uniform_aggregate(reps);
    for (std::size_t d = 0; d < 3; ++d) CHECK(wa[d] == doctest::Approx(ua[d]).epsilon(1e-15));

    std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    auto got = weighted_aggregate(w, reps);
    for (std::size_t d = 0; d < 3; ++d) {
        double want = 0.0;
        for (std::size_t i = 0; i < 4; ++i) want += w[i] * reps(i, d);
        CHECK(got[d] == doctest::Approx(want).epsilon(1e-14));
    }

    std::vector<double> bad{0.5, 0.5};
    CHECK_THROWS_AS(weighted_aggregate(bad, reps), ContractError);
}

TEST_CASE("weighted_aggregate with exactly uniform weights equals uniform_aggregate") {
    // 1/n is exactly representable for n = 4, so the reduction must be exact.
    Rng rng(141);
    Matrix reps = random_matrix(4, 5, rng);
    std::vector<double> uniform(4, 0.25);
    auto a = weighted_aggregate(uniform, reps);
    auto b = uniform_aggregate(reps);
    for (std::size_t d = 0; d < 5; ++d) CHECK(a[d] == b[d]);
}

TEST_CASE("decode: softplus head closed forms") {
    Rng rng(149);
    ModelBundle b = init_bundle(tiny_config(2, 2), rng);
    zero_out(b.decoder);
    std::vector<double> x(b.d_x, 0.4), r(b.d_r, -0.2);
    auto [mu0, var0] = decode(b, x, r);
    for (double m : mu0) CHECK(m == 0.0);
    for (double v : var0) CHECK(v == doctest::Approx(std::log(2.0) + kVarianceFloor).epsilon(1e-14));

    b.decoder.biases.back()[2] = -40.0;
    b.decoder.biases.back()[3] = -40.0;
    auto [mu1, var1] = decode(b, x, r);
    (void)mu1;
    for (double v : var1) CHECK(v == doctest::Approx(kVarianceFloor).epsilon(1e-10));
}

TEST_CASE("cnp_predict: permuted context is bitwise identical") {
    Rng rng(151);
    ModelBundle b = init_bundle(tiny_config(2, 2), rng);
    ContextSet ctx = random_context(b, 6, rng);
    TargetBatch targets = random_targets(b, 3, rng, false);
    GaussianPrediction p1 = cnp_predict(b, ctx, targets);

    ContextSet permuted{Matrix(6, b.d_x), Matrix(6, b.d_y)};
    std::vector<std::size_t> order{3, 0, 5, 1, 4, 2};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t c = 0; c < b.d_x; ++c) permuted.inputs(i, c) = ctx.inputs(order[i], c);
        for (std::size_t c = 0; c < b.d_y; ++c) permuted.outputs(i, c) = ctx.outputs(order[i], c);
    }
    GaussianPrediction p2 = cnp_predict(b, permuted, targets);
    for (std::size_t i = 0; i < p1.mean.size(); ++i) {
        CHECK(p1.mean.data()[i] == p2.mean.data()[i]);
        CHECK(p1.variance.data()[i] == p2.variance.data()[i]);
    }
}

TEST_CASE("adacnp_predict: permutation leaves prediction bitwise identical, weights reordered") {
    Rng rng(157);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    ContextSet ctx = random_context(b, 5, rng);
    TargetBatch targets = random_targets(b, 4, rng, false);
    auto [p1, w1] = adacnp_predict(b, ctx, targets);

    std::vector<std::size_t> order{4, 2, 0, 3, 1};
    ContextSet permuted{Matrix(5, b.d_x), Matrix(5, b.d_y)};
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t c = 0; c < b.d_x; ++c) permuted.inputs(i, c) = ctx.inputs(order[i], c);
        for (std::size_t c = 0; c < b.d_y; ++c) permuted.outputs(i, c) = ctx.outputs(order[i], c);
    }
    auto [p2, w2] = adacnp_predict(b, permuted, targets);
    for (std::size_t i = 0; i < p1.mean.size(); ++i) {
        CHECK(p1.mean.data()[i] == p2.mean.data()[i]);
        CHECK(p1.variance.data()[i] == p2.variance.data()[i]);
    }
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 5; ++i) CHECK(w2.w(j, i) == w1.w(j, order[i]));
    w1.validate();
    w2.validate();
}

TEST_CASE("adacnp_predict: single context point gets weight one and equals cnp") {
    Rng rng(163);
    ModelBundle b = init_bundle(tiny_config(2, 2), rng);
    ContextSet ctx = random_context(b, 1, rng);
    TargetBatch targets = random_targets(b, 3, rng, false);
    auto [pred, w] = adacnp_predict(b, ctx, targets);
    for (std::size_t j = 0; j < 3; ++j) CHECK(w.w(j, 0) == 1.0);
    GaussianPrediction cnp = cnp_predict(b, ctx, targets);
    for (std::size_t i = 0; i < pred.mean.size(); ++i) {
        CHECK(pred.mean.data()[i] == doctest::Approx(cnp.mean.data()[i]).epsilon(1e-14));
        CHECK(pred.variance.data()[i] == doctest::Approx(cnp.variance.data()[i]).epsilon(1e-14));
    }
}

TEST_CASE("adacnp_predict: huge temperature flattens to the cnp prediction") {
    Rng rng(167);
    BundleConfig cfg = tiny_config(2, 1);
    cfg.tau = 1e6;
    ModelBundle b = init_bundle(cfg, rng);
    ContextSet ctx = random_context(b, 7, rng);
    TargetBatch targets = random_targets(b, 3, rng, false);
    auto [pred, w] = adacnp_predict(b, ctx, targets);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(w.w(j, i) - 1.0 / 7.0) < 1e-6);
    GaussianPrediction cnp = cnp_predict(b, ctx, targets);
    for (std::size_t i = 0; i < pred.mean.size(); ++i) {
        CHECK(std::abs(pred.mean.data()[i] - cnp.mean.data()[i]) < 1e-6);
        CHECK(std::abs(pred.variance.data()[i] - cnp.variance.data()[i]) < 1e-6);
    }
}

TEST_CASE("adacnp_predict and cnp_predict match the chained straight-line oracle") {
    Rng rng(173);
    ModelBundle b = init_bundle(tiny_config(3, 2), rng);
    b.tau = 0.7;
    ContextSet ctx = random_context(b, 5, rng);
    TargetBatch targets = random_targets(b, 4, rng, false);
    auto [pred, w] = adacnp_predict(b, ctx, targets);
    Matrix mu_o, var_o, w_o;
    adacnp_oracle(b, ctx, targets, mu_o, var_o, w_o);
    for (std::size_t i = 0; i < pred.mean.size(); ++i) {
        CHECK(pred.mean.data()[i] == doctest::Approx(mu_o.data()[i]).epsilon(1e-11));
        CHECK(pred.variance.data()[i] == doctest::Approx(var_o.data()[i]).epsilon(1e-11));
    }
    for (std::size_t i = 0; i < w.w.size(); ++i)
        CHECK(w.w.data()[i] == doctest::Approx(w_o.data()[i]).epsilon(1e-11));

    // CNP composition: straight-line encode, naive mean, straight-line decode.
    GaussianPrediction cnp = cnp_predict(b, ctx, targets);
    std::vector<double> mean_rep(b.d_r, 0.0);
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        std::vector<double> pair;
        auto x = ctx.inputs.row(i);
        auto y = ctx.outputs.row(i);
        pair.insert(pair.end(), x.begin(), x.end());
        pair.insert(pair.end(), y.begin(), y.end());
        auto rep = oracles::straightline_mlp(b.encoder, pair);
        for (std::size_t d = 0; d < b.d_r; ++d) mean_rep[d] += rep[d] / 5.0;
    }
    for (std::size_t j = 0; j < targets.size(); ++j) {
        std::vector<double> joint(targets.inputs.row(j).begin(), targets.inputs.row(j).end());
        joint.insert(joint.end(), mean_rep.begin(), mean_rep.end());
        auto raw = oracles::straightline_mlp(b.decoder, joint);
        for (std::size_t d = 0; d < b.d_y; ++d) {
            CHECK(cnp.mean(j, d) == doctest::Approx(raw[d]).epsilon(1e-11));
            CHECK(cnp.variance(j, d) ==
                  doctest::Approx(softplus_oracle(raw[b.d_y + d]) + kVarianceFloor).epsilon(1e-11));
        }
    }
}

TEST_CASE("weight matrix rows are normalized over random episodes") {
    Rng rng(179);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    for (int rep = 0; rep < 25; ++rep) {
        std::size_t n_c = static_cast<std::size_t>(rng.uniform_int(1, 9));
        ContextSet ctx = random_context(b, n_c, rng);
        TargetBatch targets = random_targets(b, 3, rng, false);
        auto [pred, w] = adacnp_predict(b, ctx, targets);
        (void)pred;
        w.validate();
        for (std::size_t j = 0; j < w.w.rows(); ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < w.w.cols(); ++i) sum += w.w(j, i);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("gaussian_nll closed forms and oracle") {
    GaussianPrediction p{Matrix(1, 1, {0.0}), Matrix(1, 1, {1.0})};
    Matrix y0(1, 1, {0.0});
    CHECK(gaussian_nll(p, y0) == doctest::Approx(0.918939).epsilon(1e-6));
    Matrix y1(1, 1, {1.0});
    CHECK(gaussian_nll(p, y1) == doctest::Approx(1.418939).epsilon(1e-6));

    Rng rng(181);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 5));
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 3));
        GaussianPrediction pred{random_matrix(n, d, rng), Matrix(n, d)};
        Matrix truths = random_matrix(n, d, rng);
        for (double& v : pred.variance.data()) v = rng.uniform(0.05, 3.0);
        double want = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c)
                want += density_oracle(pred.mean(i, c), pred.variance(i, c), truths(i, c));
        want /= static_cast<double>(n * d);
        CHECK(gaussian_nll(pred, truths) == doctest::Approx(want).epsilon(1e-12));
    }

    GaussianPrediction bad{Matrix(1, 1, {0.0}), Matrix(1, 1, {0.0})};
    CHECK_THROWS_AS(gaussian_nll(bad, y0), ContractError);
}

TEST_CASE("gp_predict interpolates noiselessly and reverts to the prior far away") {
    Rng rng(191);
    GpConfig cfg{1.0, 2.0, 0.0};
    ContextSet ctx{random_matrix(5, 1, rng, -2.0, 2.0), random_matrix(5, 1, rng)};
    TargetBatch at_ctx{ctx.inputs, std::nullopt};
    GaussianPrediction p = gp_predict(cfg, ctx, at_ctx);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(p.mean(i, 0) - ctx.outputs(i, 0)) < 1e-8);
        CHECK(std::abs(p.variance(i, 0)) < 1e-8);
    }

    TargetBatch far{Matrix(1, 1, {250.0}), std::nullopt};
    GaussianPrediction fp = gp_predict(cfg, ctx, far);
    CHECK(std::abs(fp.mean(0, 0)) < 1e-6);
    CHECK(std::abs(fp.variance(0, 0) - cfg.signal_variance) < 1e-6);
}

TEST_CASE("gp_predict matches the dense-inverse oracle on a 3-point case") {
    GpConfig cfg{0.8, 1.5, 0.1};
    ContextSet ctx{Matrix(3, 1, {-1.0, 0.2, 1.4}), Matrix(3, 1, {0.5, -0.3, 1.1})};
    TargetBatch t{Matrix(2, 1, {0.0, 2.0}), std::nullopt};
    GaussianPrediction p = gp_predict(cfg, ctx, t);

    // Oracle: explicit 3x3 inverse via the adjugate.
    auto kfn = [&](double a, double b) {
        double d = a - b;
        return cfg.signal_variance * std::exp(-d * d / (2.0 * cfg.length_scale * cfg.length_scale));
    };
    double xs[3] = {-1.0, 0.2, 1.4};
    double ys[3] = {0.5, -0.3, 1.1};
    double K[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            K[i][j] = kfn(xs[i], xs[j]);
            if (i == j) K[i][j] += cfg.noise_variance + 1e-10 * cfg.signal_variance;
        }
    double det = K[0][0] * (K[1][1] * K[2][2] - K[1][2] * K[2][1]) -
                 K[0][1] * (K[1][0] * K[2][2] - K[1][2] * K[2][0]) +
                 K[0][2] * (K[1][0] * K[2][1] - K[1][1] * K[2][0]);
    double inv[3][3];
    inv[0][0] = (K[1][1] * K[2][2] - K[1][2] * K[2][1]) / det;
    inv[0][1] = (K[0][2] * K[2][1] - K[0][1] * K[2][2]) / det;
    inv[0][2] = (K[0][1] * K[1][2] - K[0][2] * K[1][1]) / det;
    inv[1][0] = (K[1][2] * K[2][0] - K[1][0] * K[2][2]) / det;
    inv[1][1] = (K[0][0] * K[2][2] - K[0][2] * K[2][0]) / det;
    inv[1][2] = (K[0][2] * K[1][0] - K[0][0] * K[1][2]) / det;
    inv[2][0] = (K[1][0] * K[2][1] - K[1][1] * K[2][0]) / det;
    inv[2][1] = (K[0][1] * K[2][0] - K[0][0] * K[2][1]) / det;
    inv[2][2] = (K[0][0] * K[1][1] - K[0][1] * K[1][0]) / det;

    double queries[2] = {0.0, 2.0};
    for (int q = 0; q < 2; ++q) {
        double kstar[3];
        for (int i = 0; i < 3; ++i) kstar[i] = kfn(xs[i], queries[q]);
        double mean = 0.0, quad = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                mean += kstar[i] * inv[i][j] * ys[j];
                quad += kstar[i] * inv[i][j] * kstar[j];
            }
        double var = cfg.signal_variance + cfg.noise_variance - quad;
        CHECK(p.mean(q, 0) == doctest::Approx(mean).epsilon(1e-9));
        CHECK(p.variance(q, 0) == doctest::Approx(var).epsilon(1e-9));
    }
}

TEST_CASE("fit_gp recovers a sensible scale on smooth data") {
    Rng rng(193);
    std::vector<ContextSet> episodes;
    for (int e = 0; e < 4; ++e) {
        Matrix x(12, 1), y(12, 1);
        for (std::size_t i = 0; i < 12; ++i) {
            x(i, 0) = rng.uniform(-3.0, 3.0);
            y(i, 0) = std::sin(x(i, 0)) + rng.normal(0.0, 0.05);
        }
        episodes.push_back(ContextSet{x, y});
    }
    GpConfig cfg = fit_gp(episodes);
    cfg.validate();
    CHECK(cfg.noise_variance <= 0.1);
    CHECK(cfg.length_scale >= 0.25);
    CHECK(cfg.length_scale <= 8.0);
}

TEST_CASE("tape episode loss equals the plain-path NLL for both model kinds") {
    Rng rng(197);
    ModelBundle b = init_bundle(tiny_config(3, 2), rng);
    ContextSet ctx = random_context(b, 4, rng);
    TargetBatch targets = random_targets(b, 3, rng, true);

    for (ModelKind kind : {ModelKind::kAdaCnp, ModelKind::kCnp}) {
        num::Tape tape;
        TapeBundle nets = TapeBundle::record(tape, b);
        num::NodeId loss = record_episode_nll(tape, nets, b, ctx, targets, kind);
        GaussianPrediction pred = kind == ModelKind::kAdaCnp
                                      ? adacnp_predict(b, ctx, targets).first
                                      : cnp_predict(b, ctx, targets);
        double plain = gaussian_nll(pred, *targets.outputs);
        CHECK(tape.value(loss)[0] == doctest::Approx(plain).epsilon(1e-12));
    }
}

TEST_CASE("end-to-end adacnp NLL gradients pass finite differences") {
    Rng rng(199);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    ContextSet ctx = random_context(b, 3, rng);
    TargetBatch targets = random_targets(b, 2, rng, true);

    num::Tape tape;
    TapeBundle nets = TapeBundle::record(tape, b);
    num::NodeId loss = record_episode_nll(tape, nets, b, ctx, targets, ModelKind::kAdaCnp);
    tape.backward(loss);
    auto grads = nets.gradient_blocks(tape);

    auto spans = b.param_spans();
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t blk = 0; blk < spans.size(); ++blk) {
        for (std::size_t i = 0; i < spans[blk].size(); ++i) {
            double keep = spans[blk][i];
            spans[blk][i] = keep + h;
            double up = gaussian_nll(adacnp_predict(b, ctx, targets).first, *targets.outputs);
            spans[blk][i] = keep - h;
            double down = gaussian_nll(adacnp_predict(b, ctx, targets).first, *targets.outputs);
            spans[blk][i] = keep;
            double fd = (up - down) / (2.0 * h);
            worst = std::max(worst, oracles::rel_err(grads[blk][i], fd));
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("bundle checkpoint round-trips with standardization and config text") {
    Rng rng(211);
    ModelBundle b = init_bundle(tiny_config(2, 2), rng);
    BundleCheckpoint ckpt;
    ckpt.bundle = b;
    ckpt.kind = ModelKind::kCnp;
    ckpt.config_text = "seed = 7\nmodel = cnp\n";
    Standardization s;
    s.x_mean = {0.5, -1.0};
    s.x_scale = {2.0, 0.5};
    s.y_mean = {1.0, 2.0};
    s.y_scale = {3.0, 4.0};
    ckpt.standardization = s;

    auto path = std::filesystem::temp_directory_path() / "adacnp_test_bundle.bin";
    save_bundle(path.string(), ckpt);
    BundleCheckpoint loaded = load_bundle(path.string());
    std::filesystem::remove(path);

    CHECK(loaded.kind == ModelKind::kCnp);
    CHECK(loaded.config_text == ckpt.config_text);
    REQUIRE(loaded.standardization.has_value());
    CHECK(loaded.standardization->x_scale == s.x_scale);
    CHECK(loaded.bundle.tau == b.tau);
    CHECK(loaded.bundle.d_r == b.d_r);
    auto a_spans = b.param_spans();
    auto l_spans = loaded.bundle.param_spans();
    REQUIRE(a_spans.size() == l_spans.size());
    for (std::size_t k = 0; k < a_spans.size(); ++k) {
        REQUIRE(a_spans[k].size() == l_spans[k].size());
        for (std::size_t i = 0; i < a_spans[k].size(); ++i)
            CHECK(a_spans[k][i] == l_spans[k][i]);
    }
}

TEST_CASE("bundle validation rejects inconsistent dimension chains") {
    Rng rng(223);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    b.d_e += 1;
    CHECK_THROWS_AS(b.validate(), ContractError);
    b.d_e -= 1;
    b.tau = 0.0;
    CHECK_THROWS_AS(b.validate(), ContractError);
}

TEST_CASE("predictor interface dispatches to the right path") {
    Rng rng(227);
    ModelBundle b = init_bundle(tiny_config(2, 1), rng);
    ContextSet ctx = random_context(b, 4, rng);
    TargetBatch targets = random_targets(b, 2, rng, false);

    BundlePredictor ada(b, ModelKind::kAdaCnp);
    BundlePredictor cnp(b, ModelKind::kCnp);
    GaussianPrediction pa = ada.predict(ctx, targets);
    GaussianPrediction pc = cnp.predict(ctx, targets);
    GaussianPrediction wa = adacnp_predict(b, ctx, targets).first;
    GaussianPrediction wc = cnp_predict(b, ctx, targets);
    for (std::size_t i = 0; i < pa.mean.size(); ++i) {
        CHECK(pa.mean.data()[i] == wa.mean.data()[i]);
        CHECK(pc.mean.data()[i] == wc.mean.data()[i]);
    }
}
