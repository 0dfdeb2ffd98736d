#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "windcast/flow.hpp"
#include "windcast/util/rng.hpp"

using namespace windcast;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// flow over raw coordinates (identity PCA) with random nonzero conditioners
flow::FlowModel random_flow(int latent, int cond, int layers, std::uint64_t seed,
                            double weight_scale = 1.0) {
    flow::FlowConfig config;
    config.n_layers = layers;
    flow::FlowModel model = flow::make_flow(pca::identity(latent), VectorXd::Zero(cond),
                                            VectorXd::Ones(cond), config, seed,
                                            /*zero_init=*/false);
    if (weight_scale != 1.0) {
        for (auto& layer : model.layers) {
            for (auto& w : layer.s_net.weights) w *= weight_scale;
            for (auto& w : layer.t_net.weights) w *= weight_scale;
        }
    }
    return model;
}

// finite-difference Jacobian of layer_forward in u
MatrixXd numeric_jacobian(const flow::CouplingLayer& layer, const VectorXd& u,
                          const VectorXd& y) {
    const int k = static_cast<int>(u.size());
    MatrixXd jac(k, k);
    const double h = 1e-6;
    for (int j = 0; j < k; ++j) {
        VectorXd up = u, um = u;
        up(j) += h;
        um(j) -= h;
        jac.col(j) = (flow::layer_forward(layer, up, y).value -
                      flow::layer_forward(layer, um, y).value) /
                     (2 * h);
    }
    return jac;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("zero-initialized flow is the identity with zero log-det") {
    flow::FlowConfig config;
    auto model = flow::make_flow(pca::identity(6), VectorXd::Zero(4), VectorXd::Ones(4), config,
                                 9, /*zero_init=*/true);
    rng::Rng r(1);
    VectorXd u(6), y(4);
    for (int i = 0; i < 6; ++i) u(i) = r.normal();
    for (int i = 0; i < 4; ++i) y(i) = r.normal();

    auto fwd = flow::layer_forward(model.layers[0], u, y);
    CHECK((fwd.value - u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fwd.log_det == 0.0);

    double ld = 0;
    VectorXd x = flow::forward_all(model, u, y, &ld);
    CHECK((x - u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ld == 0.0);

    // log_prob at identity is the standard normal density of the transform
    const double expected = -0.5 * u.squaredNorm() - 3.0 * std::log(2 * M_PI);
    CHECK(flow::log_prob(model, u, y) == doctest::Approx(expected).epsilon(1e-12));

    // samples ignore the condition while the flow is the identity
    VectorXd y2 = y.array() + 3.0;
    auto s1 = flow::sample_matrix(model, y, 5, 42, flow::Post::None);
    auto s2 = flow::sample_matrix(model, y2, 5, 42, flow::Post::None);
    CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant log-2 scale doubles the transformed half") {
    flow::FlowConfig config;
    config.n_layers = 1;
    config.s_clamp = 1e9;  // effectively linear clamp region
    auto model = flow::make_flow(pca::identity(2), VectorXd::Zero(1), VectorXd::Ones(1), config,
                                 3, /*zero_init=*/true);
    auto& layer = model.layers[0];
    layer.s_net.biases.back().setConstant(std::log(2.0));

    VectorXd u(2), y(1);
    u << 0.7, -1.1;
    y << 0.0;
    auto fwd = flow::layer_forward(layer, u, y);
    CHECK(fwd.value(0) == doctest::Approx(0.7));
    CHECK(fwd.value(1) == doctest::Approx(-2.2).epsilon(1e-12));
    CHECK(fwd.log_det == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    auto inv = flow::layer_inverse(layer, fwd.value, y);
    CHECK((inv.value - u).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(inv.log_det == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

    // adding the scaling layer lowers log_prob by exactly its log-det
    auto base = flow::make_flow(pca::identity(2), VectorXd::Zero(1), VectorXd::Ones(1), config,
                                3, true);
    VectorXd x(2);
    x << 0.3, 0.4;
    const double with_scale = flow::log_prob(model, x, y);
    // invert manually: z = ((x1), (x2)/2), log_det_inv = -log 2
    VectorXd z(2);
    z << 0.3, 0.2;
    const double expected = -0.5 * z.squaredNorm() - std::log(2 * M_PI) - std::log(2.0);
    CHECK(with_scale == doctest::Approx(expected).epsilon(1e-12));
    CHECK(base.layers.size() == 1);
}

TEST_CASE("log-det matches the numeric Jacobian for random layers (K=6)") {
    rng::Rng r(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto model = random_flow(6, 3, 2, 1000 + trial);
        const auto& layer = model.layers[trial % 2];
        VectorXd u(6), y(3);
        for (int i = 0; i < 6; ++i) u(i) = r.normal();
        for (int i = 0; i < 3; ++i) y(i) = r.normal();
        auto fwd = flow::layer_forward(layer, u, y);
        const double numeric = std::log(std::abs(numeric_jacobian(layer, u, y).determinant()));
        CHECK(fwd.log_det == doctest::Approx(numeric).epsilon(1e-5));
    }
}

TEST_CASE("inverse(forward) round trip at machine precision") {
    rng::Rng r(6);
    auto model = random_flow(8, 4, 4, 77);
    for (int trial = 0; trial < 1000; ++trial) {
        VectorXd z(8), y(4);
        for (int i = 0; i < 8; ++i) z(i) = r.normal();
        for (int i = 0; i < 4; ++i) y(i) = r.normal();
        double ld_f = 0, ld_i = 0;
        VectorXd x = flow::forward_all(model, z, y, &ld_f);
        VectorXd back = flow::inverse_all(model, x, y, &ld_i);
        CHECK((back - z).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(ld_f + ld_i == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("log_prob is consistent with the forward transport") {
    rng::Rng r(7);
    auto model = random_flow(5, 2, 4, 31);
    for (int trial = 0; trial < 200; ++trial) {
        VectorXd z(5), y(2);
        for (int i = 0; i < 5; ++i) z(i) = r.normal();
        for (int i = 0; i < 2; ++i) y(i) = r.normal();
        double ld = 0;
        VectorXd x = flow::forward_all(model, z, y, &ld);
        const double phi = -0.5 * z.squaredNorm() - 2.5 * std::log(2 * M_PI);
        CHECK(flow::log_prob(model, x, y) == doctest::Approx(phi - ld).epsilon(1e-9));
    }
}

TEST_CASE("density integrates to one on a K=2 toy model") {
    auto model = random_flow(2, 1, 4, 55, 0.7);
    VectorXd y(1);
    y << 0.4;
    const int grid = 220;
    const double lo = -9, hi = 9;
    const double step = (hi - lo) / (grid - 1);
    double mass = 0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            VectorXd x(2);
            x << lo + i * step, lo + j * step;
            double w = 1.0;
            if (i == 0 || i == grid - 1) w *= 0.5;
            if (j == 0 || j == grid - 1) w *= 0.5;
            mass += w * std::exp(flow::log_prob(model, x, y)) * step * step;
        }
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("NLL gradients match central finite differences") {
    rng::Rng r(8);
    auto model = random_flow(4, 2, 4, 91, 0.8);
    const int n = 6;
    MatrixXd x(n, 4), y(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) x(i, j) = r.normal();
        for (int j = 0; j < 2; ++j) y(i, j) = r.normal();
    }
    auto grads = flow::nll_and_gradients(model, x, y);
    const double h = 1e-5;
    int checked = 0;
    for (size_t l = 0; l < model.layers.size(); ++l) {
        for (int net = 0; net < 2; ++net) {
            auto& mlp = net == 0 ? model.layers[l].s_net : model.layers[l].t_net;
            const auto& g = net == 0 ? grads.s_nets[l] : grads.t_nets[l];
            for (int layer = 0; layer < mlp.layer_count(); ++layer) {
                auto& w = mlp.weights[static_cast<size_t>(layer)];
                for (int a = 0; a < w.rows(); ++a) {
                    for (int b = 0; b < w.cols(); ++b) {
                        const double keep = w(a, b);
                        w(a, b) = keep + h;
                        const double up = flow::nll_and_gradients(model, x, y).nll;
                        w(a, b) = keep - h;
                        const double dn = flow::nll_and_gradients(model, x, y).nll;
                        w(a, b) = keep;
                        const double fd = (up - dn) / (2 * h);
                        CHECK(g.weights[static_cast<size_t>(layer)](a, b) ==
                              doctest::Approx(fd).epsilon(1e-4).scale(1.0));
                        ++checked;
                    }
                }
            }
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("training: no-op at zero epochs, NLL decreases, divergence detected") {
    rng::Rng r(9);
    const int n = 64;
    MatrixXd x(n, 3), y(n, 2);
    for (int i = 0; i < n; ++i) {
        y(i, 0) = r.uniform(0, 1);
        y(i, 1) = r.uniform(0, 1);
        for (int j = 0; j < 3; ++j) x(i, j) = 0.8 * y(i, 0) + 0.1 * r.normal();
    }
    flow::FlowConfig config;
    auto model = flow::make_flow(pca::identity(3), y.colwise().mean(),
                                 VectorXd::Constant(2, 0.3), config, 17, true);
    auto untouched = flow::to_json(model).dump();
    flow::TrainOptions opts;
    opts.epochs = 0;
    CHECK(flow::train(model, x, y, opts).empty());
    CHECK(flow::to_json(model).dump() == untouched);

    opts.epochs = 60;
    opts.learning_rate = 5e-3;
    opts.seed = 4;
    auto trace = flow::train(model, x, y, opts);
    REQUIRE(trace.size() >= 51);
    CHECK(trace[50] < trace[0]);
}

TEST_CASE("1-D conditional toy learns mean and spread") {
    rng::Rng r(10);
    const int n = 512;
    MatrixXd x(n, 1), y(n, 1);
    for (int i = 0; i < n; ++i) {
        y(i, 0) = r.uniform(0.2, 0.8);
        x(i, 0) = y(i, 0) + 0.01 * r.normal();
    }
    flow::FlowConfig config;  // four coupling layers, 2x9 conditioners
    auto model = flow::make_flow(pca::identity(1), y.colwise().mean(),
                                 VectorXd::Constant(1, std::sqrt((y.col(0).array() -
                                                                  y.col(0).mean())
                                                                     .square()
                                                                     .sum() /
                                                                 (n - 1))),
                                 config, 23, true);
    flow::TrainOptions opts;
    opts.epochs = 2500;
    opts.learning_rate = 8e-3;
    opts.seed = 5;
    flow::train(model, x, y, opts);

    for (const double target : {0.3, 0.5, 0.7}) {
        VectorXd yt(1);
        yt << target;
        auto samples = flow::sample_matrix(model, yt, 2000, 99, flow::Post::None);
        const double mean = samples.col(0).mean();
        const double sd = std::sqrt((samples.col(0).array() - mean).square().sum() /
                                    (samples.rows() - 1));
        CHECK(std::abs(mean - target) < 0.05);
        CHECK(sd > 0.005);
        CHECK(sd < 0.02);
    }
}

TEST_CASE("sampling: determinism and clamp postcondition") {
    auto model = random_flow(4, 2, 4, 123, 2.5);
    VectorXd y(2);
    y << 0.5, -0.2;
    auto a = flow::sample_matrix(model, y, 40, 7);
    auto b = flow::sample_matrix(model, y, 40, 7);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 1.0);

    auto raw = flow::sample_matrix(model, y, 40, 7, flow::Post::None);
    CHECK((raw.minCoeff() < 0.0 || raw.maxCoeff() > 1.0));  // clamp actually did something

    auto tame = random_flow(2, 2, 2, 9, 0.2);
    auto rejected = flow::sample_matrix(tame, y, 10, 7, flow::Post::Reject);
    CHECK(rejected.minCoeff() >= 0.0);
    CHECK(rejected.maxCoeff() <= 1.0);
}

TEST_CASE("serialization round trip preserves densities") {
    auto model = random_flow(5, 3, 4, 321);
    auto restored = flow::from_json(flow::to_json(model));
    rng::Rng r(11);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd x(5), y(3);
        for (int i = 0; i < 5; ++i) x(i) = r.normal();
        for (int i = 0; i < 3; ++i) y(i) = r.normal();
        CHECK(flow::log_prob(restored, x, y) == flow::log_prob(model, x, y));
    }
}

TEST_CASE("masks alternate and s stays inside the clamp") {
    auto model = random_flow(6, 2, 4, 45, 30.0);  // big weights to hit the clamp
    for (size_t l = 0; l < model.layers.size(); ++l) {
        CHECK(model.layers[l].parity == static_cast<int>(l % 2));
    }
    rng::Rng r(12);
    for (int trial = 0; trial < 100; ++trial) {
        VectorXd u(6), y(2);
        for (int i = 0; i < 6; ++i) u(i) = 3 * r.normal();
        for (int i = 0; i < 2; ++i) y(i) = 3 * r.normal();
        for (const auto& layer : model.layers) {
            auto fwd = flow::layer_forward(layer, u, y);
            // |log_det| <= trans_size * s_clamp
            CHECK(std::abs(fwd.log_det) <= 3 * layer.s_clamp + 1e-12);
        }
    }
}

}  // TEST_SUITE
