#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "windcast/neural.hpp"
#include "windcast/util/rng.hpp"

using namespace windcast;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// scalar loss used for gradient checks: L = sum_i w_i * out_i
double weighted_output(const neural::Mlp& mlp, const VectorXd& input, const VectorXd& w) {
    return w.dot(neural::forward(mlp, input));
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("zero parameters give the zero map; identity layer is identity") {
    rng::Rng r(11);
    auto zero = neural::make_mlp({3, 4, 2}, r);
    for (auto& w : zero.weights) w.setZero();
    for (auto& b : zero.biases) b.setZero();
    VectorXd x(3);
    x << 0.3, -1.2, 4.0;
    CHECK(neural::forward(zero, x).cwiseAbs().maxCoeff() == 0.0);

    auto linear = neural::make_mlp({3, 3}, r);
    linear.weights[0] = MatrixXd::Identity(3, 3);
    linear.biases[0].setZero();
    CHECK((neural::forward(linear, x) - x).cwiseAbs().maxCoeff() == 0.0);

    auto net = neural::make_mlp({4, 5, 1}, r);
    VectorXd in = VectorXd::LinSpaced(4, -1, 1);
    CHECK(neural::forward(net, in) == neural::forward(net, in));

    CHECK_THROWS_AS((void)neural::forward(net, x), neural::DimensionMismatch);
}

TEST_CASE("backward matches central finite differences on a 3-4-2 net") {
    rng::Rng r(12);
    auto mlp = neural::make_mlp({3, 4, 2}, r);
    VectorXd x(3);
    x << 0.4, -0.9, 1.3;
    VectorXd w(2);
    w << 1.0, -2.0;

    neural::ForwardCache cache;
    neural::forward(mlp, x, &cache);
    auto grads = neural::backward(mlp, cache, w);

    const double h = 1e-5;
    for (int l = 0; l < mlp.layer_count(); ++l) {
        for (int i = 0; i < mlp.weights[static_cast<size_t>(l)].rows(); ++i) {
            for (int j = 0; j < mlp.weights[static_cast<size_t>(l)].cols(); ++j) {
                auto plus = mlp;
                plus.weights[static_cast<size_t>(l)](i, j) += h;
                auto minus = mlp;
                minus.weights[static_cast<size_t>(l)](i, j) -= h;
                const double fd =
                    (weighted_output(plus, x, w) - weighted_output(minus, x, w)) / (2 * h);
                const double an = grads.weights[static_cast<size_t>(l)](i, j);
                CHECK(an == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
            }
        }
        for (int i = 0; i < mlp.biases[static_cast<size_t>(l)].size(); ++i) {
            auto plus = mlp;
            plus.biases[static_cast<size_t>(l)](i) += h;
            auto minus = mlp;
            minus.biases[static_cast<size_t>(l)](i) -= h;
            const double fd =
                (weighted_output(plus, x, w) - weighted_output(minus, x, w)) / (2 * h);
            CHECK(grads.biases[static_cast<size_t>(l)](i) ==
                  doctest::Approx(fd).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("gradient check holds over 50 random shapes") {
    rng::Rng r(13);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const int in = 1 + static_cast<int>(r.uniform_index(4));
        const int hid = 1 + static_cast<int>(r.uniform_index(6));
        const int out = 1 + static_cast<int>(r.uniform_index(3));
        auto mlp = neural::make_mlp({in, hid, out}, r);
        VectorXd x(in);
        for (int i = 0; i < in; ++i) x(i) = r.normal();
        VectorXd w(out);
        for (int i = 0; i < out; ++i) w(i) = r.normal();

        neural::ForwardCache cache;
        neural::forward(mlp, x, &cache);
        auto grads = neural::backward(mlp, cache, w);

        // spot-check a handful of parameters per net
        for (int probe = 0; probe < 6; ++probe) {
            const int l = static_cast<int>(r.uniform_index(2));
            auto& wm = mlp.weights[static_cast<size_t>(l)];
            const int i = static_cast<int>(r.uniform_index(static_cast<std::uint64_t>(wm.rows())));
            const int j = static_cast<int>(r.uniform_index(static_cast<std::uint64_t>(wm.cols())));
            auto plus = mlp;
            plus.weights[static_cast<size_t>(l)](i, j) += h;
            auto minus = mlp;
            minus.weights[static_cast<size_t>(l)](i, j) -= h;
            const double fd =
                (weighted_output(plus, x, w) - weighted_output(minus, x, w)) / (2 * h);
            CHECK(grads.weights[static_cast<size_t>(l)](i, j) ==
                  doctest::Approx(fd).epsilon(2e-4).scale(1.0));
        }
        // input gradient via FD
        for (int i = 0; i < in; ++i) {
            VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            const double fd = (weighted_output(mlp, xp, w) - weighted_output(mlp, xm, w)) / (2 * h);
            CHECK(grads.input(i) == doctest::Approx(fd).epsilon(2e-4).scale(1.0));
        }
    }
}

TEST_CASE("zero output gradient and linear input gradient") {
    rng::Rng r(14);
    auto mlp = neural::make_mlp({3, 5, 2}, r);
    VectorXd x(3);
    x << 1, 2, 3;
    neural::ForwardCache cache;
    neural::forward(mlp, x, &cache);
    auto grads = neural::backward(mlp, cache, VectorXd::Zero(2));
    for (const auto& w : grads.weights) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& b : grads.biases) CHECK(b.cwiseAbs().maxCoeff() == 0.0);

    auto linear = neural::make_mlp({3, 2}, r);
    neural::ForwardCache lc;
    neural::forward(linear, x, &lc);
    VectorXd dout(2);
    dout << 0.7, -0.4;
    auto lg = neural::backward(linear, lc, dout);
    CHECK((lg.input - linear.weights[0].transpose() * dout).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stale cache is rejected") {
    rng::Rng r(15);
    auto mlp = neural::make_mlp({2, 3, 1}, r);
    neural::ForwardCache cache;
    neural::forward(mlp, VectorXd::Zero(2), &cache);
    auto grads = neural::backward(mlp, cache, VectorXd::Ones(1));
    auto adam = neural::make_adam(mlp);
    neural::adam_step(mlp, grads, adam);
    CHECK_THROWS_AS((void)neural::backward(mlp, cache, VectorXd::Ones(1)), neural::StaleCache);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
    rng::Rng r(16);
    auto mlp = neural::make_mlp({2, 3, 1}, r);
    auto before = mlp;
    auto adam = neural::make_adam(mlp);
    neural::adam_step(mlp, neural::zero_gradients(mlp), adam);
    CHECK(adam.step == 1);
    for (int l = 0; l < mlp.layer_count(); ++l) {
        CHECK((mlp.weights[static_cast<size_t>(l)] - before.weights[static_cast<size_t>(l)])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}

TEST_CASE("adam: descent direction and scalar quadratic convergence") {
    rng::Rng r(17);
    // one-parameter net: f(w) = (w - 3)^2, df/dw = 2(w - 3)
    auto mlp = neural::make_mlp({1, 1}, r);
    mlp.weights[0](0, 0) = 0.0;
    mlp.biases[0](0) = 0.0;
    auto adam = neural::make_adam(mlp, 0.1);

    // independent scalar recursion as the oracle
    double w = 0, m = 0, v = 0;
    for (int step = 1; step <= 200; ++step) {
        const double g = 2 * (w - 3);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1 - std::pow(0.9, step));
        const double vh = v / (1 - std::pow(0.999, step));
        w -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    REQUIRE(std::abs(w - 3) < 0.1);  // the oracle itself converges

    for (int step = 0; step < 200; ++step) {
        auto grads = neural::zero_gradients(mlp);
        grads.weights[0](0, 0) = 2 * (mlp.weights[0](0, 0) - 3);
        neural::adam_step(mlp, grads, adam);
    }
    CHECK(mlp.weights[0](0, 0) == doctest::Approx(w).epsilon(1e-12));
    CHECK(std::abs(mlp.weights[0](0, 0) - 3) < 0.1);

    // constant positive gradient moves the parameter down
    auto mlp2 = neural::make_mlp({1, 1}, r);
    mlp2.weights[0](0, 0) = 0.5;
    auto adam2 = neural::make_adam(mlp2, 0.01);
    for (int step = 0; step < 10; ++step) {
        auto grads = neural::zero_gradients(mlp2);
        grads.weights[0](0, 0) = 4.0;
        neural::adam_step(mlp2, grads, adam2);
    }
    CHECK(mlp2.weights[0](0, 0) < 0.5);
}

TEST_CASE("outputs stay finite for finite parameters and inputs") {
    rng::Rng r(18);
    for (int trial = 0; trial < 30; ++trial) {
        auto mlp = neural::make_mlp({4, 8, 8, 2}, r);
        for (auto& w : mlp.weights) w *= 50.0;
        VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = 100 * r.normal();
        CHECK(neural::forward(mlp, x).allFinite());
    }
}

TEST_CASE("shape mismatch in adam is rejected") {
    rng::Rng r(19);
    auto mlp = neural::make_mlp({2, 3}, r);
    auto other = neural::make_mlp({2, 4}, r);
    auto adam = neural::make_adam(mlp);
    auto wrong = neural::zero_gradients(other);
    CHECK_THROWS_AS(neural::adam_step(mlp, wrong, adam), neural::ShapeMismatch);
}

TEST_CASE("json round trip") {
    rng::Rng r(20);
    auto mlp = neural::make_mlp({3, 9, 9, 2}, r);
    auto restored = neural::mlp_from_json(neural::to_json(mlp));
    VectorXd x(3);
    x << 0.1, 0.2, 0.3;
    CHECK((neural::forward(restored, x) - neural::forward(mlp, x)).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
