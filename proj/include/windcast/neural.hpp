#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <vector>

#include "windcast/util/rng.hpp"

namespace windcast::neural {

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StaleCache : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense feed-forward net, tanh hidden activations, identity output.
struct Mlp {
    std::vector<int> layer_sizes;
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;
    std::uint64_t version = 0;  // bumped on every parameter update

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
};

// Glorot-uniform initialization; zero_last zeroes the final layer so the
// freshly built net is the constant-zero map.
Mlp make_mlp(const std::vector<int>& layer_sizes, rng::Rng& rng, bool zero_last = false);

struct ForwardCache {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> pre;   // pre-activations per layer
    std::vector<Eigen::VectorXd> post;  // activations per layer
    std::uint64_t version = 0;
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Eigen::VectorXd input;
};

Eigen::VectorXd forward(const Mlp& mlp, const Eigen::VectorXd& input, ForwardCache* cache);
inline Eigen::VectorXd forward(const Mlp& mlp, const Eigen::VectorXd& input) {
    return forward(mlp, input, nullptr);
}

// Exact gradients of the cached forward pass for a given output gradient.
Gradients backward(const Mlp& mlp, const ForwardCache& cache,
                   const Eigen::VectorXd& output_gradient);

Gradients zero_gradients(const Mlp& mlp);
void accumulate(Gradients& into, const Gradients& g);
void scale(Gradients& g, double factor);

struct AdamState {
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
    long step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam(const Mlp& mlp, double learning_rate = 1e-3);

// Standard bias-corrected Adam update; bumps mlp.version.
void adam_step(Mlp& mlp, const Gradients& gradients, AdamState& state);

nlohmann::json to_json(const Mlp& mlp);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace windcast::neural
