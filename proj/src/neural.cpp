#include "windcast/neural.hpp"

#include <cmath>

#include "windcast/util/json_eigen.hpp"

namespace windcast::neural {

Mlp make_mlp(const std::vector<int>& layer_sizes, rng::Rng& rng, bool zero_last) {
    if (layer_sizes.size() < 2) {
        throw ShapeMismatch("mlp needs at least an input and an output layer");
    }
    Mlp mlp;
    mlp.layer_sizes = layer_sizes;
    const int layers = static_cast<int>(layer_sizes.size()) - 1;
    for (int l = 0; l < layers; ++l) {
        const int fan_in = layer_sizes[static_cast<size_t>(l)];
        const int fan_out = layer_sizes[static_cast<size_t>(l) + 1];
        Eigen::MatrixXd w(fan_out, fan_in);
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        const bool zero = zero_last && l == layers - 1;
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) w(r, c) = zero ? 0.0 : rng.uniform(-a, a);
        }
        mlp.weights.push_back(std::move(w));
        mlp.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return mlp;
}

Eigen::VectorXd forward(const Mlp& mlp, const Eigen::VectorXd& input, ForwardCache* cache) {
    if (input.size() != mlp.input_dim()) {
        throw DimensionMismatch("mlp forward: expected input length " +
                                std::to_string(mlp.input_dim()));
    }
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->post.clear();
        cache->version = mlp.version;
    }
    Eigen::VectorXd h = input;
    const int layers = mlp.layer_count();
    for (int l = 0; l < layers; ++l) {
        Eigen::VectorXd pre = mlp.weights[static_cast<size_t>(l)] * h +
                              mlp.biases[static_cast<size_t>(l)];
        Eigen::VectorXd post = (l == layers - 1) ? pre : pre.array().tanh().matrix();
        if (cache) {
            cache->pre.push_back(pre);
            cache->post.push_back(post);
        }
        h = std::move(post);
    }
    return h;
}

Gradients backward(const Mlp& mlp, const ForwardCache& cache,
                   const Eigen::VectorXd& output_gradient) {
    if (cache.version != mlp.version) {
        throw StaleCache("backward called with a cache from different parameters");
    }
    if (output_gradient.size() != mlp.output_dim()) {
        throw DimensionMismatch("mlp backward: gradient length mismatch");
    }
    const int layers = mlp.layer_count();
    Gradients g = zero_gradients(mlp);
    Eigen::VectorXd delta = output_gradient;
    for (int l = layers - 1; l >= 0; --l) {
        if (l != layers - 1) {
            // through tanh: post = tanh(pre)
            const Eigen::VectorXd& post = cache.post[static_cast<size_t>(l)];
            delta = (delta.array() * (1.0 - post.array().square())).matrix();
        }
        const Eigen::VectorXd& below =
            l == 0 ? cache.input : cache.post[static_cast<size_t>(l) - 1];
        g.weights[static_cast<size_t>(l)] = delta * below.transpose();
        g.biases[static_cast<size_t>(l)] = delta;
        delta = mlp.weights[static_cast<size_t>(l)].transpose() * delta;
    }
    g.input = delta;
    return g;
}

Gradients zero_gradients(const Mlp& mlp) {
    Gradients g;
    for (int l = 0; l < mlp.layer_count(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(mlp.weights[static_cast<size_t>(l)].rows(),
                                                  mlp.weights[static_cast<size_t>(l)].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(mlp.biases[static_cast<size_t>(l)].size()));
    }
    g.input = Eigen::VectorXd::Zero(mlp.input_dim());
    return g;
}

void accumulate(Gradients& into, const Gradients& g) {
    for (size_t l = 0; l < into.weights.size(); ++l) {
        into.weights[l] += g.weights[l];
        into.biases[l] += g.biases[l];
    }
}

void scale(Gradients& g, double factor) {
    for (size_t l = 0; l < g.weights.size(); ++l) {
        g.weights[l] *= factor;
        g.biases[l] *= factor;
    }
}

AdamState make_adam(const Mlp& mlp, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    for (int l = 0; l < mlp.layer_count(); ++l) {
        const auto& w = mlp.weights[static_cast<size_t>(l)];
        s.m_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        s.v_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        const auto& b = mlp.biases[static_cast<size_t>(l)];
        s.m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
        s.v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    }
    return s;
}

void adam_step(Mlp& mlp, const Gradients& gradients, AdamState& state) {
    if (gradients.weights.size() != mlp.weights.size() ||
        state.m_weights.size() != mlp.weights.size()) {
        throw ShapeMismatch("adam_step: layer count mismatch");
    }
    for (size_t l = 0; l < mlp.weights.size(); ++l) {
        if (gradients.weights[l].rows() != mlp.weights[l].rows() ||
            gradients.weights[l].cols() != mlp.weights[l].cols() ||
            gradients.biases[l].size() != mlp.biases[l].size()) {
            throw ShapeMismatch("adam_step: gradient shape mismatch at layer " +
                                std::to_string(l));
        }
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t l = 0; l < mlp.weights.size(); ++l) {
        auto& mw = state.m_weights[l];
        auto& vw = state.v_weights[l];
        mw = state.beta1 * mw + (1 - state.beta1) * gradients.weights[l];
        vw = state.beta2 * vw.array().matrix() +
             (1 - state.beta2) * gradients.weights[l].array().square().matrix();
        mlp.weights[l].array() -=
            state.learning_rate * (mw.array() / bc1) /
            ((vw.array() / bc2).sqrt() + state.epsilon);

        auto& mb = state.m_biases[l];
        auto& vb = state.v_biases[l];
        mb = state.beta1 * mb + (1 - state.beta1) * gradients.biases[l];
        vb = state.beta2 * vb.array().matrix() +
             (1 - state.beta2) * gradients.biases[l].array().square().matrix();
        mlp.biases[l].array() -= state.learning_rate * (mb.array() / bc1) /
                                 ((vb.array() / bc2).sqrt() + state.epsilon);
    }
    mlp.version += 1;
}

nlohmann::json to_json(const Mlp& mlp) {
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (int l = 0; l < mlp.layer_count(); ++l) {
        weights.push_back(util::mat_to_json(mlp.weights[static_cast<size_t>(l)]));
        biases.push_back(util::vec_to_json(mlp.biases[static_cast<size_t>(l)]));
    }
    return nlohmann::json{
        {"layer_sizes", mlp.layer_sizes}, {"weights", weights}, {"biases", biases}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp mlp;
    mlp.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    for (const auto& w : j.at("weights")) mlp.weights.push_back(util::mat_from_json(w));
    for (const auto& b : j.at("biases")) mlp.biases.push_back(util::vec_from_json(b));
    return mlp;
}

}  // namespace windcast::neural
