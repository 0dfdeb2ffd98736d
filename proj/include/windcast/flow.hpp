#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <vector>

#include "windcast/data.hpp"
#include "windcast/neural.hpp"
#include "windcast/pca.hpp"

namespace windcast::flow {

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteOutput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergedLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Affine coupling layer. parity 0 passes the first half of the vector
// through and transforms the rest; parity 1 mirrors that. The conditioners
// see [pass-through half, standardized conditional input]. Scale outputs are
// saturated smoothly at +-s_clamp so exp() cannot overflow while the map
// stays differentiable.
struct CouplingLayer {
    int parity = 0;
    neural::Mlp s_net;
    neural::Mlp t_net;
    double s_clamp = 5.0;
};

struct FlowModel {
    std::vector<CouplingLayer> layers;
    pca::PcaModel pca;
    Eigen::VectorXd cond_mean;
    Eigen::VectorXd cond_std;  // entries > 0
    int latent_dim = 0;
    int cond_dim = 0;
};

struct FlowConfig {
    int n_layers = 4;
    std::vector<int> hidden{9, 9};
    double s_clamp = 5.0;
};

// Untrained model; with zero_init the final conditioner layers are zero so
// the flow starts as the identity map.
FlowModel make_flow(pca::PcaModel pca_model, const Eigen::VectorXd& cond_mean,
                    const Eigen::VectorXd& cond_std, const FlowConfig& config,
                    std::uint64_t seed, bool zero_init = true);

// PCA on the train capacities plus conditional-input standardization from the
// train forecasts.
FlowModel init_for_dataset(const data::Dataset& dataset, double evr_target,
                           const FlowConfig& config, std::uint64_t seed);

Eigen::VectorXd standardize_condition(const FlowModel& model, const Eigen::VectorXd& y);

// y_std must already be standardized.
struct LayerResult {
    Eigen::VectorXd value;
    double log_det;
};
LayerResult layer_forward(const CouplingLayer& layer, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& y_std);
LayerResult layer_inverse(const CouplingLayer& layer, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& y_std);

// Latent-side transport for a raw conditional input y.
Eigen::VectorXd forward_all(const FlowModel& model, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& y, double* log_det = nullptr);
Eigen::VectorXd inverse_all(const FlowModel& model, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& y, double* log_det = nullptr);

// Log-density in PCA coordinates of the data point x given condition y.
double log_prob(const FlowModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Mean negative log-likelihood over rows of (X, Y) together with parameter
// gradients for every conditioner. Exposed for training and gradient checks.
struct NllGradients {
    double nll = 0;
    std::vector<neural::Gradients> s_nets;
    std::vector<neural::Gradients> t_nets;
};
NllGradients nll_and_gradients(const FlowModel& model, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y);

struct TrainOptions {
    int epochs = 1000;
    int batch_size = 0;  // 0 -> full batch
    double learning_rate = 1e-3;
    double min_improvement = 1e-5;
    int patience = 100;  // epochs without improvement before stopping
    std::uint64_t seed = 0;
};

// Adam on the conditioner parameters, minimizing mean NLL. Returns the
// per-epoch mean NLL trace.
std::vector<double> train(FlowModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          const TrainOptions& options);
std::vector<double> train(FlowModel& model, const data::Dataset& dataset,
                          const TrainOptions& options);

enum class Post { Clamp, Reject, None };

Eigen::MatrixXd sample_matrix(const FlowModel& model, const Eigen::VectorXd& y, int n,
                              std::uint64_t seed, Post post = Post::Clamp);
data::ScenarioSet sample(const FlowModel& model, const Eigen::VectorXd& y, int n,
                         std::uint64_t seed, Post post = Post::Clamp);

nlohmann::json to_json(const FlowModel& model);
FlowModel from_json(const nlohmann::json& j);
void save(const FlowModel& model, const std::string& path);
FlowModel load(const std::string& path);

}  // namespace windcast::flow
