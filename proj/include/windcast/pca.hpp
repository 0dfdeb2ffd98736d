#pragma once

#include <Eigen/Core>
#include <json.hpp>
#include <stdexcept>

namespace windcast::pca {

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Principal components of the training matrix: mean vector plus K orthonormal
// component rows with their singular values and explained-variance ratios.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;  // K x D, orthonormal rows
    Eigen::VectorXd singular_values;
    Eigen::VectorXd explained_variance_ratio;

    int input_dim() const { return static_cast<int>(mean.size()); }
    int latent_dim() const { return static_cast<int>(components.rows()); }
};

// Rank-K model where K is the smallest count whose cumulative explained
// variance ratio reaches evr_target. The covariance eigendecomposition uses
// cyclic Jacobi rotations; component signs are fixed so each row's
// largest-magnitude entry is positive.
PcaModel fit(const Eigen::MatrixXd& x, double evr_target = 0.9995);

Eigen::VectorXd transform(const PcaModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd inverse_transform(const PcaModel& model, const Eigen::VectorXd& u);

// Identity model (components = I_d); used where a pipeline expects a PCA but
// the data already lives in the working space.
PcaModel identity(int dim);

nlohmann::json to_json(const PcaModel& model);
PcaModel from_json(const nlohmann::json& j);

}  // namespace windcast::pca
