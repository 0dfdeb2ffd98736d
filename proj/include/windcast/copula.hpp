#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <vector>

#include "windcast/data.hpp"

namespace windcast::copula {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LpInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 21 quantile levels {0, 0.05, ..., 1.0}; per timestep a linear predictor
// (slope, intercept) of each conditional quantile from the hour-matched
// forecast value. Levels 0 and 1 are the train min/max as constants.
struct QuantileFan {
    Eigen::VectorXd levels;      // 21
    Eigen::MatrixXd slopes;      // 96 x 21
    Eigen::MatrixXd intercepts;  // 96 x 21
};

struct CopulaModel {
    QuantileFan fan;
    Eigen::MatrixXd correlation;     // 96 x 96, unit diagonal
    Eigen::MatrixXd cholesky_factor; // lower factor of the jittered correlation
};

// Pinball-loss linear quantile regression, solved as an LP. A zero-variance
// regressor collapses to an intercept-only fit (slope 0).
std::pair<double, double> fit_pinball(const std::vector<std::pair<double, double>>& points,
                                      double q);

// Predicted quantile nodes at timestep t for the given forecast, after the
// monotone rearrangement (sort) and clipping to [0, 1].
Eigen::VectorXd fan_nodes(const CopulaModel& model, int t, const Eigen::VectorXd& forecast);

// Piecewise-linear CDF through the 21 conditional quantile nodes.
double conditional_cdf(const CopulaModel& model, int t, const Eigen::VectorXd& forecast,
                       double value);
double conditional_inverse_cdf(const CopulaModel& model, int t, const Eigen::VectorXd& forecast,
                               double u);

// Fits the fan per timestep on the train partition and the Gaussian score
// correlation across timesteps. The per-timestep regressions are independent
// and can run on multiple threads.
CopulaModel fit(const data::Dataset& dataset, int threads = 1);

data::ScenarioSet sample(const CopulaModel& model, const Eigen::VectorXd& y, int n,
                         std::uint64_t seed);

// standard normal CDF and its inverse (machine precision)
double normal_cdf(double x);
double normal_quantile(double p);

nlohmann::json to_json(const CopulaModel& model);
CopulaModel from_json(const nlohmann::json& j);
void save(const CopulaModel& model, const std::string& path);
CopulaModel load(const std::string& path);

}  // namespace windcast::copula
