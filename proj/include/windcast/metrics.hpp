#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "windcast/data.hpp"

namespace windcast::metrics {

struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewInstances : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Empirical quantile, linear interpolation (type 7). `sorted` must be
// ascending.
double quantile_type7(const std::vector<double>& sorted, double level);

// Gaussian KDE with Silverman bandwidth 0.9 * min(sd, iqr/1.34) * n^(-1/5).
// When the IQR is zero the spread term falls back to the standard deviation.
Eigen::VectorXd kde_pdf(const std::vector<double>& values, const Eigen::VectorXd& eval_points);

struct KdeCurve {
    Eigen::VectorXd grid;
    Eigen::VectorXd density;
};
// Density on a fixed 512-point grid spanning [min - 3h, max + 3h].
KdeCurve kde_curve(const std::vector<double>& values);

std::vector<std::pair<double, double>> qq_points(const std::vector<double>& sample_a,
                                                 const std::vector<double>& sample_b,
                                                 const std::vector<double>& levels);

struct PsdEstimate {
    Eigen::VectorXd frequencies;  // cycles per time step, 0 .. 0.5
    Eigen::VectorXd power;
};

// Welch's method: Hann-windowed segments, averaged one-sided periodograms,
// window-power normalized. No detrending; the Hann main lobe spans one bin on
// either side of a tone.
PsdEstimate welch_psd(const Eigen::VectorXd& series, int segment_length = 32,
                      double overlap_fraction = 0.5);

double energy_score(const Eigen::VectorXd& realization, const Eigen::MatrixXd& scenarios);
double energy_score(const Eigen::VectorXd& realization, const data::ScenarioSet& scenarios);

// Per-timestep empirical quantiles across the days of one partition.
// Result is 96 x levels; levels 0 and 1 give pointwise min and max.
Eigen::MatrixXd quantile_trajectories(const data::Dataset& dataset, data::Split which,
                                      const std::vector<double>& levels);

struct StabilityCell {
    double avg_std = 0;
    double avg_spread = 0;
    int n_days = 0;
};

// Per day: sample standard deviation and max-min spread of the optimal
// objectives; averaged across days.
StabilityCell stability_stats(const std::vector<std::vector<double>>& per_day_objectives);

}  // namespace windcast::metrics
