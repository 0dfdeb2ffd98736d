#include "windcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace windcast::metrics {

double quantile_type7(const std::vector<double>& sorted, double level) {
    const size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile of empty sample");
    if (level <= 0) return sorted.front();
    if (level >= 1) return sorted.back();
    const double h = (static_cast<double>(n) - 1.0) * level;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

double sample_std(const std::vector<double>& v) {
    const size_t n = v.size();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double silverman_bandwidth(std::vector<double> values) {
    const size_t n = values.size();
    std::sort(values.begin(), values.end());
    const double sd = sample_std(values);
    const double iqr = quantile_type7(values, 0.75) - quantile_type7(values, 0.25);
    double spread = sd;
    if (iqr > 0) spread = std::min(sd, iqr / 1.34);
    if (spread <= 0) throw DegenerateData("kde: all samples identical");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

}  // namespace

Eigen::VectorXd kde_pdf(const std::vector<double>& values, const Eigen::VectorXd& eval_points) {
    if (values.size() < 2) throw DegenerateData("kde: need at least 2 samples");
    const double h = silverman_bandwidth(values);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2 * M_PI));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(eval_points.size());
    for (Eigen::Index i = 0; i < eval_points.size(); ++i) {
        double acc = 0;
        for (const double v : values) {
            const double z = (eval_points(i) - v) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out(i) = acc * norm;
    }
    return out;
}

KdeCurve kde_curve(const std::vector<double>& values) {
    if (values.size() < 2) throw DegenerateData("kde: need at least 2 samples");
    const double h = silverman_bandwidth(values);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn - 3 * h, hi = *mx + 3 * h;
    KdeCurve curve;
    curve.grid = Eigen::VectorXd::LinSpaced(512, lo, hi);
    curve.density = kde_pdf(values, curve.grid);
    return curve;
}

std::vector<std::pair<double, double>> qq_points(const std::vector<double>& sample_a,
                                                 const std::vector<double>& sample_b,
                                                 const std::vector<double>& levels) {
    if (sample_a.empty() || sample_b.empty()) {
        throw std::invalid_argument("qq_points: empty sample");
    }
    std::vector<double> a = sample_a, b = sample_b;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(levels.size());
    for (const double level : levels) {
        out.emplace_back(quantile_type7(a, level), quantile_type7(b, level));
    }
    return out;
}

namespace {

// In-place radix-2 Cooley-Tukey.
void fft(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

PsdEstimate welch_psd(const Eigen::VectorXd& series, int segment_length,
                      double overlap_fraction) {
    const int n = static_cast<int>(series.size());
    if (segment_length < 2 || (segment_length & (segment_length - 1)) != 0) {
        throw std::invalid_argument("segment_length must be a power of two");
    }
    if (n < segment_length) {
        throw TooShort("series shorter than one segment (" + std::to_string(n) + " < " +
                       std::to_string(segment_length) + ")");
    }
    if (!(overlap_fraction >= 0 && overlap_fraction < 1)) {
        throw std::invalid_argument("overlap_fraction must lie in [0, 1)");
    }
    const int l = segment_length;
    const int stride = std::max(1, static_cast<int>(std::lround(l * (1 - overlap_fraction))));
    const int segments = (n - l) / stride + 1;

    Eigen::VectorXd window(l);
    for (int i = 0; i < l; ++i) {
        window(i) = 0.5 * (1.0 - std::cos(2 * M_PI * i / static_cast<double>(l)));
    }
    const double window_power = window.squaredNorm();

    const int bins = l / 2 + 1;
    Eigen::VectorXd power = Eigen::VectorXd::Zero(bins);
    std::vector<std::complex<double>> buf(static_cast<size_t>(l));
    for (int s = 0; s < segments; ++s) {
        for (int i = 0; i < l; ++i) {
            buf[static_cast<size_t>(i)] = series(s * stride + i) * window(i);
        }
        fft(buf);
        for (int k = 0; k < bins; ++k) {
            const double mag2 = std::norm(buf[static_cast<size_t>(k)]);
            const double one_sided = (k == 0 || k == l / 2) ? 1.0 : 2.0;
            power(k) += one_sided * mag2 / window_power;
        }
    }
    power /= static_cast<double>(segments);

    PsdEstimate est;
    est.power = power;
    est.frequencies = Eigen::VectorXd(bins);
    for (int k = 0; k < bins; ++k) est.frequencies(k) = static_cast<double>(k) / l;
    return est;
}

double energy_score(const Eigen::VectorXd& realization, const Eigen::MatrixXd& scenarios) {
    const int ns = static_cast<int>(scenarios.rows());
    if (ns < 1) throw std::invalid_argument("energy_score: empty scenario set");
    if (scenarios.cols() != realization.size()) {
        throw DimensionMismatch("energy_score: scenario width " +
                                std::to_string(scenarios.cols()) + " vs realization length " +
                                std::to_string(realization.size()));
    }
    double closeness = 0;
    for (int s = 0; s < ns; ++s) {
        closeness += (scenarios.row(s).transpose() - realization).norm();
    }
    closeness /= ns;
    double diversity = 0;
    for (int s = 0; s < ns; ++s) {
        for (int t = s + 1; t < ns; ++t) {
            diversity += 2.0 * (scenarios.row(s) - scenarios.row(t)).norm();
        }
    }
    diversity /= 2.0 * ns * ns;
    return closeness - diversity;
}

double energy_score(const Eigen::VectorXd& realization, const data::ScenarioSet& scenarios) {
    return energy_score(realization, scenarios.scenarios);
}

Eigen::MatrixXd quantile_trajectories(const data::Dataset& dataset, data::Split which,
                                      const std::vector<double>& levels) {
    const auto idx = dataset.indices(which);
    if (idx.empty()) throw std::invalid_argument("quantile_trajectories: empty partition");
    Eigen::MatrixXd out(96, static_cast<Eigen::Index>(levels.size()));
    std::vector<double> column(idx.size());
    for (int t = 0; t < 96; ++t) {
        for (size_t i = 0; i < idx.size(); ++i) {
            column[i] = dataset.days[static_cast<size_t>(idx[i])].capacity(t);
        }
        std::sort(column.begin(), column.end());
        for (size_t l = 0; l < levels.size(); ++l) {
            out(t, static_cast<Eigen::Index>(l)) = quantile_type7(column, levels[l]);
        }
    }
    return out;
}

StabilityCell stability_stats(const std::vector<std::vector<double>>& per_day_objectives) {
    if (per_day_objectives.empty()) throw TooFewInstances("stability_stats: no days");
    StabilityCell cell;
    for (const auto& day : per_day_objectives) {
        if (day.size() < 2) {
            throw TooFewInstances("stability_stats: need at least 2 instances per day");
        }
        const auto [mn, mx] = std::minmax_element(day.begin(), day.end());
        cell.avg_std += sample_std(day);
        cell.avg_spread += *mx - *mn;
    }
    cell.n_days = static_cast<int>(per_day_objectives.size());
    cell.avg_std /= cell.n_days;
    cell.avg_spread /= cell.n_days;
    return cell;
}

}  // namespace windcast::metrics
