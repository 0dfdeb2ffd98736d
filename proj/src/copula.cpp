#include "windcast/copula.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "windcast/lp.hpp"
#include "windcast/util/json_eigen.hpp"
#include "windcast/util/parallel.hpp"
#include "windcast/util/rng.hpp"

namespace windcast::copula {

namespace {

constexpr double kUniformClip = 1e-6;

// Lower-triangular Cholesky with jitter escalation; the empirical score
// correlation can be numerically semidefinite.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& corr) {
    const int n = static_cast<int>(corr.rows());
    for (double jitter = 1e-8; jitter <= 1e-4 + 1e-12; jitter *= 10) {
        Eigen::MatrixXd a = corr;
        a.diagonal().array() += jitter;
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double sum = a(i, j);
                for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
                if (i == j) {
                    if (sum <= 0) {
                        ok = false;
                        break;
                    }
                    l(i, i) = std::sqrt(sum);
                } else {
                    l(i, j) = sum / l(j, j);
                }
            }
        }
        if (ok) return l;
    }
    throw std::runtime_error("correlation matrix is not factorizable even with jitter");
}

std::pair<double, double> fit_pinball_intercept_only(const std::vector<double>& capacities,
                                                     double q) {
    const int n = static_cast<int>(capacities.size());
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Minimize;
    const int nv = 1 + 2 * n;  // b, u_i, v_i
    prog.c = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i) {
        prog.c(1 + i) = q;
        prog.c(1 + n + i) = 1 - q;
    }
    prog.a = Eigen::MatrixXd::Zero(n, nv);
    prog.b = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        prog.a(i, 0) = 1;
        prog.a(i, 1 + i) = 1;
        prog.a(i, 1 + n + i) = -1;
        prog.b(i) = capacities[static_cast<size_t>(i)];
        prog.rel.push_back(lp::Relation::Equal);
    }
    prog.lo = Eigen::VectorXd::Zero(nv);
    prog.hi = Eigen::VectorXd::Constant(nv, lp::infinity());
    prog.lo(0) = -lp::infinity();
    auto sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) {
        throw LpInfeasible("pinball LP did not solve to optimality");
    }
    return {0.0, sol.x(0)};
}

}  // namespace

std::pair<double, double> fit_pinball(const std::vector<std::pair<double, double>>& input,
                                      double q) {
    const int n = static_cast<int>(input.size());
    if (n < 2) throw InsufficientData("pinball regression needs at least 2 points");
    if (!(q > 0 && q < 1)) throw std::invalid_argument("quantile level must lie in (0, 1)");

    // The pinball optimum can be a tie interval (whenever q*n is integral);
    // the simplex then returns whichever vertex the row order leads to.
    // Sorting makes the fit independent of the caller's point order.
    std::vector<std::pair<double, double>> points = input;
    std::sort(points.begin(), points.end());

    double mean_f = 0;
    for (const auto& [f, c] : points) mean_f += f;
    mean_f /= n;
    double var_f = 0;
    for (const auto& [f, c] : points) var_f += (f - mean_f) * (f - mean_f);
    if (var_f < 1e-12) {
        std::vector<double> caps;
        caps.reserve(static_cast<size_t>(n));
        for (const auto& [f, c] : points) caps.push_back(c);
        return fit_pinball_intercept_only(caps, q);
    }

    // variables: a, b (free), then u_i >= 0, v_i >= 0 with
    // a*f_i + b + u_i - v_i = c_i, minimizing sum q*u_i + (1-q)*v_i
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Minimize;
    const int nv = 2 + 2 * n;
    prog.c = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i) {
        prog.c(2 + i) = q;
        prog.c(2 + n + i) = 1 - q;
    }
    prog.a = Eigen::MatrixXd::Zero(n, nv);
    prog.b = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        prog.a(i, 0) = points[static_cast<size_t>(i)].first;
        prog.a(i, 1) = 1;
        prog.a(i, 2 + i) = 1;
        prog.a(i, 2 + n + i) = -1;
        prog.b(i) = points[static_cast<size_t>(i)].second;
        prog.rel.push_back(lp::Relation::Equal);
    }
    prog.lo = Eigen::VectorXd::Zero(nv);
    prog.hi = Eigen::VectorXd::Constant(nv, lp::infinity());
    prog.lo(0) = -lp::infinity();
    prog.lo(1) = -lp::infinity();

    lp::SolveOptions opt;
    opt.basis_hint.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        opt.basis_hint.push_back(points[static_cast<size_t>(i)].second >= 0 ? 2 + i : 2 + n + i);
    }
    auto sol = lp::solve(prog, opt);
    if (sol.status != lp::Status::Optimal) {
        throw LpInfeasible("pinball LP did not solve to optimality");
    }
    return {sol.x(0), sol.x(1)};
}

Eigen::VectorXd fan_nodes(const CopulaModel& model, int t, const Eigen::VectorXd& forecast) {
    if (t < 0 || t >= 96) throw std::invalid_argument("timestep out of range");
    if (forecast.size() != 24) throw std::invalid_argument("forecast must have 24 entries");
    const double f = forecast(t / 4);  // hour-matched forecast value
    const int nl = static_cast<int>(model.fan.levels.size());
    Eigen::VectorXd nodes(nl);
    for (int l = 0; l < nl; ++l) {
        nodes(l) = model.fan.slopes(t, l) * f + model.fan.intercepts(t, l);
    }
    std::sort(nodes.data(), nodes.data() + nodes.size());
    return nodes.cwiseMax(0.0).cwiseMin(1.0);
}

double conditional_cdf(const CopulaModel& model, int t, const Eigen::VectorXd& forecast,
                       double value) {
    const Eigen::VectorXd nodes = fan_nodes(model, t, forecast);
    const int last = static_cast<int>(nodes.size()) - 1;
    if (value <= nodes(0)) return value < nodes(0) ? 0.0 : (nodes(0) < nodes(last) ? 0.0 : 0.5);
    if (value >= nodes(last)) return 1.0;
    for (int i = 0; i < last; ++i) {
        if (value <= nodes(i + 1)) {
            const double lo = model.fan.levels(i), hi = model.fan.levels(i + 1);
            if (nodes(i + 1) > nodes(i)) {
                return lo + (hi - lo) * (value - nodes(i)) / (nodes(i + 1) - nodes(i));
            }
            // flat segment: keep scanning for the interpolable piece
        }
    }
    return 1.0;
}

double conditional_inverse_cdf(const CopulaModel& model, int t, const Eigen::VectorXd& forecast,
                               double u) {
    const Eigen::VectorXd nodes = fan_nodes(model, t, forecast);
    const int intervals = static_cast<int>(nodes.size()) - 1;
    u = std::clamp(u, 0.0, 1.0);
    const double pos = u * intervals;
    const int i = std::min(intervals - 1, static_cast<int>(std::floor(pos)));
    const double frac = pos - i;
    return nodes(i) + frac * (nodes(i + 1) - nodes(i));
}

CopulaModel fit(const data::Dataset& dataset, int threads) {
    const auto train_idx = dataset.indices(data::Split::Train);
    const int n = static_cast<int>(train_idx.size());
    if (n < 25) {
        throw InsufficientData("copula fit needs at least 25 training days, got " +
                               std::to_string(n));
    }

    CopulaModel model;
    const int nl = 21;
    model.fan.levels = Eigen::VectorXd::LinSpaced(nl, 0.0, 1.0);
    model.fan.slopes = Eigen::MatrixXd::Zero(96, nl);
    model.fan.intercepts = Eigen::MatrixXd::Zero(96, nl);

    util::parallel_for(96, threads, [&](size_t ti) {
        const int t = static_cast<int>(ti);
        std::vector<std::pair<double, double>> points;
        points.reserve(static_cast<size_t>(n));
        double mn = 1e300, mx = -1e300;
        for (const int d : train_idx) {
            const auto& day = dataset.days[static_cast<size_t>(d)];
            const double cap = day.capacity(t);
            points.emplace_back(day.forecast(t / 4), cap);
            mn = std::min(mn, cap);
            mx = std::max(mx, cap);
        }
        model.fan.intercepts(t, 0) = mn;
        model.fan.intercepts(t, nl - 1) = mx;
        for (int l = 1; l < nl - 1; ++l) {
            const auto [slope, intercept] = fit_pinball(points, model.fan.levels(l));
            model.fan.slopes(t, l) = slope;
            model.fan.intercepts(t, l) = intercept;
        }
    });

    // Gaussian scores via the probability integral transform.
    Eigen::MatrixXd scores(n, 96);
    for (int i = 0; i < n; ++i) {
        const auto& day = dataset.days[static_cast<size_t>(train_idx[static_cast<size_t>(i)])];
        for (int t = 0; t < 96; ++t) {
            double u = conditional_cdf(model, t, day.forecast, day.capacity(t));
            u = std::clamp(u, kUniformClip, 1.0 - kUniformClip);
            scores(i, t) = normal_quantile(u);
        }
    }

    Eigen::VectorXd mean = scores.colwise().mean();
    Eigen::MatrixXd centered = scores.rowwise() - mean.transpose();
    Eigen::VectorXd sd(96);
    for (int t = 0; t < 96; ++t) sd(t) = centered.col(t).norm();
    model.correlation = Eigen::MatrixXd::Identity(96, 96);
    for (int i = 0; i < 96; ++i) {
        for (int j = i + 1; j < 96; ++j) {
            double rho = 0;
            if (sd(i) > 1e-12 && sd(j) > 1e-12) {
                rho = centered.col(i).dot(centered.col(j)) / (sd(i) * sd(j));
                rho = std::clamp(rho, -1.0, 1.0);
            }
            model.correlation(i, j) = rho;
            model.correlation(j, i) = rho;
        }
    }
    model.cholesky_factor = jittered_cholesky(model.correlation);
    return model;
}

data::ScenarioSet sample(const CopulaModel& model, const Eigen::VectorXd& y, int n,
                         std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    rng::Rng r(rng::mix(seed, 0x636f7075ULL));  // "copu"
    data::ScenarioSet set;
    set.source = data::Source::Copula;
    set.condition = y;
    set.scenarios = Eigen::MatrixXd(n, 96);
    Eigen::VectorXd z(96);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < 96; ++t) z(t) = r.normal();
        Eigen::VectorXd g = model.cholesky_factor * z;
        for (int t = 0; t < 96; ++t) {
            set.scenarios(i, t) = conditional_inverse_cdf(model, t, y, normal_cdf(g(t)));
        }
    }
    return set;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
    // Acklam's rational approximation followed by one Halley refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

nlohmann::json to_json(const CopulaModel& model) {
    return nlohmann::json{{"format", "windcast-copula-v1"},
                          {"levels", util::vec_to_json(model.fan.levels)},
                          {"slopes", util::mat_to_json(model.fan.slopes)},
                          {"intercepts", util::mat_to_json(model.fan.intercepts)},
                          {"correlation", util::mat_to_json(model.correlation)}};
}

CopulaModel from_json(const nlohmann::json& j) {
    CopulaModel model;
    model.fan.levels = util::vec_from_json(j.at("levels"));
    model.fan.slopes = util::mat_from_json(j.at("slopes"));
    model.fan.intercepts = util::mat_from_json(j.at("intercepts"));
    model.correlation = util::mat_from_json(j.at("correlation"));
    model.cholesky_factor = jittered_cholesky(model.correlation);
    return model;
}

void save(const CopulaModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(model).dump(1) << "\n";
}

CopulaModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace windcast::copula
