#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "windcast/data.hpp"
#include "windcast/metrics.hpp"
#include "windcast/util/rng.hpp"

using namespace windcast;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// naive windowed DFT periodogram, independent of the FFT implementation
Eigen::VectorXd dft_psd(const VectorXd& segment) {
    const int l = static_cast<int>(segment.size());
    VectorXd window(l);
    for (int i = 0; i < l; ++i) window(i) = 0.5 * (1 - std::cos(2 * M_PI * i / l));
    const double u = window.squaredNorm();
    VectorXd power(l / 2 + 1);
    for (int k = 0; k <= l / 2; ++k) {
        std::complex<double> acc(0, 0);
        for (int n = 0; n < l; ++n) {
            const double ang = -2 * M_PI * k * n / l;
            acc += segment(n) * window(n) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        const double one_sided = (k == 0 || k == l / 2) ? 1.0 : 2.0;
        power(k) = one_sided * std::norm(acc) / u;
    }
    return power;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("kde: degenerate data, closed form, unit mass") {
    CHECK_THROWS_AS((void)metrics::kde_pdf({0.0, 0.0}, VectorXd::Zero(1)),
                    metrics::DegenerateData);
    CHECK_THROWS_AS((void)metrics::kde_pdf({1.0}, VectorXd::Zero(1)), metrics::DegenerateData);

    // two samples {0, 1} evaluated at 0
    const double sd = std::sqrt(0.5);
    const double iqr = 0.5;  // type-7 quantiles of {0,1}
    const double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(2.0, -0.2);
    const double expected =
        (1.0 / (2 * h * std::sqrt(2 * M_PI))) * (1.0 + std::exp(-0.5 / (h * h)));
    VectorXd at = VectorXd::Zero(1);
    CHECK(metrics::kde_pdf({0.0, 1.0}, at)(0) == doctest::Approx(expected).epsilon(1e-12));

    rng::Rng r(31);
    std::vector<double> sample;
    for (int i = 0; i < 400; ++i) sample.push_back(r.normal(0.3, 1.7));
    auto curve = metrics::kde_curve(sample);
    double integral = 0;
    for (int i = 1; i < curve.grid.size(); ++i) {
        integral += 0.5 * (curve.density(i) + curve.density(i - 1)) *
                    (curve.grid(i) - curve.grid(i - 1));
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("qq points") {
    std::vector<double> a;
    for (int i = 0; i <= 10; ++i) a.push_back(i / 10.0);
    std::vector<double> levels{0.1, 0.25, 0.5, 0.9};
    auto same = metrics::qq_points(a, a, levels);
    for (const auto& [qa, qb] : same) CHECK(qa == doctest::Approx(qb).epsilon(1e-15));

    std::vector<double> b;
    for (const double v : a) b.push_back(v + 0.1);
    auto shifted = metrics::qq_points(a, b, levels);
    for (const auto& [qa, qb] : shifted) CHECK(qb - qa == doctest::Approx(0.1).epsilon(1e-12));

    auto mid = metrics::qq_points(a, a, {0.5});
    CHECK(mid[0].first == doctest::Approx(0.5));
}

TEST_CASE("welch psd: DC concentration, tone at a bin, Parseval") {
    // constant series: everything inside the DC main lobe (bins 0 and 1)
    auto flat = metrics::welch_psd(VectorXd::Constant(96, 0.7), 32, 0.5);
    CHECK(flat.power.size() == 17);
    CHECK(flat.frequencies(0) == 0.0);
    CHECK(flat.frequencies(16) == doctest::Approx(0.5));
    const double flat_total = flat.power.sum();
    CHECK(flat.power.head(2).sum() / flat_total > 1.0 - 1e-12);
    CHECK(flat.power(0) > flat.power(1));

    // unit sine at an exact segment bin (freq 4/32): main lobe >= 95%
    VectorXd tone(96);
    for (int n = 0; n < 96; ++n) tone(n) = std::sin(2 * M_PI * 4.0 * n / 32.0);
    auto est = metrics::welch_psd(tone, 32, 0.5);
    const double lobe = est.power(3) + est.power(4) + est.power(5);
    CHECK(lobe / est.power.sum() >= 0.95);
    CHECK(est.power(4) > est.power(3));
    CHECK(est.power(4) > est.power(5));

    // cross-check the whole estimate against a naive DFT on one segment
    auto one_seg = metrics::welch_psd(tone.head(32), 32, 0.5);
    auto oracle = dft_psd(tone.head(32));
    CHECK((one_seg.power - oracle).cwiseAbs().maxCoeff() < 1e-10);

    // Parseval: integrated PSD matches the variance of white noise
    rng::Rng r(32);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd noise(4096);
        for (int i = 0; i < noise.size(); ++i) noise(i) = r.normal();
        auto psd = metrics::welch_psd(noise, 64, 0.5);
        const double integral = psd.power.sum() / 64.0;
        const double variance = (noise.array() - noise.mean()).square().sum() / noise.size();
        worst = std::max(worst, std::abs(integral - variance) / variance);
    }
    CHECK(worst < 0.05);

    CHECK_THROWS_AS((void)metrics::welch_psd(VectorXd::Zero(16), 32, 0.5), metrics::TooShort);
    CHECK_THROWS_AS((void)metrics::welch_psd(VectorXd::Zero(96), 33, 0.5), std::invalid_argument);
}

TEST_CASE("energy score hand values") {
    VectorXd x = VectorXd::Zero(2);
    MatrixXd scen(2, 2);
    scen << 1, 0, 0, 1;
    CHECK(metrics::energy_score(x, scen) ==
          doctest::Approx(1.0 - std::sqrt(2.0) / 4.0).epsilon(1e-12));

    MatrixXd self = x.transpose();
    CHECK(metrics::energy_score(x, self) == 0.0);

    MatrixXd one(1, 2);
    one << 3, 4;
    CHECK(metrics::energy_score(x, one) == doctest::Approx(5.0));
    CHECK(metrics::energy_score(x, one) > 0.0);

    MatrixXd wrong(1, 3);
    wrong.setZero();
    CHECK_THROWS_AS((void)metrics::energy_score(x, wrong), metrics::DimensionMismatch);
}

TEST_CASE("energy score is translation invariant") {
    rng::Rng r(33);
    for (int trial = 0; trial < 25; ++trial) {
        VectorXd x(5);
        MatrixXd scen(4, 5);
        for (int i = 0; i < 5; ++i) x(i) = r.normal();
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 5; ++j) scen(i, j) = r.normal();
        }
        VectorXd shift = VectorXd::Constant(5, r.uniform(-3, 3));
        const double base = metrics::energy_score(x, scen);
        const double moved =
            metrics::energy_score(x + shift, scen + shift.transpose().replicate(4, 1));
        CHECK(std::abs(base - moved) < 1e-10);
    }
}

TEST_CASE("quantile trajectories") {
    data::SynthConfig config;
    config.n_days = 2;
    config.seed = 77;
    auto two = data::synthesize(config);
    auto curves = metrics::quantile_trajectories(two, data::Split::Train, {0.0, 1.0});
    for (int t = 0; t < 96; ++t) {
        CHECK(curves(t, 0) ==
              doctest::Approx(std::min(two.days[0].capacity(t), two.days[1].capacity(t))));
        CHECK(curves(t, 1) ==
              doctest::Approx(std::max(two.days[0].capacity(t), two.days[1].capacity(t))));
    }

    data::Dataset single;
    single.days.push_back(two.days[0]);
    single.split.push_back(data::Split::Train);
    auto one = metrics::quantile_trajectories(single, data::Split::Train, {0.0, 0.5, 1.0});
    for (int t = 0; t < 96; ++t) {
        for (int l = 0; l < 3; ++l) CHECK(one(t, l) == doctest::Approx(two.days[0].capacity(t)));
    }

    data::Dataset flat = single;
    flat.days[0].capacity.setConstant(0.4);
    auto c = metrics::quantile_trajectories(flat, data::Split::Train, {0.25, 0.75});
    CHECK((c.array() - 0.4).abs().maxCoeff() < 1e-15);
}

TEST_CASE("stability stats") {
    auto cell = metrics::stability_stats({{5.0, 5.0, 5.0}, {1.0, 1.0}});
    CHECK(cell.avg_std == 0.0);
    CHECK(cell.avg_spread == 0.0);

    auto two = metrics::stability_stats({{0.0, 2.0}});
    CHECK(two.avg_std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(two.avg_spread == doctest::Approx(2.0));

    auto fwd = metrics::stability_stats({{3.0, 1.0, 2.0}, {9.0, 7.0}});
    auto perm = metrics::stability_stats({{1.0, 2.0, 3.0}, {7.0, 9.0}});
    CHECK(fwd.avg_std == doctest::Approx(perm.avg_std).epsilon(1e-15));
    CHECK(fwd.avg_spread == doctest::Approx(perm.avg_spread).epsilon(1e-15));
    CHECK(fwd.avg_spread >= 0.0);
    CHECK(fwd.avg_std >= 0.0);

    CHECK_THROWS_AS((void)metrics::stability_stats({{1.0}}), metrics::TooFewInstances);
    CHECK_THROWS_AS((void)metrics::stability_stats({}), metrics::TooFewInstances);
}

}  // TEST_SUITE
