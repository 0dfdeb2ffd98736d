#include "windcast/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "windcast/util/json_eigen.hpp"

namespace windcast::pca {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
// in `eig` and eigenvectors as columns of `vecs`.
void jacobi_eigen(Eigen::MatrixXd s, Eigen::VectorXd& eig, Eigen::MatrixXd& vecs) {
    const int n = static_cast<int>(s.rows());
    vecs = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        }
        if (std::sqrt(off) < 1e-14 * scale * n) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - sn * vkq;
                    vecs(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    eig = s.diagonal();
}

}  // namespace

PcaModel fit(const Eigen::MatrixXd& x, double evr_target) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n < 2) throw std::invalid_argument("pca::fit needs at least 2 rows");
    if (!(evr_target > 0.0 && evr_target <= 1.0)) {
        throw std::invalid_argument("evr_target must lie in (0, 1]");
    }
    if (!x.allFinite()) throw std::invalid_argument("pca::fit: non-finite input");

    PcaModel model;
    model.mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::VectorXd eig;
    Eigen::MatrixXd vecs;
    jacobi_eigen(cov, eig, vecs);

    std::vector<int> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return eig(a) > eig(b); });

    const double total = std::max(eig.sum(), 0.0);
    if (total <= 0.0 || eig(order[0]) <= 0.0) {
        throw RankDeficient("pca::fit: input has zero total variance");
    }
    const double lead = eig(order[0]);

    // Numerical rank: eigenvalues below round-off relative to the leading one
    // do not count toward the component budget.
    int rank = 0;
    double cum = 0;
    std::vector<double> evr;
    for (int i = 0; i < d; ++i) {
        const double lambda = std::max(eig(order[static_cast<size_t>(i)]), 0.0);
        if (lambda <= 1e-12 * lead) break;
        ++rank;
        evr.push_back(lambda / total);
    }
    int k = rank;
    cum = 0;
    for (int i = 0; i < rank; ++i) {
        cum += evr[static_cast<size_t>(i)];
        if (cum >= evr_target - 1e-12) {
            k = i + 1;
            break;
        }
    }

    model.components = Eigen::MatrixXd(k, d);
    model.singular_values = Eigen::VectorXd(k);
    model.explained_variance_ratio = Eigen::VectorXd(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd comp = vecs.col(order[static_cast<size_t>(i)]);
        int arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp(arg) < 0) comp = -comp;
        model.components.row(i) = comp.transpose();
        const double lambda = std::max(eig(order[static_cast<size_t>(i)]), 0.0);
        model.singular_values(i) = std::sqrt(lambda * (n - 1));
        model.explained_variance_ratio(i) = lambda / total;
    }
    return model;
}

Eigen::VectorXd transform(const PcaModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.mean.size()) {
        throw DimensionMismatch("pca::transform: expected length " +
                                std::to_string(model.mean.size()));
    }
    return model.components * (x - model.mean);
}

Eigen::VectorXd inverse_transform(const PcaModel& model, const Eigen::VectorXd& u) {
    if (u.size() != model.components.rows()) {
        throw DimensionMismatch("pca::inverse_transform: expected length " +
                                std::to_string(model.components.rows()));
    }
    return model.mean + model.components.transpose() * u;
}

PcaModel identity(int dim) {
    PcaModel m;
    m.mean = Eigen::VectorXd::Zero(dim);
    m.components = Eigen::MatrixXd::Identity(dim, dim);
    m.singular_values = Eigen::VectorXd::Ones(dim);
    m.explained_variance_ratio = Eigen::VectorXd::Constant(dim, 1.0 / dim);
    return m;
}

nlohmann::json to_json(const PcaModel& model) {
    return nlohmann::json{
        {"mean", util::vec_to_json(model.mean)},
        {"components", util::mat_to_json(model.components)},
        {"singular_values", util::vec_to_json(model.singular_values)},
        {"explained_variance_ratio", util::vec_to_json(model.explained_variance_ratio)},
    };
}

PcaModel from_json(const nlohmann::json& j) {
    PcaModel m;
    m.mean = util::vec_from_json(j.at("mean"));
    m.components = util::mat_from_json(j.at("components"));
    m.singular_values = util::vec_from_json(j.at("singular_values"));
    m.explained_variance_ratio = util::vec_from_json(j.at("explained_variance_ratio"));
    return m;
}

}  // namespace windcast::pca
