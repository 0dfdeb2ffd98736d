#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "windcast/lp.hpp"
#include "windcast/util/rng.hpp"

namespace oracles {

// Brute-force LP oracle: enumerates every candidate vertex as the
// intersection of n active constraints drawn from the rows (taken as
// equalities) and the variable bounds, keeps feasible ones, and returns the
// best objective. Only valid for small LPs with finite bound boxes.
inline std::optional<double> vertex_enumeration(const windcast::lp::LinearProgram& lp) {
    using windcast::lp::Relation;
    using windcast::lp::Sense;
    const int n = lp.cols();
    const int m = lp.rows();

    struct Plane {
        Eigen::VectorXd a;
        double b;
    };
    std::vector<Plane> planes;
    for (int i = 0; i < m; ++i) planes.push_back({lp.a.row(i).transpose(), lp.b(i)});
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
        planes.push_back({e, lp.lo(j)});
        planes.push_back({e, lp.hi(j)});
    }
    const int total = static_cast<int>(planes.size());

    std::optional<double> best;
    std::vector<int> pick(static_cast<size_t>(n));
    // iterate over all n-combinations of planes
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    const double tol = 1e-7;
    for (;;) {
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd rhs(n);
        for (int k = 0; k < n; ++k) {
            M.row(k) = planes[static_cast<size_t>(idx[static_cast<size_t>(k)])].a.transpose();
            rhs(k) = planes[static_cast<size_t>(idx[static_cast<size_t>(k)])].b;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.isInvertible()) {
            Eigen::VectorXd x = lu.solve(rhs);
            bool feasible = true;
            for (int j = 0; j < n && feasible; ++j) {
                if (x(j) < lp.lo(j) - tol || x(j) > lp.hi(j) + tol) feasible = false;
            }
            for (int i = 0; i < m && feasible; ++i) {
                const double lhs = lp.a.row(i).dot(x);
                switch (lp.rel[static_cast<size_t>(i)]) {
                    case Relation::LessEq:
                        if (lhs > lp.b(i) + tol) feasible = false;
                        break;
                    case Relation::GreaterEq:
                        if (lhs < lp.b(i) - tol) feasible = false;
                        break;
                    case Relation::Equal:
                        if (std::abs(lhs - lp.b(i)) > tol) feasible = false;
                        break;
                }
            }
            if (feasible) {
                const double obj = lp.c.dot(x);
                if (!best) {
                    best = obj;
                } else if (lp.sense == Sense::Maximize) {
                    best = std::max(*best, obj);
                } else {
                    best = std::min(*best, obj);
                }
            }
        }
        // next combination
        int k = n - 1;
        while (k >= 0 && idx[static_cast<size_t>(k)] == total - n + k) --k;
        if (k < 0) break;
        ++idx[static_cast<size_t>(k)];
        for (int j = k + 1; j < n; ++j) {
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
        }
    }
    return best;
}

// Random bounded LP with a guaranteed feasible point.
inline windcast::lp::LinearProgram random_bounded_lp(windcast::rng::Rng& rng, int max_vars = 6,
                                                     int max_rows = 8) {
    using namespace windcast::lp;
    const int n = 2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_vars - 1)));
    const int m = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_rows)));
    LinearProgram lp;
    lp.sense = rng.uniform01() < 0.5 ? Sense::Maximize : Sense::Minimize;
    lp.c = Eigen::VectorXd::Zero(n);
    lp.lo = Eigen::VectorXd::Zero(n);
    lp.hi = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        lp.c(j) = rng.uniform(-2, 2);
        lp.lo(j) = rng.uniform(-1, 0.5);
        lp.hi(j) = lp.lo(j) + rng.uniform(0.2, 2.0);
    }
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = rng.uniform(lp.lo(j), lp.hi(j));
    lp.a = Eigen::MatrixXd::Zero(m, n);
    lp.b = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) lp.a(i, j) = rng.uniform(-1, 1);
        const double ax = lp.a.row(i).dot(x0);
        const double u = rng.uniform01();
        if (u < 0.4) {
            lp.rel.push_back(Relation::LessEq);
            lp.b(i) = ax + rng.uniform(0, 1);
        } else if (u < 0.8) {
            lp.rel.push_back(Relation::GreaterEq);
            lp.b(i) = ax - rng.uniform(0, 1);
        } else {
            lp.rel.push_back(Relation::Equal);
            lp.b(i) = ax;
        }
    }
    return lp;
}

}  // namespace oracles
