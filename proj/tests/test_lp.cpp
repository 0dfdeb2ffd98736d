#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "windcast/lp.hpp"
#include "windcast/util/rng.hpp"

using namespace windcast;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

lp::LinearProgram box_lp() {
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Ones(2);
    p.a = MatrixXd::Identity(2, 2);
    p.rel = {lp::Relation::LessEq, lp::Relation::LessEq};
    p.b = VectorXd::Ones(2);
    p.lo = VectorXd::Zero(2);
    p.hi = VectorXd::Constant(2, lp::infinity());
    return p;
}

bool feasible(const lp::LinearProgram& p, const VectorXd& x, double tol = 1e-7) {
    for (int j = 0; j < p.cols(); ++j) {
        if (x(j) < p.lo(j) - 1e-9 || x(j) > p.hi(j) + 1e-9) return false;
    }
    for (int i = 0; i < p.rows(); ++i) {
        const double lhs = p.a.row(i).dot(x);
        switch (p.rel[static_cast<size_t>(i)]) {
            case lp::Relation::LessEq:
                if (lhs > p.b(i) + tol) return false;
                break;
            case lp::Relation::GreaterEq:
                if (lhs < p.b(i) - tol) return false;
                break;
            case lp::Relation::Equal:
                if (std::abs(lhs - p.b(i)) > tol) return false;
                break;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("separable box maximum") {
    auto sol = lp::solve(box_lp());
    CHECK(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sol.x(0) == doctest::Approx(1.0));
    CHECK(sol.x(1) == doctest::Approx(1.0));
}

TEST_CASE("contradictory bounds-as-rows are infeasible") {
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Ones(1);
    p.a = MatrixXd::Ones(2, 1);
    p.rel = {lp::Relation::GreaterEq, lp::Relation::LessEq};
    p.b = VectorXd::Zero(2);
    p.b << 2, 1;
    p.lo = VectorXd::Zero(1);
    p.hi = VectorXd::Constant(1, lp::infinity());
    auto sol = lp::solve(p);
    CHECK(sol.status == lp::Status::Infeasible);
}

TEST_CASE("unbounded ray detected") {
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Ones(1);
    p.a = MatrixXd::Zero(0, 1);
    p.b = VectorXd::Zero(0);
    p.lo = VectorXd::Zero(1);
    p.hi = VectorXd::Constant(1, lp::infinity());
    auto sol = lp::solve(p);
    CHECK(sol.status == lp::Status::Unbounded);
}

TEST_CASE("fix_variables") {
    auto p = box_lp();
    auto fixed = lp::fix_variables(p, {{0, 1.0}});
    auto sol = lp::solve(fixed);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.x(1) == doctest::Approx(1.0));

    auto half = lp::solve(lp::fix_variables(p, {{0, 0.5}}));
    CHECK(half.objective == doctest::Approx(1.5));

    CHECK_THROWS_AS((void)lp::fix_variables(p, {{0, -0.5}}), lp::OutOfBounds);
    CHECK_THROWS_AS((void)lp::fix_variables(p, {{7, 0.0}}), lp::OutOfBounds);
}

TEST_CASE("free and upper-bounded variables") {
    // min x + 2y with x free, y in [-3, 5], x + y >= 4
    lp::LinearProgram p;
    p.sense = lp::Sense::Minimize;
    p.c = VectorXd::Zero(2);
    p.c << 1, 2;
    p.a = MatrixXd::Ones(1, 2);
    p.rel = {lp::Relation::GreaterEq};
    p.b = VectorXd::Constant(1, 4.0);
    p.lo = VectorXd::Zero(2);
    p.hi = VectorXd::Zero(2);
    p.lo << -lp::infinity(), -3;
    p.hi << lp::infinity(), 5;
    auto sol = lp::solve(p);
    CHECK(sol.status == lp::Status::Optimal);
    // optimal: y at its lower bound, x = 7
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.x(1) == doctest::Approx(-3.0));
}

TEST_CASE("200 random LPs match vertex enumeration") {
    rng::Rng r(20240601);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto p = oracles::random_bounded_lp(r);
        auto expect = oracles::vertex_enumeration(p);
        auto sol = lp::solve(p);
        if (!expect) {
            // Random equality rows can make the instance infeasible for the
            // oracle's tolerance; the solver must agree.
            CHECK(sol.status == lp::Status::Infeasible);
            continue;
        }
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == doctest::Approx(*expect).epsilon(1e-7));
        CHECK(feasible(p, sol.x));
        ++solved;
    }
    CHECK(solved > 150);
}

TEST_CASE("duals match finite differences of b") {
    rng::Rng r(777);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto p = oracles::random_bounded_lp(r, 5, 5);
        lp::SolveOptions opt;
        opt.compute_duals = true;
        auto sol = lp::solve(p, opt);
        if (sol.status != lp::Status::Optimal) continue;
        const double h = 1e-6;
        for (int i = 0; i < p.rows(); ++i) {
            auto pp = p;
            pp.b(i) += h;
            auto pm = p;
            pm.b(i) -= h;
            auto sp = lp::solve(pp);
            auto sm = lp::solve(pm);
            if (sp.status != lp::Status::Optimal || sm.status != lp::Status::Optimal) continue;
            const double right = (sp.objective - sol.objective) / h;
            const double left = (sol.objective - sm.objective) / h;
            if (std::abs(right - left) > 1e-4) continue;  // kink: dual not unique
            const double fd = (sp.objective - sm.objective) / (2 * h);
            CHECK(sol.duals(i) == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("Beale cycling instance terminates") {
    lp::LinearProgram p;
    p.sense = lp::Sense::Minimize;
    p.c = VectorXd::Zero(4);
    p.c << -0.75, 150, -0.02, 6;
    p.a = MatrixXd::Zero(3, 4);
    p.a << 0.25, -60, -0.04, 9,
           0.5, -90, -0.02, 3,
           0, 0, 1, 0;
    p.rel = {lp::Relation::LessEq, lp::Relation::LessEq, lp::Relation::LessEq};
    p.b = VectorXd::Zero(3);
    p.b << 0, 0, 1;
    p.lo = VectorXd::Zero(4);
    p.hi = VectorXd::Constant(4, lp::infinity());

    lp::SolveOptions bland;
    bland.pricing = lp::Pricing::Bland;
    auto sol_bland = lp::solve(p, bland);
    CHECK(sol_bland.status == lp::Status::Optimal);
    CHECK(sol_bland.objective == doctest::Approx(-0.05).epsilon(1e-9));

    auto sol_auto = lp::solve(p);
    CHECK(sol_auto.objective == doctest::Approx(-0.05).epsilon(1e-9));

    auto oracle = oracles::vertex_enumeration([&] {
        auto q = p;
        q.hi = VectorXd::Constant(4, 10.0);  // box for the oracle only
        return q;
    }());
    REQUIRE(oracle.has_value());
    CHECK(*oracle == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("degenerate corpus stays within the pivot budget") {
    // Highly degenerate: many redundant rows through the origin.
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Zero(3);
    p.c << 1, 1, 1;
    p.a = MatrixXd::Zero(6, 3);
    p.a << 1, 1, 0,
           1, 0, 1,
           0, 1, 1,
           1, 2, 0,
           2, 1, 0,
           1, 1, 1;
    p.rel.assign(6, lp::Relation::LessEq);
    p.b = VectorXd::Zero(6);
    p.b << 1, 1, 1, 1, 1, 1.5;
    p.lo = VectorXd::Zero(3);
    p.hi = VectorXd::Constant(3, lp::infinity());
    auto sol = lp::solve(p);
    CHECK(sol.status == lp::Status::Optimal);
    CHECK(sol.iterations < 100 * (6 + 3));
    auto oracle = oracles::vertex_enumeration([&] {
        auto q = p;
        q.hi = VectorXd::Constant(3, 5.0);
        return q;
    }());
    CHECK(sol.objective == doctest::Approx(*oracle).epsilon(1e-9));
}

TEST_CASE("re-solve determinism and objective scaling") {
    rng::Rng r(99);
    auto p = oracles::random_bounded_lp(r);
    auto s1 = lp::solve(p);
    auto s2 = lp::solve(p);
    REQUIRE(s1.status == lp::Status::Optimal);
    CHECK(s1.objective == s2.objective);
    CHECK((s1.x - s2.x).cwiseAbs().maxCoeff() == 0.0);

    auto scaled = p;
    scaled.c *= 3.0;
    auto s3 = lp::solve(scaled);
    CHECK(s3.objective == doctest::Approx(3.0 * s1.objective).epsilon(1e-9));
    // previously returned vertex remains feasible and optimal
    CHECK(feasible(scaled, s1.x));
    CHECK(scaled.c.dot(s1.x) == doctest::Approx(s3.objective).epsilon(1e-7));
}

TEST_CASE("basis hint skips phase 1") {
    // max x + y s.t. x + y <= 1, x - y = 0
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Ones(2);
    p.a = MatrixXd::Zero(2, 2);
    p.a << 1, 1, 1, -1;
    p.rel = {lp::Relation::LessEq, lp::Relation::Equal};
    p.b = VectorXd::Zero(2);
    p.b << 1, 0;
    p.lo = VectorXd::Zero(2);
    p.hi = VectorXd::Constant(2, lp::infinity());

    lp::SolveOptions opt;
    opt.basis_hint = {lp::slack_of_row(0), 0};
    opt.compute_duals = true;
    auto sol = lp::solve(p, opt);
    CHECK(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(1.0));

    // a nonsense hint must fall back to phase 1, not fail
    lp::SolveOptions bad;
    bad.basis_hint = {0, 0};
    auto sol2 = lp::solve(p, bad);
    CHECK(sol2.objective == doctest::Approx(1.0));
}

TEST_CASE("iteration limit reports IterationLimit") {
    auto p = box_lp();
    lp::SolveOptions opt;
    opt.max_iterations = 1;
    CHECK_THROWS_AS((void)lp::solve(p, opt), lp::IterationLimit);
}

TEST_CASE("dump golden format") {
    lp::LinearProgram p;
    p.sense = lp::Sense::Maximize;
    p.c = VectorXd::Zero(2);
    p.c << 1, 2.5;
    p.a = MatrixXd::Zero(2, 2);
    p.a << 1, 0, 1, 1;
    p.rel = {lp::Relation::LessEq, lp::Relation::Equal};
    p.b = VectorXd::Zero(2);
    p.b << 4, 1;
    p.lo = VectorXd::Zero(2);
    p.hi = VectorXd::Zero(2);
    p.lo << 0, -lp::infinity();
    p.hi << lp::infinity(), 3;
    const std::string expected =
        "sense max\n"
        "obj 1 2.5\n"
        "row <= 4 : 1 0\n"
        "row = 1 : 1 1\n"
        "bounds\n"
        "0 inf\n"
        "-inf 3\n";
    CHECK(lp::dump(p) == expected);
}

}  // TEST_SUITE
