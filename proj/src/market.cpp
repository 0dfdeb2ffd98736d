#include "windcast/market.hpp"

#include <algorithm>
#include <cmath>

namespace windcast::market {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// hourly available energy per scenario, MWh
MatrixXd hourly_energy(const MarketInstance& inst) {
    const int ns = inst.n_scenarios();
    MatrixXd e = MatrixXd::Zero(ns, 24);
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < 24; ++t) {
            double acc = 0;
            for (int q = 0; q < 4; ++q) acc += inst.production_mw(s, 4 * t + q);
            e(s, t) = acc * inst.params.production_interval_h;
        }
    }
    return e;
}

VectorXd penalty_weights(const MarketInstance& inst) {
    return inst.params.penalty_factor * inst.prices.cwiseAbs();
}

// --- hourly second-stage subproblem ------------------------------------
//
// For fixed bids the recourse decomposes per scenario. Working in hourly
// energies (charge c_t, discharge d_t in MWh grid-side) is exact: within an
// hour the rates are constant, so quarter-level SOC bounds reduce to the
// hourly endpoints.
//
// variables: shr(0..23), c(24..47), d(48..71), soc(72..95)
// rows:      balance(0..23), terminal(24), short(25..48)

struct SubLayout {
    static int shr(int t) { return t; }
    static int charge(int t) { return 24 + t; }
    static int discharge(int t) { return 48 + t; }
    static int soc(int t) { return 72 + t; }
    static int balance_row(int t) { return t; }
    static int terminal_row() { return 24; }
    static int short_row(int t) { return 25 + t; }
};

lp::LinearProgram build_subproblem(const MarketParams& p, const VectorXd& weights,
                                   const VectorXd& b) {
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Minimize;
    const int nv = 96;
    const int nr = 49;
    prog.c = VectorXd::Zero(nv);
    for (int t = 0; t < 24; ++t) prog.c(SubLayout::shr(t)) = weights(t);
    prog.a = MatrixXd::Zero(nr, nv);
    prog.b = VectorXd::Zero(nr);
    prog.rel.assign(nr, lp::Relation::Equal);
    const double eta = p.efficiency;
    const double e_max = p.max_charge_mw * p.trading_interval_h;
    for (int t = 0; t < 24; ++t) {
        const int r = SubLayout::balance_row(t);
        prog.a(r, SubLayout::soc(t)) = 1;
        if (t > 0) prog.a(r, SubLayout::soc(t - 1)) = -1;
        prog.a(r, SubLayout::charge(t)) = -eta;
        prog.a(r, SubLayout::discharge(t)) = 1.0 / eta;
        prog.b(r) = t == 0 ? p.soc_initial_mwh : 0.0;
    }
    prog.a(SubLayout::terminal_row(), SubLayout::soc(23)) = 1;
    prog.b(SubLayout::terminal_row()) = p.soc_initial_mwh;
    for (int t = 0; t < 24; ++t) {
        const int r = SubLayout::short_row(t);
        prog.rel[static_cast<size_t>(r)] = lp::Relation::GreaterEq;
        prog.a(r, SubLayout::shr(t)) = 1;
        prog.a(r, SubLayout::discharge(t)) = 1;
        prog.a(r, SubLayout::charge(t)) = -1;
        prog.b(r) = b(t);
    }
    prog.lo = VectorXd::Zero(nv);
    prog.hi = VectorXd::Constant(nv, lp::infinity());
    for (int t = 0; t < 24; ++t) {
        prog.hi(SubLayout::charge(t)) = e_max;
        prog.hi(SubLayout::discharge(t)) = e_max;
        prog.hi(SubLayout::soc(t)) = p.soc_max_mwh;
    }
    return prog;
}

std::vector<int> subproblem_basis(const VectorXd& b) {
    std::vector<int> basis;
    basis.reserve(49);
    for (int t = 0; t < 24; ++t) basis.push_back(SubLayout::soc(t));
    basis.push_back(SubLayout::charge(0));
    for (int t = 0; t < 24; ++t) {
        basis.push_back(b(t) > 0 ? SubLayout::shr(t)
                                 : lp::slack_of_row(SubLayout::short_row(t)));
    }
    return basis;
}

struct SubSolution {
    double cost = 0;
    VectorXd shr, charge, discharge, soc;  // hourly
    VectorXd duals;                        // of the shortfall rows
};

SubSolution solve_subproblem(const MarketParams& p, const VectorXd& weights, const VectorXd& b,
                             bool want_duals, bool cleanup) {
    lp::LinearProgram prog = build_subproblem(p, weights, b);
    lp::SolveOptions opt;
    opt.basis_hint = subproblem_basis(b);
    opt.compute_duals = want_duals;
    auto sol = lp::solve(prog, opt);
    if (sol.status != lp::Status::Optimal) {
        throw std::runtime_error("second-stage subproblem not optimal");
    }

    if (cleanup) {
        // Secondary objective at fixed cost: minimal storage throughput.
        // This removes simultaneous charge/discharge from the reported
        // schedule (it never improves the optimum).
        lp::LinearProgram clean = prog;
        clean.c = VectorXd::Zero(96);
        for (int t = 0; t < 24; ++t) {
            clean.c(SubLayout::charge(t)) = 1;
            clean.c(SubLayout::discharge(t)) = 1;
        }
        const int nr = clean.rows();
        clean.a.conservativeResize(nr + 1, Eigen::NoChange);
        clean.a.row(nr).setZero();
        for (int t = 0; t < 24; ++t) clean.a(nr, SubLayout::shr(t)) = weights(t);
        clean.b.conservativeResize(nr + 1);
        clean.b(nr) = sol.objective + 1e-9 * std::max(1.0, std::abs(sol.objective));
        clean.rel.push_back(lp::Relation::LessEq);
        auto cs = lp::solve(clean);
        if (cs.status == lp::Status::Optimal) sol.x = cs.x;
    }

    SubSolution out;
    out.cost = sol.objective;
    out.shr = sol.x.segment(0, 24);
    out.charge = sol.x.segment(24, 24);
    out.discharge = sol.x.segment(48, 24);
    out.soc = sol.x.segment(72, 24);
    if (want_duals) {
        out.duals = VectorXd(24);
        for (int t = 0; t < 24; ++t) out.duals(t) = sol.duals(SubLayout::short_row(t));
    }
    return out;
}

// --- full deterministic equivalents -------------------------------------

lp::LinearProgram build_reduced_wp(const MarketInstance& inst) {
    const int ns = inst.n_scenarios();
    const MarketParams& p = inst.params;
    const MatrixXd energy = hourly_energy(inst);
    const VectorXd w = penalty_weights(inst);
    const double pi = 1.0 / ns;
    const double eta = p.efficiency;
    const double e_max = p.max_charge_mw * p.trading_interval_h;
    const double dh = p.trading_interval_h;

    const int nv = 24 + ns * 96;
    const int nr = ns * 49;
    auto shr = [&](int s, int t) { return 24 + s * 96 + t; };
    auto charge = [&](int s, int t) { return 24 + s * 96 + 24 + t; };
    auto discharge = [&](int s, int t) { return 24 + s * 96 + 48 + t; };
    auto soc = [&](int s, int t) { return 24 + s * 96 + 72 + t; };

    lp::LinearProgram prog;
    prog.sense = lp::Sense::Maximize;
    prog.c = VectorXd::Zero(nv);
    for (int t = 0; t < 24; ++t) prog.c(t) = inst.prices(t) * dh;
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < 24; ++t) prog.c(shr(s, t)) = -w(t) * pi;
    }
    prog.a = MatrixXd::Zero(nr, nv);
    prog.b = VectorXd::Zero(nr);
    prog.rel.assign(static_cast<size_t>(nr), lp::Relation::Equal);
    for (int s = 0; s < ns; ++s) {
        const int rb = s * 49;
        for (int t = 0; t < 24; ++t) {
            prog.a(rb + t, soc(s, t)) = 1;
            if (t > 0) prog.a(rb + t, soc(s, t - 1)) = -1;
            prog.a(rb + t, charge(s, t)) = -eta;
            prog.a(rb + t, discharge(s, t)) = 1.0 / eta;
            prog.b(rb + t) = t == 0 ? p.soc_initial_mwh : 0.0;
        }
        prog.a(rb + 24, soc(s, 23)) = 1;
        prog.b(rb + 24) = p.soc_initial_mwh;
        for (int t = 0; t < 24; ++t) {
            const int r = rb + 25 + t;
            prog.rel[static_cast<size_t>(r)] = lp::Relation::GreaterEq;
            prog.a(r, shr(s, t)) = 1;
            prog.a(r, WpLayout::bid(t)) = -dh;
            prog.a(r, discharge(s, t)) = 1;
            prog.a(r, charge(s, t)) = -1;
            prog.b(r) = -energy(s, t);
        }
    }
    prog.lo = VectorXd::Zero(nv);
    prog.hi = VectorXd::Constant(nv, lp::infinity());
    for (int t = 0; t < 24; ++t) prog.hi(t) = p.max_bid_mw;
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < 24; ++t) {
            prog.hi(charge(s, t)) = e_max;
            prog.hi(discharge(s, t)) = e_max;
            prog.hi(soc(s, t)) = p.soc_max_mwh;
        }
    }
    return prog;
}

std::vector<int> reduced_crash_basis(const MarketInstance& inst) {
    const int ns = inst.n_scenarios();
    std::vector<int> basis;
    basis.reserve(static_cast<size_t>(ns) * 49);
    auto charge = [&](int s, int t) { return 24 + s * 96 + 24 + t; };
    auto soc = [&](int s, int t) { return 24 + s * 96 + 72 + t; };
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < 24; ++t) basis.push_back(soc(s, t));
        basis.push_back(charge(s, 0));
        for (int t = 0; t < 24; ++t) basis.push_back(lp::slack_of_row(s * 49 + 25 + t));
    }
    return basis;
}

BiddingSolution assemble_solution(const MarketInstance& inst, const VectorXd& bids) {
    const int ns = inst.n_scenarios();
    const MarketParams& p = inst.params;
    const MatrixXd energy = hourly_energy(inst);
    const VectorXd w = penalty_weights(inst);
    const double dh = p.trading_interval_h;
    const double pi = 1.0 / ns;

    BiddingSolution out;
    out.bids = bids;
    out.shortfall = MatrixXd::Zero(ns, 24);
    out.charge_mw = MatrixXd::Zero(ns, 96);
    out.discharge_mw = MatrixXd::Zero(ns, 96);
    out.soc_mwh = MatrixXd::Zero(ns, 96);

    double objective = inst.prices.dot(bids) * dh;
    for (int s = 0; s < ns; ++s) {
        VectorXd b(24);
        for (int t = 0; t < 24; ++t) b(t) = dh * bids(t) - energy(s, t);
        SubSolution sub = solve_subproblem(p, w, b, false, true);
        objective -= pi * sub.cost;
        out.shortfall.row(s) = sub.shr.transpose();
        double soc_prev = p.soc_initial_mwh;
        for (int t = 0; t < 24; ++t) {
            const double in_rate = sub.charge(t) / dh;
            const double out_rate = sub.discharge(t) / dh;
            const double step = (p.efficiency * sub.charge(t) -
                                 sub.discharge(t) / p.efficiency) / 4.0;
            for (int q = 0; q < 4; ++q) {
                out.charge_mw(s, 4 * t + q) = in_rate;
                out.discharge_mw(s, 4 * t + q) = out_rate;
                out.soc_mwh(s, 4 * t + q) = soc_prev + step * (q + 1);
            }
            soc_prev = out.soc_mwh(s, 4 * t + 3);
        }
    }
    out.expected_objective = objective;

    const double violation = audit(inst, out);
    if (violation > 1e-7) {
        throw AuditFailure("assembled bidding solution violates constraints by " +
                           std::to_string(violation));
    }
    return out;
}

VectorXd solve_bids_benders(const MarketInstance& inst, const WpSolveOptions& options,
                            bool& converged, int& iterations_used) {
    const int ns = inst.n_scenarios();
    const MarketParams& p = inst.params;
    const MatrixXd energy = hourly_energy(inst);
    const VectorXd w = penalty_weights(inst);
    const double dh = p.trading_interval_h;
    const double pi = 1.0 / ns;
    const int groups = std::max(1, std::min(options.benders_groups, ns));

    // theta_g >= -(worst possible penalty) is a safe finite bound
    const double theta_lo = -(w.sum() * dh * p.max_bid_mw + 1.0);

    struct Cut {
        int group;
        VectorXd coef;  // 24
        double constant;
        double slack = 0;  // at the latest master optimum
    };
    std::vector<Cut> cuts;
    // masters are re-solved from scratch, so the active cut pool is capped;
    // cuts loose at the latest master optimum are dropped oldest-first
    const size_t max_cuts = static_cast<size_t>(12 * groups + 48);

    VectorXd beta(24);
    for (int t = 0; t < 24; ++t) beta(t) = inst.prices(t) > 0 ? p.max_bid_mw : 0.0;

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    VectorXd best_beta = beta;
    VectorXd query = beta;
    converged = false;

    for (int iter = 0; iter < options.benders_max_iterations; ++iter) {
        iterations_used = iter + 1;
        // evaluate second stage at the query point, collect cuts
        std::vector<VectorXd> cut_coef(static_cast<size_t>(groups), VectorXd::Zero(24));
        std::vector<double> cut_const(static_cast<size_t>(groups), 0.0);
        double recourse = 0;
        for (int s = 0; s < ns; ++s) {
            VectorXd b(24);
            for (int t = 0; t < 24; ++t) b(t) = dh * query(t) - energy(s, t);
            SubSolution sub = solve_subproblem(p, w, b, true, false);
            recourse += pi * sub.cost;
            const int g = s % groups;
            // -C_s(b(beta')) <= -C_s + y . (b - b') with b linear in beta
            cut_coef[static_cast<size_t>(g)] += pi * dh * sub.duals;
            cut_const[static_cast<size_t>(g)] +=
                pi * (-sub.cost + dh * sub.duals.dot(query));
        }
        const double f = inst.prices.dot(query) * dh - recourse;
        if (f > lb) {
            lb = f;
            best_beta = query;
        }
        for (int g = 0; g < groups; ++g) {
            cuts.push_back(
                {g, cut_coef[static_cast<size_t>(g)], cut_const[static_cast<size_t>(g)], 0.0});
        }
        if (cuts.size() > max_cuts) {
            std::stable_sort(cuts.begin(), cuts.end(),
                             [](const Cut& a, const Cut& b) { return a.slack < b.slack; });
            cuts.resize(max_cuts);
        }

        // master: max revenue + sum theta_g subject to the cuts
        const int nv = 24 + groups;
        const int nr = static_cast<int>(cuts.size());
        lp::LinearProgram master;
        master.sense = lp::Sense::Maximize;
        master.c = VectorXd::Zero(nv);
        for (int t = 0; t < 24; ++t) master.c(t) = inst.prices(t) * dh;
        for (int g = 0; g < groups; ++g) master.c(24 + g) = 1.0;
        master.a = MatrixXd::Zero(nr, nv);
        master.b = VectorXd::Zero(nr);
        master.rel.assign(static_cast<size_t>(nr), lp::Relation::LessEq);
        for (int i = 0; i < nr; ++i) {
            master.a(i, 24 + cuts[static_cast<size_t>(i)].group) = 1.0;
            master.a.row(i).head(24) += cuts[static_cast<size_t>(i)].coef.transpose();
            master.b(i) = cuts[static_cast<size_t>(i)].constant;
        }
        master.lo = VectorXd::Zero(nv);
        master.hi = VectorXd::Constant(nv, lp::infinity());
        for (int t = 0; t < 24; ++t) master.hi(t) = p.max_bid_mw;
        for (int g = 0; g < groups; ++g) {
            master.lo(24 + g) = theta_lo;
            master.hi(24 + g) = 0.0;
        }
        auto msol = lp::solve(master);
        if (msol.status != lp::Status::Optimal) {
            throw std::runtime_error("Benders master failed to solve");
        }
        for (size_t i = 0; i < cuts.size(); ++i) {
            Cut& cut = cuts[i];
            cut.slack = master.b(static_cast<int>(i)) - msol.x(24 + cut.group) -
                        cut.coef.dot(msol.x.head(24));
        }
        ub = msol.objective;
        if (ub - lb <= options.tolerance * std::max({1.0, std::abs(ub), std::abs(lb)})) {
            converged = true;
            return best_beta;
        }
        beta = msol.x.head(24);
        // in-out stabilization: query between the incumbent and the master
        // optimum; lean further toward the master as the gap closes
        const double gap = ub - lb;
        const double rel_gap = gap / std::max(1.0, std::abs(ub));
        const double lean = rel_gap > 1e-3 ? 0.5 : 0.9;
        query = (1.0 - lean) * best_beta + lean * beta;
    }
    return best_beta;
}

}  // namespace

void MarketParams::validate() const {
    if (trading_interval_h <= 0 || production_interval_h <= 0 || penalty_factor < 0 ||
        max_bid_mw <= 0 || max_charge_mw <= 0 || soc_max_mwh <= 0) {
        throw InvalidInstance("market parameters must be positive");
    }
    if (!(efficiency > 0 && efficiency <= 1)) {
        throw InvalidInstance("efficiency must lie in (0, 1]");
    }
    if (n_hours != 24) throw InvalidInstance("the bidding horizon is fixed at 24 hours");
    if (soc_initial_mwh < 0 || soc_initial_mwh > soc_max_mwh) {
        throw InvalidInstance("initial state of charge outside the storage bounds");
    }
}

void MarketInstance::validate() const {
    params.validate();
    if (prices.size() != 24) throw InvalidInstance("prices must have 24 entries");
    if (!prices.allFinite()) throw InvalidInstance("non-finite price");
    if (scenarios.count() < 1) throw InvalidInstance("need at least one scenario");
    if (scenarios.scenarios.cols() != 96) throw InvalidInstance("scenarios must have 96 columns");
    const double lo = scenarios.scenarios.minCoeff();
    const double hi = scenarios.scenarios.maxCoeff();
    if (lo < -1e-9 || hi > 1 + 1e-9) {
        throw InvalidInstance("capacity factors must lie in [0, 1]");
    }
}

WpLayout wp_layout(const MarketInstance& instance) {
    WpLayout layout;
    layout.n_scenarios = instance.n_scenarios();
    return layout;
}

lp::LinearProgram build_wp(const MarketInstance& inst) {
    inst.validate();
    const int ns = inst.n_scenarios();
    const MarketParams& p = inst.params;
    const WpLayout L = wp_layout(inst);
    const VectorXd w = penalty_weights(inst);
    const double pi = 1.0 / ns;
    const double dq = p.production_interval_h;
    const double dh = p.trading_interval_h;
    const double eta = p.efficiency;

    lp::LinearProgram prog;
    prog.sense = lp::Sense::Maximize;
    prog.c = VectorXd::Zero(L.n_vars());
    for (int t = 0; t < 24; ++t) prog.c(WpLayout::bid(t)) = inst.prices(t) * dh;
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < 24; ++t) prog.c(L.shortfall(s, t)) = -w(t) * pi;
    }

    prog.a = MatrixXd::Zero(L.n_rows(), L.n_vars());
    prog.b = VectorXd::Zero(L.n_rows());
    prog.rel.assign(static_cast<size_t>(L.n_rows()), lp::Relation::Equal);

    for (int s = 0; s < ns; ++s) {
        // SOC_{s,q} = SOC_{s,q-1} + eta dq P^in - (1/eta) dq P^out
        for (int q = 0; q < 96; ++q) {
            const int r = L.balance_row(s, q);
            prog.a(r, L.soc(s, q)) = 1;
            if (q > 0) prog.a(r, L.soc(s, q - 1)) = -1;
            prog.a(r, L.charge(s, q)) = -eta * dq;
            prog.a(r, L.discharge(s, q)) = dq / eta;
            prog.b(r) = q == 0 ? p.soc_initial_mwh : 0.0;
        }
        prog.a(L.terminal_row(s), L.soc(s, 95)) = 1;
        prog.b(L.terminal_row(s)) = p.soc_initial_mwh;
        // shortfall >= bid energy - delivered energy
        for (int t = 0; t < 24; ++t) {
            const int r = L.shortfall_row(s, t);
            prog.rel[static_cast<size_t>(r)] = lp::Relation::GreaterEq;
            prog.a(r, L.shortfall(s, t)) = 1;
            prog.a(r, WpLayout::bid(t)) = -dh;
            double avail = 0;
            for (int q = 0; q < 4; ++q) {
                prog.a(r, L.discharge(s, 4 * t + q)) = dq;
                prog.a(r, L.charge(s, 4 * t + q)) = -dq;
                avail += dq * inst.production_mw(s, 4 * t + q);
            }
            prog.b(r) = -avail;
        }
    }

    prog.lo = VectorXd::Zero(L.n_vars());
    prog.hi = VectorXd::Constant(L.n_vars(), lp::infinity());
    for (int t = 0; t < 24; ++t) prog.hi(WpLayout::bid(t)) = p.max_bid_mw;
    for (int s = 0; s < ns; ++s) {
        for (int q = 0; q < 96; ++q) {
            prog.hi(L.charge(s, q)) = p.max_charge_mw;
            prog.hi(L.discharge(s, q)) = p.max_charge_mw;
            prog.hi(L.soc(s, q)) = p.soc_max_mwh;
        }
    }
    return prog;
}

std::vector<int> wp_crash_basis(const MarketInstance& inst) {
    const WpLayout L = wp_layout(inst);
    std::vector<int> basis;
    basis.reserve(static_cast<size_t>(L.n_rows()));
    for (int s = 0; s < L.n_scenarios; ++s) {
        for (int q = 0; q < 96; ++q) basis.push_back(L.soc(s, q));
        basis.push_back(L.charge(s, 0));
        for (int t = 0; t < 24; ++t) basis.push_back(lp::slack_of_row(L.shortfall_row(s, t)));
    }
    return basis;
}

BiddingSolution solve_wp(const MarketInstance& inst, const WpSolveOptions& options) {
    inst.validate();
    const int ns = inst.n_scenarios();
    SolveMethod method = options.method;
    if (method == SolveMethod::Auto) {
        method = ns <= 6 ? SolveMethod::ReducedLp : SolveMethod::Benders;
    }

    VectorXd bids;
    double lp_objective = std::numeric_limits<double>::quiet_NaN();
    int benders_iterations = 0;
    if (method == SolveMethod::FullLp) {
        lp::LinearProgram prog = build_wp(inst);
        lp::SolveOptions opt;
        opt.basis_hint = wp_crash_basis(inst);
        auto sol = lp::solve(prog, opt);
        if (sol.status != lp::Status::Optimal) {
            throw std::runtime_error("WP deterministic equivalent not optimal");
        }
        bids = sol.x.head(24);
        lp_objective = sol.objective;
    } else if (method == SolveMethod::ReducedLp) {
        lp::LinearProgram prog = build_reduced_wp(inst);
        lp::SolveOptions opt;
        opt.basis_hint = reduced_crash_basis(inst);
        auto sol = lp::solve(prog, opt);
        if (sol.status != lp::Status::Optimal) {
            throw std::runtime_error("WP hourly reformulation not optimal");
        }
        bids = sol.x.head(24);
        lp_objective = sol.objective;
    } else {
        bool converged = false;
        bids = solve_bids_benders(inst, options, converged, benders_iterations);
        if (!converged) {
            // The direct dense solve is only affordable at modest sizes; a
            // stalled decomposition on a large instance is a solver defect.
            if (ns <= 30) {
                lp::LinearProgram prog = build_reduced_wp(inst);
                lp::SolveOptions opt;
                opt.basis_hint = reduced_crash_basis(inst);
                auto sol = lp::solve(prog, opt);
                if (sol.status != lp::Status::Optimal) {
                    throw std::runtime_error("WP fallback solve not optimal");
                }
                bids = sol.x.head(24);
                lp_objective = sol.objective;
            } else {
                throw std::runtime_error(
                    "Benders decomposition did not reach the requested gap");
            }
        }
    }

    BiddingSolution out = assemble_solution(inst, bids);
    out.decomposition_iterations = benders_iterations;
    if (std::isfinite(lp_objective) &&
        std::abs(out.expected_objective - lp_objective) >
            1e-6 * std::max(1.0, std::abs(lp_objective))) {
        throw AuditFailure("assembled objective disagrees with the LP optimum");
    }
    return out;
}

double audit(const MarketInstance& inst, const BiddingSolution& sol) {
    const int ns = inst.n_scenarios();
    const MarketParams& p = inst.params;
    const double dq = p.production_interval_h;
    const double dh = p.trading_interval_h;
    double worst = 0;
    auto track = [&](double violation) { worst = std::max(worst, violation); };

    for (int t = 0; t < 24; ++t) {
        track(-sol.bids(t));
        track(sol.bids(t) - p.max_bid_mw);
    }
    for (int s = 0; s < ns; ++s) {
        double soc_prev = p.soc_initial_mwh;
        for (int q = 0; q < 96; ++q) {
            const double in = sol.charge_mw(s, q);
            const double outp = sol.discharge_mw(s, q);
            const double soc = sol.soc_mwh(s, q);
            track(-in);
            track(in - p.max_charge_mw);
            track(-outp);
            track(outp - p.max_charge_mw);
            track(-soc);
            track(soc - p.soc_max_mwh);
            track(std::abs(soc - (soc_prev + p.efficiency * dq * in - dq * outp / p.efficiency)));
            soc_prev = soc;
        }
        track(std::abs(soc_prev - p.soc_initial_mwh));
        for (int t = 0; t < 24; ++t) {
            track(-sol.shortfall(s, t));
            double delivered = 0;
            for (int q = 0; q < 4; ++q) {
                delivered += dq * (inst.production_mw(s, 4 * t + q) +
                                   sol.discharge_mw(s, 4 * t + q) - sol.charge_mw(s, 4 * t + q));
            }
            track(dh * sol.bids(t) - delivered - sol.shortfall(s, t));
        }
    }
    return worst;
}

double actual_profit(const VectorXd& bids, const VectorXd& realization_mw,
                     const VectorXd& prices, const MarketParams& params) {
    if (bids.size() != 24) throw InvalidInstance("bids must have 24 entries");
    if (realization_mw.size() != 96) throw InvalidInstance("realization must have 96 entries");

    MarketInstance inst;
    inst.params = params;
    inst.prices = prices;
    inst.scenarios.source = data::Source::Historical;
    inst.scenarios.scenarios = (realization_mw / params.max_bid_mw).transpose();
    inst.validate();

    lp::LinearProgram prog = build_wp(inst);
    std::vector<std::pair<int, double>> assignments;
    for (int t = 0; t < 24; ++t) assignments.emplace_back(WpLayout::bid(t), bids(t));
    prog = lp::fix_variables(prog, assignments);

    const WpLayout L = wp_layout(inst);
    const MatrixXd energy = hourly_energy(inst);
    std::vector<int> basis;
    for (int q = 0; q < 96; ++q) basis.push_back(L.soc(0, q));
    basis.push_back(L.charge(0, 0));
    for (int t = 0; t < 24; ++t) {
        const double b = params.trading_interval_h * bids(t) - energy(0, t);
        basis.push_back(b > 0 ? L.shortfall(0, t) : lp::slack_of_row(L.shortfall_row(0, t)));
    }
    lp::SolveOptions opt;
    opt.basis_hint = basis;
    auto sol = lp::solve(prog, opt);
    if (sol.status != lp::Status::Optimal) {
        throw std::runtime_error("actual-profit evaluation not optimal");
    }
    return sol.objective;
}

double perfect_foresight_profit(const VectorXd& realization_mw, const VectorXd& prices,
                                const MarketParams& params) {
    MarketInstance inst;
    inst.params = params;
    inst.prices = prices;
    inst.scenarios.source = data::Source::Historical;
    inst.scenarios.scenarios = (realization_mw / params.max_bid_mw).transpose();
    WpSolveOptions opt;
    opt.method = SolveMethod::ReducedLp;
    return solve_wp(inst, opt).expected_objective;
}

PipgResult pipg(double actual, double perfect) {
    PipgResult out;
    out.eur = actual - perfect;
    if (perfect == 0.0) {
        throw ZeroPerfectProfit("PIPG percentage undefined for zero perfect-foresight profit");
    }
    out.percent = out.eur / std::abs(perfect) * 100.0;
    return out;
}

}  // namespace windcast::market
