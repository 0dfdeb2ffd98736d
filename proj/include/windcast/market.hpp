#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "windcast/data.hpp"
#include "windcast/lp.hpp"

namespace windcast::market {

struct InvalidInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroPerfectProfit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AuditFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MarketParams {
    double trading_interval_h = 1.0;      // delta_h
    double production_interval_h = 0.25;  // delta_q
    double efficiency = 0.91;             // eta
    double penalty_factor = 1.5;          // omega
    int n_hours = 24;                     // N_T
    double max_bid_mw = 100.0;            // P^{D,max}
    double max_charge_mw = 12.5;          // P^max
    double soc_max_mwh = 25.0;
    double soc_initial_mwh = 12.5;

    void validate() const;
};

// One bidding problem: day-ahead prices, a scenario set (capacity factors,
// scaled by max_bid_mw into MW), and the market parameters.
struct MarketInstance {
    Eigen::VectorXd prices;  // 24, EUR/MWh, may be negative
    data::ScenarioSet scenarios;
    MarketParams params;

    int n_scenarios() const { return scenarios.count(); }
    double production_mw(int s, int q) const {
        return scenarios.scenarios(s, q) * params.max_bid_mw;
    }
    void validate() const;
};

struct BiddingSolution {
    Eigen::VectorXd bids;  // 24, MW
    double expected_objective = 0;
    Eigen::MatrixXd shortfall;     // N_S x 24, MW (negative imbalance)
    Eigen::MatrixXd charge_mw;     // N_S x 96, P^in per quarter
    Eigen::MatrixXd discharge_mw;  // N_S x 96, P^out per quarter
    Eigen::MatrixXd soc_mwh;       // N_S x 96
    int decomposition_iterations = 0;  // 0 when solved directly
};

// Variable layout of the deterministic equivalent produced by build_wp.
struct WpLayout {
    int n_scenarios = 0;
    static constexpr int bid(int t) { return t; }
    int shortfall(int s, int t) const { return 24 + s * 312 + t; }
    int charge(int s, int q) const { return 24 + s * 312 + 24 + q; }
    int discharge(int s, int q) const { return 24 + s * 312 + 120 + q; }
    int soc(int s, int q) const { return 24 + s * 312 + 216 + q; }
    int n_vars() const { return 24 + n_scenarios * 312; }
    int balance_row(int s, int q) const { return s * 121 + q; }
    int terminal_row(int s) const { return s * 121 + 96; }
    int shortfall_row(int s, int t) const { return s * 121 + 97 + t; }
    int n_rows() const { return n_scenarios * 121; }
};

// Quarter-resolution deterministic equivalent of the bidding problem:
// storage balance and terminal-state rows per scenario, shortfall rows
// linking delivered energy to the hourly bids, box bounds from the
// parameters.
lp::LinearProgram build_wp(const MarketInstance& instance);
WpLayout wp_layout(const MarketInstance& instance);

// Feasible starting basis for build_wp output (storage idle).
std::vector<int> wp_crash_basis(const MarketInstance& instance);

enum class SolveMethod {
    Auto,       // ReducedLp for small scenario sets, Benders otherwise
    FullLp,     // simplex on the quarter-resolution LP
    ReducedLp,  // simplex on the exact hourly reformulation
    Benders,    // L-shaped decomposition over scenarios
};

struct WpSolveOptions {
    SolveMethod method = SolveMethod::Auto;
    int benders_groups = 16;
    int benders_max_iterations = 3000;
    double tolerance = 1e-8;
};

BiddingSolution solve_wp(const MarketInstance& instance, const WpSolveOptions& options = {});

// Max constraint violation of a candidate solution against the instance.
double audit(const MarketInstance& instance, const BiddingSolution& solution);

// Profit of fixed bids under the realized production (MW, 96 entries):
// the single-scenario problem with the first stage pinned.
double actual_profit(const Eigen::VectorXd& bids, const Eigen::VectorXd& realization_mw,
                     const Eigen::VectorXd& prices, const MarketParams& params = {});

double perfect_foresight_profit(const Eigen::VectorXd& realization_mw,
                                const Eigen::VectorXd& prices, const MarketParams& params = {});

struct PipgResult {
    double eur = 0;
    double percent = 0;
};
// Perfect information profit gap: actual - perfect, and that gap as a
// percentage of |perfect|.
PipgResult pipg(double actual, double perfect);

}  // namespace windcast::market
