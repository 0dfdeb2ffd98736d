#pragma once

#include <Eigen/Core>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windcast/copula.hpp"
#include "windcast/data.hpp"
#include "windcast/flow.hpp"
#include "windcast/market.hpp"
#include "windcast/metrics.hpp"

namespace windcast::harness {

enum class Method { Historical, Flow, Copula };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
int method_id(Method m);  // historical 0, flow 1, copula 2 (seed derivation)

struct ExperimentConfig {
    std::vector<Method> methods{Method::Historical, Method::Flow, Method::Copula};
    std::vector<int> scenario_counts{3, 5, 10, 20, 50};
    int instances_per_day = 50;
    int profit_scenario_count = 100;
    std::uint64_t master_seed = 0;
    market::MarketParams market;
    market::WpSolveOptions wp;
    std::vector<int> day_subset;  // positions within the test partition; empty = all
    int threads = 1;

    void validate() const;
};

struct Models {
    const flow::FlowModel* flow = nullptr;
    const copula::CopulaModel* copula = nullptr;
};

// Day-ahead prices per test day. Must not depend on method or instance.
using PriceProvider = std::function<Eigen::VectorXd(int day_index, const data::DayRecord& day)>;

// Deterministic synthetic price curves (double-peaked daily shape plus
// seeded noise, strictly positive).
PriceProvider synthetic_prices(std::uint64_t master_seed);

// Child-seed derivation for one experiment cell:
//   mix(master_seed, day_index, method_id, size, instance_index)
std::uint64_t cell_seed(std::uint64_t master_seed, int day_index, Method method, int size,
                        int instance);

data::ScenarioSet generate_scenarios(Method method, const data::Dataset& dataset,
                                     const Models& models, const data::DayRecord& day, int n,
                                     std::uint64_t seed);

struct CellError {
    int day_index = -1;
    std::string method;
    int size = 0;
    int instance = 0;
    std::string message;
};

struct StabilityResult {
    std::map<Method, std::map<int, metrics::StabilityCell>> table;
    std::vector<CellError> errors;
};

// Kaut-Wallace stability experiment: repeated scenario sets per day, method,
// and size; objectives aggregated into average std and max-min spread.
StabilityResult run_stability(const ExperimentConfig& config, const data::Dataset& dataset,
                              const Models& models, const PriceProvider& prices);

struct ProfitDayRow {
    int day_index = -1;
    Method method = Method::Historical;
    double expected = 0;
    double actual = 0;
    double perfect = 0;
};

struct ProfitStats {
    double avg_pipg_eur = 0;
    double avg_pipg_percent = 0;
    double max_pipg_eur = 0;  // worst day (most negative gap)
    double avg_actual = 0;
    double avg_perfect = 0;
    int n_days = 0;
};

struct SweepCell {
    double avg_expected = 0;
    double avg_actual = 0;
    int n = 0;
};

struct ProfitResult {
    std::map<Method, ProfitStats> stats;
    std::map<Method, std::map<int, SweepCell>> sweep;  // size -> averages
    std::vector<ProfitDayRow> rows;
    std::vector<CellError> errors;
};

// Actual-profit experiment: bids from profit_scenario_count scenarios per
// day, re-optimized second stage on the realization, PIPG against perfect
// foresight; plus the expected-vs-actual sweep over scenario_counts.
ProfitResult run_profits(const ExperimentConfig& config, const data::Dataset& dataset,
                         const Models& models, const PriceProvider& prices);

void write_stability_csv(const StabilityResult& result, std::ostream& os);
void write_profits_csv(const ProfitResult& result, std::ostream& os);
void write_sweep_csv(const ProfitResult& result, std::ostream& os);
nlohmann::json manifest_json(const ExperimentConfig& config,
                             const std::vector<CellError>& errors);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace windcast::harness
