#include "windcast/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "windcast/util/parallel.hpp"
#include "windcast/util/rng.hpp"

namespace windcast::harness {

std::string method_name(Method m) {
    switch (m) {
        case Method::Historical: return "historical";
        case Method::Flow: return "flow";
        case Method::Copula: return "copula";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "historical") return Method::Historical;
    if (name == "flow") return Method::Flow;
    if (name == "copula") return Method::Copula;
    throw std::invalid_argument("unknown method '" + name + "'");
}

int method_id(Method m) { return static_cast<int>(m); }

void ExperimentConfig::validate() const {
    if (methods.empty()) throw std::invalid_argument("config: methods must be nonempty");
    if (instances_per_day < 1) throw std::invalid_argument("config: instances_per_day >= 1");
    if (profit_scenario_count < 1) {
        throw std::invalid_argument("config: profit_scenario_count >= 1");
    }
    for (const int c : scenario_counts) {
        if (c < 1) throw std::invalid_argument("config: scenario counts must be >= 1");
    }
    market.validate();
}

std::uint64_t cell_seed(std::uint64_t master_seed, int day_index, Method method, int size,
                        int instance) {
    return rng::mix(master_seed, static_cast<std::uint64_t>(day_index),
                    static_cast<std::uint64_t>(method_id(method)),
                    static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(instance));
}

PriceProvider synthetic_prices(std::uint64_t master_seed) {
    return [master_seed](int day_index, const data::DayRecord&) {
        rng::Rng r(rng::mix(master_seed, 0x70726963ULL, static_cast<std::uint64_t>(day_index)));
        Eigen::VectorXd prices(24);
        const double base = 40.0 + 8.0 * r.normal();
        for (int t = 0; t < 24; ++t) {
            const double morning = 14.0 * std::exp(-std::pow((t - 8.5) / 2.5, 2));
            const double evening = 11.0 * std::exp(-std::pow((t - 19.0) / 3.0, 2));
            prices(t) = std::max(1.0, base + morning + evening + 3.5 * r.normal());
        }
        return prices;
    };
}

data::ScenarioSet generate_scenarios(Method method, const data::Dataset& dataset,
                                     const Models& models, const data::DayRecord& day, int n,
                                     std::uint64_t seed) {
    switch (method) {
        case Method::Historical:
            return data::sample_historical(dataset, n, seed);
        case Method::Flow:
            if (!models.flow) throw std::invalid_argument("flow model not provided");
            return flow::sample(*models.flow, day.forecast, n, seed);
        case Method::Copula:
            if (!models.copula) throw std::invalid_argument("copula model not provided");
            return copula::sample(*models.copula, day.forecast, n, seed);
    }
    throw std::logic_error("unreachable");
}

namespace {

std::vector<int> selected_test_days(const ExperimentConfig& config, const data::Dataset& dataset) {
    const auto test = dataset.indices(data::Split::Test);
    if (test.empty()) throw std::invalid_argument("test partition is empty");
    if (config.day_subset.empty()) return test;
    std::vector<int> out;
    for (const int pos : config.day_subset) {
        if (pos < 0 || pos >= static_cast<int>(test.size())) {
            throw std::invalid_argument("day_subset index out of range");
        }
        out.push_back(test[static_cast<size_t>(pos)]);
    }
    return out;
}

}  // namespace

StabilityResult run_stability(const ExperimentConfig& config, const data::Dataset& dataset,
                              const Models& models, const PriceProvider& prices) {
    config.validate();
    if (config.instances_per_day < 2) {
        throw std::invalid_argument("stability needs at least 2 instances per day");
    }
    const std::vector<int> days = selected_test_days(config, dataset);
    const int n_days = static_cast<int>(days.size());

    std::vector<Eigen::VectorXd> day_prices(static_cast<size_t>(n_days));
    for (int d = 0; d < n_days; ++d) {
        day_prices[static_cast<size_t>(d)] =
            prices(days[static_cast<size_t>(d)],
                   dataset.days[static_cast<size_t>(days[static_cast<size_t>(d)])]);
    }

    struct Cell {
        int day_pos;
        size_t method_pos;
        size_t size_pos;
        int instance;
    };
    std::vector<Cell> cells;
    for (int d = 0; d < n_days; ++d) {
        for (size_t m = 0; m < config.methods.size(); ++m) {
            for (size_t s = 0; s < config.scenario_counts.size(); ++s) {
                for (int i = 0; i < config.instances_per_day; ++i) {
                    cells.push_back({d, m, s, i});
                }
            }
        }
    }

    std::vector<double> objective(cells.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> cell_error(cells.size());

    util::parallel_for(cells.size(), config.threads, [&](size_t ci) {
        const Cell& cell = cells[ci];
        const int day_index = days[static_cast<size_t>(cell.day_pos)];
        const Method method = config.methods[cell.method_pos];
        const int size = config.scenario_counts[cell.size_pos];
        try {
            const std::uint64_t seed =
                cell_seed(config.master_seed, day_index, method, size, cell.instance);
            market::MarketInstance inst;
            inst.params = config.market;
            inst.prices = day_prices[static_cast<size_t>(cell.day_pos)];
            inst.scenarios = generate_scenarios(
                method, dataset, models, dataset.days[static_cast<size_t>(day_index)], size, seed);
            objective[ci] = market::solve_wp(inst, config.wp).expected_objective;
        } catch (const std::exception& e) {
            cell_error[ci] = e.what();
        }
    });

    StabilityResult result;
    for (size_t m = 0; m < config.methods.size(); ++m) {
        for (size_t s = 0; s < config.scenario_counts.size(); ++s) {
            std::vector<std::vector<double>> per_day;
            for (int d = 0; d < n_days; ++d) {
                std::vector<double> day_objs;
                for (size_t ci = 0; ci < cells.size(); ++ci) {
                    const Cell& cell = cells[ci];
                    if (cell.day_pos != d || cell.method_pos != m || cell.size_pos != s) continue;
                    if (!cell_error[ci].empty()) {
                        result.errors.push_back({days[static_cast<size_t>(d)],
                                                 method_name(config.methods[m]),
                                                 config.scenario_counts[s], cell.instance,
                                                 cell_error[ci]});
                        continue;
                    }
                    day_objs.push_back(objective[ci]);
                }
                if (day_objs.size() >= 2) per_day.push_back(std::move(day_objs));
            }
            if (!per_day.empty()) {
                result.table[config.methods[m]][config.scenario_counts[s]] =
                    metrics::stability_stats(per_day);
            }
        }
    }
    return result;
}

ProfitResult run_profits(const ExperimentConfig& config, const data::Dataset& dataset,
                         const Models& models, const PriceProvider& prices) {
    config.validate();
    const std::vector<int> days = selected_test_days(config, dataset);
    const int n_days = static_cast<int>(days.size());
    const double max_bid = config.market.max_bid_mw;

    std::vector<Eigen::VectorXd> day_prices(static_cast<size_t>(n_days));
    std::vector<Eigen::VectorXd> realization(static_cast<size_t>(n_days));
    std::vector<double> perfect(static_cast<size_t>(n_days),
                                std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> perfect_error(static_cast<size_t>(n_days));

    util::parallel_for(static_cast<size_t>(n_days), config.threads, [&](size_t d) {
        const int day_index = days[d];
        const auto& day = dataset.days[static_cast<size_t>(day_index)];
        day_prices[d] = prices(day_index, day);
        realization[d] = day.capacity * max_bid;
        try {
            perfect[d] =
                market::perfect_foresight_profit(realization[d], day_prices[d], config.market);
        } catch (const std::exception& e) {
            perfect_error[d] = e.what();
        }
    });

    ProfitResult result;
    for (int d = 0; d < n_days; ++d) {
        if (!perfect_error[static_cast<size_t>(d)].empty()) {
            result.errors.push_back(
                {days[static_cast<size_t>(d)], "perfect", 1, 0, perfect_error[static_cast<size_t>(d)]});
        }
    }

    // main experiment: one solve per (day, method) with profit_scenario_count
    struct Task {
        int day_pos;
        size_t method_pos;
    };
    std::vector<Task> tasks;
    for (int d = 0; d < n_days; ++d) {
        for (size_t m = 0; m < config.methods.size(); ++m) tasks.push_back({d, m});
    }
    std::vector<ProfitDayRow> rows(tasks.size());
    std::vector<std::string> row_error(tasks.size());
    util::parallel_for(tasks.size(), config.threads, [&](size_t ti) {
        const Task& task = tasks[ti];
        const size_t d = static_cast<size_t>(task.day_pos);
        const int day_index = days[d];
        const Method method = config.methods[task.method_pos];
        ProfitDayRow row;
        row.day_index = day_index;
        row.method = method;
        row.perfect = perfect[d];
        try {
            if (!perfect_error[d].empty()) throw std::runtime_error("perfect foresight failed");
            const std::uint64_t seed = cell_seed(config.master_seed, day_index, method,
                                                 config.profit_scenario_count, 0);
            market::MarketInstance inst;
            inst.params = config.market;
            inst.prices = day_prices[d];
            inst.scenarios =
                generate_scenarios(method, dataset, models, dataset.days[static_cast<size_t>(day_index)],
                                   config.profit_scenario_count, seed);
            auto sol = market::solve_wp(inst, config.wp);
            row.expected = sol.expected_objective;
            row.actual =
                market::actual_profit(sol.bids, realization[d], day_prices[d], config.market);
        } catch (const std::exception& e) {
            row_error[ti] = e.what();
        }
        rows[ti] = row;
    });

    for (size_t ti = 0; ti < tasks.size(); ++ti) {
        const Task& task = tasks[ti];
        if (!row_error[ti].empty()) {
            result.errors.push_back({rows[ti].day_index, method_name(config.methods[task.method_pos]),
                                     config.profit_scenario_count, 0, row_error[ti]});
            continue;
        }
        result.rows.push_back(rows[ti]);
    }

    for (const Method method : config.methods) {
        ProfitStats stats;
        stats.max_pipg_eur = std::numeric_limits<double>::infinity();
        int pct_days = 0;
        for (const auto& row : result.rows) {
            if (row.method != method) continue;
            const double gap = row.actual - row.perfect;
            stats.avg_pipg_eur += gap;
            stats.avg_actual += row.actual;
            stats.avg_perfect += row.perfect;
            stats.max_pipg_eur = std::min(stats.max_pipg_eur, gap);
            if (std::abs(row.perfect) > 1e-6) {
                stats.avg_pipg_percent += gap / std::abs(row.perfect) * 100.0;
                ++pct_days;
            }
            ++stats.n_days;
        }
        if (stats.n_days > 0) {
            stats.avg_pipg_eur /= stats.n_days;
            stats.avg_actual /= stats.n_days;
            stats.avg_perfect /= stats.n_days;
            if (pct_days > 0) stats.avg_pipg_percent /= pct_days;
            result.stats[method] = stats;
        }
    }

    // expected-vs-actual sweep over the configured scenario counts
    struct SweepTask {
        int day_pos;
        size_t method_pos;
        size_t size_pos;
        int instance;
    };
    std::vector<SweepTask> sweep_tasks;
    for (int d = 0; d < n_days; ++d) {
        for (size_t m = 0; m < config.methods.size(); ++m) {
            for (size_t s = 0; s < config.scenario_counts.size(); ++s) {
                for (int i = 0; i < config.instances_per_day; ++i) {
                    sweep_tasks.push_back({d, m, s, i});
                }
            }
        }
    }
    std::vector<double> sweep_expected(sweep_tasks.size(),
                                       std::numeric_limits<double>::quiet_NaN());
    std::vector<double> sweep_actual(sweep_tasks.size(),
                                     std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> sweep_error(sweep_tasks.size());
    util::parallel_for(sweep_tasks.size(), config.threads, [&](size_t ti) {
        const SweepTask& task = sweep_tasks[ti];
        const size_t d = static_cast<size_t>(task.day_pos);
        const int day_index = days[d];
        const Method method = config.methods[task.method_pos];
        const int size = config.scenario_counts[task.size_pos];
        try {
            if (!perfect_error[d].empty()) throw std::runtime_error("perfect foresight failed");
            const std::uint64_t seed =
                cell_seed(config.master_seed, day_index, method, size, task.instance);
            market::MarketInstance inst;
            inst.params = config.market;
            inst.prices = day_prices[d];
            inst.scenarios = generate_scenarios(
                method, dataset, models, dataset.days[static_cast<size_t>(day_index)], size, seed);
            auto sol = market::solve_wp(inst, config.wp);
            sweep_expected[ti] = sol.expected_objective;
            sweep_actual[ti] =
                market::actual_profit(sol.bids, realization[d], day_prices[d], config.market);
        } catch (const std::exception& e) {
            sweep_error[ti] = e.what();
        }
    });
    for (size_t ti = 0; ti < sweep_tasks.size(); ++ti) {
        const SweepTask& task = sweep_tasks[ti];
        const Method method = config.methods[task.method_pos];
        const int size = config.scenario_counts[task.size_pos];
        if (!sweep_error[ti].empty()) {
            result.errors.push_back({days[static_cast<size_t>(task.day_pos)], method_name(method),
                                     size, task.instance, sweep_error[ti]});
            continue;
        }
        SweepCell& cell = result.sweep[method][size];
        cell.avg_expected += sweep_expected[ti];
        cell.avg_actual += sweep_actual[ti];
        cell.n += 1;
    }
    for (auto& [method, by_size] : result.sweep) {
        for (auto& [size, cell] : by_size) {
            if (cell.n > 0) {
                cell.avg_expected /= cell.n;
                cell.avg_actual /= cell.n;
            }
        }
    }
    return result;
}

void write_stability_csv(const StabilityResult& result, std::ostream& os) {
    os << "scenarios,method,avg_std_eur,avg_spread_eur,n_days\n";
    for (const auto& [method, by_size] : result.table) {
        for (const auto& [size, cell] : by_size) {
            os << size << ',' << method_name(method) << ',' << cell.avg_std << ','
               << cell.avg_spread << ',' << cell.n_days << '\n';
        }
    }
}

void write_profits_csv(const ProfitResult& result, std::ostream& os) {
    os << "method,avg_pipg_eur,avg_pipg_percent,max_pipg_eur,avg_actual_eur,avg_perfect_eur,"
          "n_days\n";
    for (const auto& [method, stats] : result.stats) {
        os << method_name(method) << ',' << stats.avg_pipg_eur << ',' << stats.avg_pipg_percent
           << ',' << stats.max_pipg_eur << ',' << stats.avg_actual << ',' << stats.avg_perfect
           << ',' << stats.n_days << '\n';
    }
}

void write_sweep_csv(const ProfitResult& result, std::ostream& os) {
    os << "scenarios,method,avg_expected_eur,avg_actual_eur,n\n";
    for (const auto& [method, by_size] : result.sweep) {
        for (const auto& [size, cell] : by_size) {
            os << size << ',' << method_name(method) << ',' << cell.avg_expected << ','
               << cell.avg_actual << ',' << cell.n << '\n';
        }
    }
}

nlohmann::json manifest_json(const ExperimentConfig& config,
                             const std::vector<CellError>& errors) {
    nlohmann::json errs = nlohmann::json::array();
    for (const auto& e : errors) {
        errs.push_back({{"day_index", e.day_index},
                        {"method", e.method},
                        {"size", e.size},
                        {"instance", e.instance},
                        {"message", e.message}});
    }
    return nlohmann::json{{"config", config_to_json(config)}, {"errors", errs}};
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json methods = nlohmann::json::array();
    for (const Method m : config.methods) methods.push_back(method_name(m));
    return nlohmann::json{
        {"methods", methods},
        {"scenario_counts", config.scenario_counts},
        {"instances_per_day", config.instances_per_day},
        {"profit_scenario_count", config.profit_scenario_count},
        {"master_seed", config.master_seed},
        {"day_subset", config.day_subset},
        {"threads", config.threads},
        {"market",
         {{"efficiency", config.market.efficiency},
          {"penalty_factor", config.market.penalty_factor},
          {"max_bid_mw", config.market.max_bid_mw},
          {"max_charge_mw", config.market.max_charge_mw},
          {"soc_max_mwh", config.market.soc_max_mwh},
          {"soc_initial_mwh", config.market.soc_initial_mwh}}},
    };
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (j.contains("methods")) {
        config.methods.clear();
        for (const auto& name : j.at("methods")) {
            config.methods.push_back(method_from_name(name.get<std::string>()));
        }
    }
    if (j.contains("scenario_counts")) {
        config.scenario_counts = j.at("scenario_counts").get<std::vector<int>>();
    }
    if (j.contains("instances_per_day")) {
        config.instances_per_day = j.at("instances_per_day").get<int>();
    }
    if (j.contains("profit_scenario_count")) {
        config.profit_scenario_count = j.at("profit_scenario_count").get<int>();
    }
    if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("day_subset")) config.day_subset = j.at("day_subset").get<std::vector<int>>();
    if (j.contains("threads")) config.threads = j.at("threads").get<int>();
    if (j.contains("market")) {
        const auto& m = j.at("market");
        if (m.contains("efficiency")) config.market.efficiency = m.at("efficiency").get<double>();
        if (m.contains("penalty_factor")) {
            config.market.penalty_factor = m.at("penalty_factor").get<double>();
        }
        if (m.contains("max_bid_mw")) config.market.max_bid_mw = m.at("max_bid_mw").get<double>();
        if (m.contains("max_charge_mw")) {
            config.market.max_charge_mw = m.at("max_charge_mw").get<double>();
        }
        if (m.contains("soc_max_mwh")) {
            config.market.soc_max_mwh = m.at("soc_max_mwh").get<double>();
        }
        if (m.contains("soc_initial_mwh")) {
            config.market.soc_initial_mwh = m.at("soc_initial_mwh").get<double>();
        }
    }
    return config;
}

}  // namespace windcast::harness
