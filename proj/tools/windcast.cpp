// windcast: day-ahead wind-power scenario generation, evaluation, and
// stochastic bidding experiments.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "windcast/copula.hpp"
#include "windcast/data.hpp"
#include "windcast/flow.hpp"
#include "windcast/harness.hpp"
#include "windcast/market.hpp"
#include "windcast/metrics.hpp"

namespace {

using namespace windcast;
namespace fs = std::filesystem;

struct Common {
    std::string data_dir;
    std::string synth_config;
    int test_year = 2017;
    int threads = 1;
};

data::SynthConfig load_synth_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synth config " + path);
    nlohmann::json j;
    in >> j;
    data::SynthConfig config;
    if (j.contains("n_days")) config.n_days = j.at("n_days").get<int>();
    if (j.contains("ar_coefficient")) config.ar_coefficient = j.at("ar_coefficient").get<double>();
    if (j.contains("noise_scale")) config.noise_scale = j.at("noise_scale").get<double>();
    if (j.contains("power_curve_steepness")) {
        config.power_curve_steepness = j.at("power_curve_steepness").get<double>();
    }
    if (j.contains("power_curve_midpoint")) {
        config.power_curve_midpoint = j.at("power_curve_midpoint").get<double>();
    }
    if (j.contains("forecast_error_scale")) {
        config.forecast_error_scale = j.at("forecast_error_scale").get<double>();
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("start_date")) {
        config.start_date = util::parse_date(j.at("start_date").get<std::string>());
    }
    return config;
}

data::Dataset load_dataset(const Common& common, bool split) {
    data::Dataset ds;
    if (!common.synth_config.empty()) {
        ds = data::synthesize(load_synth_config(common.synth_config));
    } else {
        const fs::path dir(common.data_dir);
        auto aligned = data::align_days(data::load_capacity_csv((dir / "capacity.csv").string()),
                                        data::load_forecast_csv((dir / "forecast.csv").string()));
        data::write_drop_report_jsonl(aligned.drops, std::cerr);
        ds = std::move(aligned.dataset);
    }
    if (split) ds = data::split_by_year(std::move(ds), common.test_year);
    return ds;
}

const data::DayRecord& day_by_date(const data::Dataset& ds, const std::string& date_str) {
    const util::Date date = util::parse_date(date_str);
    for (const auto& day : ds.days) {
        if (day.date == date) return day;
    }
    throw std::runtime_error("date " + date_str + " not present in the dataset");
}

std::map<std::string, Eigen::VectorXd> load_prices_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prices file " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty prices file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,price_eur_mwh") {
        throw std::runtime_error("prices file must start with 'timestamp,price_eur_mwh'");
    }
    std::map<std::string, std::vector<std::pair<int, double>>> by_day;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const util::Timestamp ts = util::parse_timestamp(line.substr(0, comma));
        by_day[util::format_date(ts.date())].emplace_back(ts.minute_of_day() / 60,
                                                          std::stod(line.substr(comma + 1)));
    }
    std::map<std::string, Eigen::VectorXd> out;
    for (auto& [date, rows] : by_day) {
        if (rows.size() != 24) {
            throw std::runtime_error("prices for " + date + " do not cover 24 hours");
        }
        Eigen::VectorXd p(24);
        for (const auto& [hour, value] : rows) p(hour) = value;
        out[date] = p;
    }
    return out;
}

void write_prices_csv(const data::Dataset& ds, const harness::PriceProvider& provider,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp,price_eur_mwh\n";
    for (size_t i = 0; i < ds.size(); ++i) {
        const Eigen::VectorXd p = provider(static_cast<int>(i), ds.days[i]);
        for (int h = 0; h < 24; ++h) {
            out << util::format_timestamp(util::make_timestamp(ds.days[i].date, h, 0)) << ','
                << p(h) << '\n';
        }
    }
}

market::MarketParams load_market_params(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open market params " + path);
    nlohmann::json j;
    in >> j;
    harness::ExperimentConfig dummy;
    return harness::config_from_json(nlohmann::json{{"market", j}}).market;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

int run(int argc, char** argv) {
    CLI::App app{"day-ahead wind power scenario generation and bidding toolkit"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--threads", common.threads, "worker thread cap")->envname("WINDCAST_THREADS");

    auto add_data_source = [&](CLI::App* cmd, bool with_year = true) {
        auto* dir = cmd->add_option("--data-dir", common.data_dir,
                                    "directory with capacity.csv and forecast.csv");
        auto* synth = cmd->add_option("--synth", common.synth_config,
                                      "synthetic-data config JSON (alternative to --data-dir)");
        dir->excludes(synth);
        synth->excludes(dir);
        if (with_year) {
            cmd->add_option("--test-year", common.test_year, "calendar year held out as test");
        }
    };

    // --- synth ----------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic wind data CSVs");
    std::string synth_config_path, synth_out;
    bool no_prices = false;
    synth_cmd->add_option("--config", synth_config_path, "SynthConfig JSON")->required();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_flag("--no-prices", no_prices, "skip writing prices.csv");

    // --- train-flow -----------------------------------------------------
    auto* train_cmd = app.add_subcommand("train-flow", "fit the conditional flow model");
    std::string train_out;
    std::uint64_t train_seed = 0;
    int train_epochs = 1000;
    double train_lr = 1e-3;
    double evr_target = 0.9995;
    int n_layers = 4;
    train_cmd->add_option("--out", train_out, "output model JSON")->required();
    train_cmd->add_option("--seed", train_seed, "training seed");
    train_cmd->add_option("--epochs", train_epochs, "training epochs");
    train_cmd->add_option("--lr", train_lr, "Adam learning rate");
    train_cmd->add_option("--evr", evr_target, "explained variance ratio target");
    train_cmd->add_option("--layers", n_layers, "coupling layers");
    add_data_source(train_cmd);

    // --- fit-copula -----------------------------------------------------
    auto* copula_cmd = app.add_subcommand("fit-copula", "fit the Gaussian copula baseline");
    std::string copula_out;
    copula_cmd->add_option("--out", copula_out, "output model JSON")->required();
    add_data_source(copula_cmd);

    // --- sample ---------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "generate a scenario set for one day");
    std::string sample_method = "flow", sample_model, sample_date, sample_out, sample_post =
        "clamp";
    int sample_n = 20;
    std::uint64_t sample_seed = 0;
    sample_cmd->add_option("--method", sample_method, "flow|copula|historical")
        ->check(CLI::IsMember({"flow", "copula", "historical"}));
    sample_cmd->add_option("--model", sample_model, "model JSON (flow/copula)");
    sample_cmd->add_option("--date", sample_date, "target day YYYY-MM-DD")->required();
    sample_cmd->add_option("--n", sample_n, "number of scenarios");
    sample_cmd->add_option("--seed", sample_seed, "sampling seed");
    sample_cmd->add_option("--out", sample_out, "output scenario CSV")->required();
    sample_cmd->add_option("--post", sample_post, "flow postprocessing: clamp|reject|none")
        ->check(CLI::IsMember({"clamp", "reject", "none"}));
    add_data_source(sample_cmd);

    // --- metrics --------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand("metrics", "scenario-quality metrics as CSV");
    std::string which, metrics_scenarios, metrics_date, metrics_out, metrics_split = "test";
    metrics_cmd->add_option("--which", which, "kde|qq|psd|es|quantiles")
        ->required()
        ->check(CLI::IsMember({"kde", "qq", "psd", "es", "quantiles"}));
    metrics_cmd->add_option("--scenarios", metrics_scenarios, "scenario CSV input");
    metrics_cmd->add_option("--date", metrics_date, "day for the energy score");
    metrics_cmd->add_option("--split", metrics_split, "dataset partition: train|test")
        ->check(CLI::IsMember({"train", "test"}));
    metrics_cmd->add_option("--out", metrics_out, "output CSV (default stdout)");
    add_data_source(metrics_cmd);

    // --- bid ------------------------------------------------------------
    auto* bid_cmd = app.add_subcommand("bid", "solve the day-ahead bidding problem");
    std::string bid_scenarios, bid_prices, bid_out, bid_market, bid_date;
    std::string bid_method = "auto";
    bid_cmd->add_option("--scenarios", bid_scenarios, "scenario CSV")->required();
    bid_cmd->add_option("--prices", bid_prices, "prices CSV (timestamp,price_eur_mwh)")
        ->required();
    bid_cmd->add_option("--date", bid_date, "day to pick from the prices file");
    bid_cmd->add_option("--out", bid_out, "output bid JSON")->required();
    bid_cmd->add_option("--market", bid_market, "market parameter JSON");
    bid_cmd->add_option("--solver", bid_method, "auto|full|reduced|benders")
        ->check(CLI::IsMember({"auto", "full", "reduced", "benders"}));

    // --- evaluate -------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("evaluate", "actual profit and PIPG of placed bids");
    std::string eval_bid, eval_date;
    eval_cmd->add_option("--bid", eval_bid, "bid JSON from 'windcast bid'")->required();
    eval_cmd->add_option("--date", eval_date, "realized day YYYY-MM-DD")->required();
    eval_cmd->add_option("--realization", common.data_dir, "data directory with the realization");
    eval_cmd->add_option("--synth", common.synth_config, "synthetic-data config JSON");

    // --- stability / profits --------------------------------------------
    auto* stab_cmd = app.add_subcommand("stability", "scenario-stability experiment");
    auto* prof_cmd = app.add_subcommand("profits", "actual-profit experiment");
    std::string exp_config_path, exp_flow, exp_copula, exp_out_dir, exp_prices;
    for (CLI::App* cmd : {stab_cmd, prof_cmd}) {
        cmd->add_option("--config", exp_config_path, "ExperimentConfig JSON");
        cmd->add_option("--flow", exp_flow, "trained flow model JSON");
        cmd->add_option("--copula", exp_copula, "fitted copula model JSON");
        cmd->add_option("--out-dir", exp_out_dir, "report output directory")->required();
        cmd->add_option("--prices", exp_prices, "prices CSV (default: synthetic curves)");
        add_data_source(cmd);
    }

    for (CLI::App* cmd : {synth_cmd, train_cmd, copula_cmd, sample_cmd, metrics_cmd, bid_cmd,
                          eval_cmd, stab_cmd, prof_cmd}) {
        cmd->fallthrough();  // global options may follow the subcommand
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (synth_cmd->parsed()) {
        auto config = load_synth_config(synth_config_path);
        auto ds = data::synthesize(config);
        fs::create_directories(synth_out);
        const fs::path dir(synth_out);
        data::write_capacity_csv(ds, (dir / "capacity.csv").string());
        data::write_forecast_csv(ds, (dir / "forecast.csv").string());
        if (!no_prices) {
            write_prices_csv(ds, harness::synthetic_prices(config.seed),
                             (dir / "prices.csv").string());
        }
        std::cerr << "wrote " << ds.size() << " days to " << synth_out << "\n";
        return 0;
    }

    if (train_cmd->parsed()) {
        auto ds = load_dataset(common, true);
        flow::FlowConfig config;
        config.n_layers = n_layers;
        auto model = flow::init_for_dataset(ds, evr_target, config, train_seed);
        flow::TrainOptions opts;
        opts.epochs = train_epochs;
        opts.learning_rate = train_lr;
        opts.seed = train_seed;
        auto trace = flow::train(model, ds, opts);
        for (size_t e = 0; e < trace.size(); ++e) {
            std::cerr << "epoch " << e << " nll " << trace[e] << "\n";
        }
        flow::save(model, train_out);
        std::cerr << "flow model with " << model.latent_dim << " latent dimensions -> "
                  << train_out << "\n";
        return 0;
    }

    if (copula_cmd->parsed()) {
        auto ds = load_dataset(common, true);
        auto model = copula::fit(ds, common.threads);
        copula::save(model, copula_out);
        std::cerr << "copula model -> " << copula_out << "\n";
        return 0;
    }

    if (sample_cmd->parsed()) {
        if (common.data_dir.empty() && common.synth_config.empty()) common.data_dir = "data";
        // only the historical baseline needs the train/test split
        auto ds = load_dataset(common, sample_method == "historical");
        const auto& day = day_by_date(ds, sample_date);
        data::ScenarioSet set;
        if (sample_method == "historical") {
            set = data::sample_historical(ds, sample_n, sample_seed);
        } else if (sample_method == "flow") {
            if (sample_model.empty()) throw std::runtime_error("--model required for flow");
            auto model = flow::load(sample_model);
            const flow::Post post = sample_post == "clamp"    ? flow::Post::Clamp
                                    : sample_post == "reject" ? flow::Post::Reject
                                                              : flow::Post::None;
            set = flow::sample(model, day.forecast, sample_n, sample_seed, post);
        } else {
            if (sample_model.empty()) throw std::runtime_error("--model required for copula");
            auto model = copula::load(sample_model);
            set = copula::sample(model, day.forecast, sample_n, sample_seed);
        }
        data::write_scenarios_csv(set, sample_out);
        std::cerr << set.count() << " scenarios -> " << sample_out << "\n";
        return 0;
    }

    if (metrics_cmd->parsed()) {
        std::ofstream file;
        const data::Split split =
            metrics_split == "train" ? data::Split::Train : data::Split::Test;
        if (which == "kde") {
            std::vector<double> values;
            if (!metrics_scenarios.empty()) {
                auto set = data::load_scenarios_csv(metrics_scenarios);
                values.assign(set.scenarios.data(),
                              set.scenarios.data() + set.scenarios.size());
            } else {
                auto ds = load_dataset(common, true);
                for (const int d : ds.indices(split)) {
                    const auto& cap = ds.days[static_cast<size_t>(d)].capacity;
                    values.insert(values.end(), cap.data(), cap.data() + cap.size());
                }
            }
            auto curve = metrics::kde_curve(values);
            auto& os = open_out(file, metrics_out);
            os << "value,density\n";
            for (int i = 0; i < curve.grid.size(); ++i) {
                os << curve.grid(i) << ',' << curve.density(i) << '\n';
            }
        } else if (which == "qq") {
            auto set = data::load_scenarios_csv(metrics_scenarios);
            std::vector<double> a(set.scenarios.data(),
                                  set.scenarios.data() + set.scenarios.size());
            auto ds = load_dataset(common, true);
            std::vector<double> b;
            for (const int d : ds.indices(split)) {
                const auto& cap = ds.days[static_cast<size_t>(d)].capacity;
                b.insert(b.end(), cap.data(), cap.data() + cap.size());
            }
            std::vector<double> levels;
            for (int i = 1; i <= 99; ++i) levels.push_back(i / 100.0);
            auto points = metrics::qq_points(a, b, levels);
            auto& os = open_out(file, metrics_out);
            os << "level,quantile_scenarios,quantile_realizations\n";
            for (size_t i = 0; i < points.size(); ++i) {
                os << levels[i] << ',' << points[i].first << ',' << points[i].second << '\n';
            }
        } else if (which == "psd") {
            Eigen::MatrixXd rows;
            if (!metrics_scenarios.empty()) {
                rows = data::load_scenarios_csv(metrics_scenarios).scenarios;
            } else {
                auto ds = load_dataset(common, true);
                const auto idx = ds.indices(split);
                rows.resize(static_cast<int>(idx.size()), 96);
                for (size_t i = 0; i < idx.size(); ++i) {
                    rows.row(static_cast<int>(i)) =
                        ds.days[static_cast<size_t>(idx[i])].capacity.transpose();
                }
            }
            Eigen::VectorXd avg;
            Eigen::VectorXd freqs;
            for (int i = 0; i < rows.rows(); ++i) {
                auto est = metrics::welch_psd(rows.row(i).transpose());
                if (i == 0) {
                    avg = est.power;
                    freqs = est.frequencies;
                } else {
                    avg += est.power;
                }
            }
            avg /= rows.rows();
            auto& os = open_out(file, metrics_out);
            os << "frequency,power\n";
            for (int k = 0; k < freqs.size(); ++k) os << freqs(k) << ',' << avg(k) << '\n';
        } else if (which == "es") {
            auto set = data::load_scenarios_csv(metrics_scenarios);
            auto ds = load_dataset(common, false);
            const auto& day = day_by_date(ds, metrics_date);
            const double es = metrics::energy_score(day.capacity, set);
            auto& os = open_out(file, metrics_out);
            os << "date,energy_score\n" << metrics_date << ',' << es << '\n';
        } else {  // quantiles
            auto ds = load_dataset(common, true);
            std::vector<double> levels;
            for (int i = 0; i <= 20; ++i) levels.push_back(i / 20.0);
            auto curves = metrics::quantile_trajectories(ds, split, levels);
            auto& os = open_out(file, metrics_out);
            os << "timestep";
            for (const double l : levels) os << ",q" << l;
            os << '\n';
            for (int t = 0; t < 96; ++t) {
                os << t;
                for (int l = 0; l < curves.cols(); ++l) os << ',' << curves(t, l);
                os << '\n';
            }
        }
        return 0;
    }

    if (bid_cmd->parsed()) {
        market::MarketInstance inst;
        inst.params = load_market_params(bid_market);
        inst.scenarios = data::load_scenarios_csv(bid_scenarios);
        auto prices = load_prices_csv(bid_prices);
        if (!bid_date.empty()) {
            if (!prices.count(bid_date)) {
                throw std::runtime_error("no prices for " + bid_date);
            }
            inst.prices = prices.at(bid_date);
        } else if (prices.size() == 1) {
            inst.prices = prices.begin()->second;
        } else {
            throw std::runtime_error("prices file covers several days; pass --date");
        }
        market::WpSolveOptions opts;
        opts.method = bid_method == "full"      ? market::SolveMethod::FullLp
                      : bid_method == "reduced" ? market::SolveMethod::ReducedLp
                      : bid_method == "benders" ? market::SolveMethod::Benders
                                                : market::SolveMethod::Auto;
        auto sol = market::solve_wp(inst, opts);
        nlohmann::json out{{"expected_objective_eur", sol.expected_objective},
                           {"max_bid_mw", inst.params.max_bid_mw},
                           {"penalty_factor", inst.params.penalty_factor}};
        for (int t = 0; t < 24; ++t) {
            out["bids_mw"].push_back(sol.bids(t));
            out["prices_eur_mwh"].push_back(inst.prices(t));
        }
        for (int s = 0; s < sol.shortfall.rows(); ++s) {
            nlohmann::json row = nlohmann::json::array();
            for (int t = 0; t < 24; ++t) row.push_back(sol.shortfall(s, t));
            out["shortfall_mw"].push_back(row);
        }
        std::ofstream bid_file(bid_out);
        if (!bid_file) throw std::runtime_error("cannot write " + bid_out);
        bid_file << out.dump(1) << "\n";
        std::cerr << "expected objective " << sol.expected_objective << " EUR -> " << bid_out
                  << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        std::ifstream in(eval_bid);
        if (!in) throw std::runtime_error("cannot open " + eval_bid);
        nlohmann::json bid_json;
        in >> bid_json;
        Eigen::VectorXd bids(24), prices(24);
        for (int t = 0; t < 24; ++t) {
            bids(t) = bid_json.at("bids_mw").at(static_cast<size_t>(t)).get<double>();
            prices(t) = bid_json.at("prices_eur_mwh").at(static_cast<size_t>(t)).get<double>();
        }
        market::MarketParams params;
        if (bid_json.contains("max_bid_mw")) {
            params.max_bid_mw = bid_json.at("max_bid_mw").get<double>();
        }
        if (bid_json.contains("penalty_factor")) {
            params.penalty_factor = bid_json.at("penalty_factor").get<double>();
        }
        auto ds = load_dataset(common, false);
        const auto& day = day_by_date(ds, eval_date);
        const Eigen::VectorXd realization = day.capacity * params.max_bid_mw;
        const double actual = market::actual_profit(bids, realization, prices, params);
        const double perfect = market::perfect_foresight_profit(realization, prices, params);
        nlohmann::json out{{"date", eval_date},
                           {"expected_objective_eur", bid_json.value("expected_objective_eur", 0.0)},
                           {"actual_profit_eur", actual},
                           {"perfect_foresight_eur", perfect},
                           {"pipg_eur", actual - perfect}};
        if (perfect != 0.0) {
            out["pipg_percent"] = market::pipg(actual, perfect).percent;
        }
        std::cout << out.dump(1) << "\n";
        return 0;
    }

    if (stab_cmd->parsed() || prof_cmd->parsed()) {
        harness::ExperimentConfig config;
        if (!exp_config_path.empty()) {
            std::ifstream in(exp_config_path);
            if (!in) throw std::runtime_error("cannot open " + exp_config_path);
            nlohmann::json j;
            in >> j;
            config = harness::config_from_json(j);
        }
        config.threads = common.threads;
        auto ds = load_dataset(common, true);

        flow::FlowModel flow_model;
        copula::CopulaModel copula_model;
        harness::Models models;
        for (const auto method : config.methods) {
            if (method == harness::Method::Flow) {
                if (exp_flow.empty()) throw std::runtime_error("--flow model required");
                flow_model = flow::load(exp_flow);
                models.flow = &flow_model;
            }
            if (method == harness::Method::Copula) {
                if (exp_copula.empty()) throw std::runtime_error("--copula model required");
                copula_model = copula::load(exp_copula);
                models.copula = &copula_model;
            }
        }

        harness::PriceProvider prices = harness::synthetic_prices(config.master_seed);
        std::map<std::string, Eigen::VectorXd> price_table;
        if (!exp_prices.empty()) {
            price_table = load_prices_csv(exp_prices);
            prices = [&price_table](int, const data::DayRecord& day) {
                const auto it = price_table.find(util::format_date(day.date));
                if (it == price_table.end()) {
                    throw std::runtime_error("no prices for " + util::format_date(day.date));
                }
                return it->second;
            };
        }

        fs::create_directories(exp_out_dir);
        const fs::path dir(exp_out_dir);
        std::vector<harness::CellError> errors;
        if (stab_cmd->parsed()) {
            auto result = harness::run_stability(config, ds, models, prices);
            std::ofstream out((dir / "stability.csv").string());
            harness::write_stability_csv(result, out);
            errors = result.errors;
            std::cerr << "stability table -> " << (dir / "stability.csv").string() << "\n";
        } else {
            auto result = harness::run_profits(config, ds, models, prices);
            std::ofstream out((dir / "profits.csv").string());
            harness::write_profits_csv(result, out);
            std::ofstream sweep((dir / "expected_vs_actual.csv").string());
            harness::write_sweep_csv(result, sweep);
            errors = result.errors;
            std::cerr << "profit tables -> " << exp_out_dir << "\n";
        }
        std::ofstream manifest((dir / "manifest.json").string());
        manifest << harness::manifest_json(config, errors).dump(1) << "\n";
        if (!errors.empty()) {
            std::cerr << errors.size() << " cells failed; see manifest.json\n";
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError&) {
        return 1;  // CLI11_PARSE already reported
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
