#include "windcast/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "windcast/util/rng.hpp"

namespace windcast::data {

void DayRecord::validate() const {
    if (capacity.size() != 96) throw std::logic_error("DayRecord: capacity must have 96 entries");
    if (forecast.size() != 24) throw std::logic_error("DayRecord: forecast must have 24 entries");
    if (!capacity.allFinite() || !forecast.allFinite()) {
        throw std::logic_error("DayRecord: non-finite entry");
    }
    if ((forecast.array() < 0).any()) throw std::logic_error("DayRecord: negative forecast");
}

std::vector<int> Dataset::indices(Split which) const {
    std::vector<int> out;
    for (size_t i = 0; i < days.size(); ++i) {
        if (split[i] == which) out.push_back(static_cast<int>(i));
    }
    return out;
}

void Dataset::validate() const {
    if (split.size() != days.size()) throw std::logic_error("Dataset: split tags mismatch");
    for (size_t i = 0; i < days.size(); ++i) {
        days[i].validate();
        if (i > 0 && !(days[i - 1].date < days[i].date)) {
            throw std::logic_error("Dataset: dates must be strictly increasing");
        }
    }
}

namespace {

std::vector<std::pair<Timestamp, double>> load_series_csv(const std::string& path,
                                                          const std::string& header,
                                                          int cadence_minutes,
                                                          bool reject_negative_as_speed) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open " + path);
    std::string line;
    int lineno = 0;
    std::vector<std::pair<Timestamp, double>> rows;
    if (!std::getline(in, line)) return rows;  // empty file -> empty list
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw ParseError(lineno, "expected header '" + header + "', got '" + line + "'");
    }
    int data_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        ++data_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            --data_line;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(data_line, "missing comma");
        Timestamp ts;
        try {
            ts = util::parse_timestamp(line.substr(0, comma));
        } catch (const std::exception& e) {
            throw ParseError(data_line, e.what());
        }
        const std::string value_str = line.substr(comma + 1);
        char* end = nullptr;
        const double value = std::strtod(value_str.c_str(), &end);
        if (end == value_str.c_str() || *end != '\0') {
            throw ParseError(data_line, "malformed number '" + value_str + "'");
        }
        if (std::isnan(value)) throw ParseError(data_line, "NaN value");
        if (value < 0) {
            if (reject_negative_as_speed) throw NegativeSpeed(data_line);
            throw ParseError(data_line, "negative capacity factor");
        }
        if (!rows.empty() && rows.back().first.date() == ts.date()) {
            const std::int64_t gap = ts.minutes - rows.back().first.minutes;
            if (gap != cadence_minutes) {
                throw CadenceError(data_line, "expected " + std::to_string(cadence_minutes) +
                                                  "-minute cadence, got " + std::to_string(gap) +
                                                  " minutes");
            }
        }
        rows.emplace_back(ts, value);
    }
    return rows;
}

}  // namespace

std::vector<std::pair<Timestamp, double>> load_capacity_csv(const std::string& path) {
    return load_series_csv(path, "timestamp,capacity_factor", 15, false);
}

std::vector<std::pair<Timestamp, double>> load_forecast_csv(const std::string& path) {
    return load_series_csv(path, "timestamp,wind_speed_mps", 60, true);
}

AlignResult align_days(const std::vector<std::pair<Timestamp, double>>& capacity,
                       const std::vector<std::pair<Timestamp, double>>& forecast) {
    std::map<Date, std::vector<std::pair<int, double>>> cap_by_day;
    for (const auto& [ts, v] : capacity) {
        cap_by_day[ts.date()].emplace_back(ts.minute_of_day() / 15, v);
    }
    std::map<Date, std::vector<std::pair<int, double>>> fc_by_day;
    for (const auto& [ts, v] : forecast) {
        fc_by_day[ts.date()].emplace_back(ts.minute_of_day() / 60, v);
    }

    AlignResult out;
    std::map<Date, int> seen;
    for (const auto& [date, rows] : cap_by_day) seen.emplace(date, 0);
    for (const auto& [date, rows] : fc_by_day) seen.emplace(date, 0);

    auto complete = [](const std::vector<std::pair<int, double>>& rows, int expect) {
        if (static_cast<int>(rows.size()) != expect) return false;
        for (int i = 0; i < expect; ++i) {
            if (rows[static_cast<size_t>(i)].first != i) return false;
        }
        return true;
    };

    for (const auto& [date, _] : seen) {
        const auto cap_it = cap_by_day.find(date);
        const auto fc_it = fc_by_day.find(date);
        if (cap_it == cap_by_day.end()) {
            out.drops.push_back({date, "missing_capacity"});
            continue;
        }
        if (fc_it == fc_by_day.end()) {
            out.drops.push_back({date, "missing_forecast"});
            continue;
        }
        if (!complete(cap_it->second, 96)) {
            out.drops.push_back({date, "incomplete_capacity"});
            continue;
        }
        if (!complete(fc_it->second, 24)) {
            out.drops.push_back({date, "incomplete_forecast"});
            continue;
        }
        DayRecord rec;
        rec.date = date;
        rec.capacity = Eigen::VectorXd(96);
        rec.forecast = Eigen::VectorXd(24);
        for (int i = 0; i < 96; ++i) rec.capacity(i) = cap_it->second[static_cast<size_t>(i)].second;
        for (int i = 0; i < 24; ++i) rec.forecast(i) = fc_it->second[static_cast<size_t>(i)].second;
        out.dataset.days.push_back(std::move(rec));
        out.dataset.split.push_back(Split::Train);
    }
    if (out.dataset.days.empty()) {
        throw EmptyIntersection("no complete day shared by capacity and forecast data");
    }
    return out;
}

Dataset split_by_year(Dataset dataset, int test_year) {
    if (dataset.days.empty()) throw DegenerateSplit("empty dataset");
    int n_train = 0, n_test = 0;
    for (size_t i = 0; i < dataset.days.size(); ++i) {
        const bool test = dataset.days[i].date.year == test_year;
        dataset.split[i] = test ? Split::Test : Split::Train;
        (test ? n_test : n_train) += 1;
    }
    if (n_train == 0 || n_test == 0) {
        throw DegenerateSplit("split by year " + std::to_string(test_year) +
                              " leaves an empty partition (" + std::to_string(n_train) +
                              " train / " + std::to_string(n_test) + " test)");
    }
    return dataset;
}

ScenarioSet sample_historical(const Dataset& dataset, int n, std::uint64_t seed) {
    const auto train = dataset.indices(Split::Train);
    if (train.empty()) throw EmptyTrainSet("historical sampling needs a train partition");
    if (n < 1) throw std::invalid_argument("sample_historical: n must be >= 1");
    rng::Rng r(rng::mix(seed, 0x68697374ULL));  // "hist"
    ScenarioSet set;
    set.source = Source::Historical;
    set.scenarios = Eigen::MatrixXd(n, 96);
    for (int i = 0; i < n; ++i) {
        const int pick = train[static_cast<size_t>(r.uniform_index(train.size()))];
        set.scenarios.row(i) = dataset.days[static_cast<size_t>(pick)].capacity.transpose();
    }
    return set;
}

Dataset synthesize(const SynthConfig& config) {
    if (config.n_days < 2) throw InvalidConfig("n_days must be >= 2");
    if (!(config.ar_coefficient > 0 && config.ar_coefficient < 1)) {
        throw InvalidConfig("ar_coefficient must lie in (0, 1)");
    }
    if (config.noise_scale <= 0) throw InvalidConfig("noise_scale must be > 0");
    if (config.power_curve_steepness <= 0) throw InvalidConfig("steepness must be > 0");
    if (config.power_curve_midpoint <= 0) throw InvalidConfig("midpoint must be > 0");
    if (config.forecast_error_scale < 0) throw InvalidConfig("forecast_error_scale must be >= 0");
    if (!util::is_valid_date(config.start_date)) throw InvalidConfig("invalid start date");

    rng::Rng speed_rng(rng::mix(config.seed, 0x73706565ULL));     // "spee"
    rng::Rng noise_rng(rng::mix(config.seed, 0x636e6f69ULL));     // capacity noise
    rng::Rng forecast_rng(rng::mix(config.seed, 0x66636572ULL));  // forecast error

    const int hours = config.n_days * 24 + 1;  // one extra hour for interpolation
    const double mu = config.power_curve_midpoint;   // AR(1) level; keeps the
                                                     // power curve informative
    const double stat_sd =
        config.noise_scale / std::sqrt(1.0 - config.ar_coefficient * config.ar_coefficient);
    std::vector<double> w(static_cast<size_t>(hours));
    w[0] = std::abs(mu + stat_sd * speed_rng.normal());
    for (int h = 1; h < hours; ++h) {
        const double next = mu + config.ar_coefficient * (w[static_cast<size_t>(h - 1)] - mu) +
                            config.noise_scale * speed_rng.normal();
        w[static_cast<size_t>(h)] = std::abs(next);
    }

    auto logistic = [&](double speed) {
        return 1.0 / (1.0 + std::exp(-config.power_curve_steepness * (speed - mu)));
    };

    Dataset out;
    const std::int64_t day0 = util::days_from_civil(config.start_date);
    for (int d = 0; d < config.n_days; ++d) {
        DayRecord rec;
        rec.date = util::civil_from_days(day0 + d);
        rec.capacity = Eigen::VectorXd(96);
        rec.forecast = Eigen::VectorXd(24);

        // smooth low-amplitude capacity noise: two random harmonics per day
        const double a1 = noise_rng.uniform(0, 0.015), p1 = noise_rng.uniform(0, 6.2831853);
        const double a2 = noise_rng.uniform(0, 0.008), p2 = noise_rng.uniform(0, 6.2831853);

        for (int q = 0; q < 96; ++q) {
            const int h = d * 24 + q / 4;
            const double frac = (q % 4) / 4.0;
            const double speed = (1.0 - frac) * w[static_cast<size_t>(h)] +
                                 frac * w[static_cast<size_t>(h + 1)];
            const double tau = q / 96.0;
            const double noise = a1 * std::sin(2 * M_PI * tau + p1) +
                                 a2 * std::sin(4 * M_PI * tau + p2);
            rec.capacity(q) = std::clamp(logistic(speed) + noise, 0.0, 1.0);
        }
        for (int h = 0; h < 24; ++h) {
            const double latent = w[static_cast<size_t>(d * 24 + h)];
            rec.forecast(h) =
                std::abs(latent + config.forecast_error_scale * forecast_rng.normal());
        }
        out.days.push_back(std::move(rec));
        out.split.push_back(Split::Train);
    }
    return out;
}

namespace {
std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_capacity_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp,capacity_factor\n";
    for (const auto& day : dataset.days) {
        for (int q = 0; q < 96; ++q) {
            out << util::format_timestamp(util::make_timestamp(day.date, q / 4, (q % 4) * 15))
                << ',' << fmt_full(day.capacity(q)) << '\n';
        }
    }
}

void write_forecast_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp,wind_speed_mps\n";
    for (const auto& day : dataset.days) {
        for (int h = 0; h < 24; ++h) {
            out << util::format_timestamp(util::make_timestamp(day.date, h, 0)) << ','
                << fmt_full(day.forecast(h)) << '\n';
        }
    }
}

void write_drop_report_jsonl(const std::vector<DropReport>& drops, std::ostream& os) {
    for (const auto& drop : drops) {
        os << "{\"date\":\"" << util::format_date(drop.date) << "\",\"reason\":\"" << drop.reason
           << "\"}\n";
    }
}

void write_scenarios_csv(const ScenarioSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "scenario";
    for (int q = 1; q <= 96; ++q) out << ",q" << q;
    out << '\n';
    for (int i = 0; i < set.count(); ++i) {
        out << i;
        for (int q = 0; q < 96; ++q) out << ',' << fmt_full(set.scenarios(i, q));
        out << '\n';
    }
}

ScenarioSet load_scenarios_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty scenario file");
    std::vector<Eigen::VectorXd> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                first = false;
                continue;
            }
            vals.push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (vals.size() != 96) throw ParseError(lineno, "expected 96 scenario values");
        rows.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), 96));
    }
    if (rows.empty()) throw ParseError(1, "scenario file has no rows");
    ScenarioSet set;
    set.scenarios = Eigen::MatrixXd(static_cast<int>(rows.size()), 96);
    for (size_t i = 0; i < rows.size(); ++i) set.scenarios.row(static_cast<int>(i)) = rows[i];
    return set;
}

}  // namespace windcast::data
