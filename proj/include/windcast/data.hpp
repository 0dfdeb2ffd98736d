#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "windcast/util/timestamp.hpp"

namespace windcast::data {

using util::Date;
using util::Timestamp;

struct MissingFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};
struct CadenceError : std::runtime_error {
    int line;
    CadenceError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};
struct NegativeSpeed : std::runtime_error {
    int line;
    explicit NegativeSpeed(int line_)
        : std::runtime_error("line " + std::to_string(line_) + ": negative wind speed"),
          line(line_) {}
};
struct EmptyIntersection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateSplit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyTrainSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One calendar day: 96 quarter-hourly capacity factors plus the 24 hourly
// wind-speed forecast values used as the conditional input.
struct DayRecord {
    Date date;
    Eigen::VectorXd capacity;  // 96 entries
    Eigen::VectorXd forecast;  // 24 entries, m/s

    void validate() const;
};

enum class Split { Train, Test };

struct Dataset {
    std::vector<DayRecord> days;
    std::vector<Split> split;  // one tag per day

    size_t size() const { return days.size(); }
    std::vector<int> indices(Split which) const;
    void validate() const;
};

enum class Source { Historical, Flow, Copula };

struct ScenarioSet {
    Eigen::MatrixXd scenarios;  // n_scenarios x 96 capacity factors
    Source source = Source::Historical;
    std::optional<Eigen::VectorXd> condition;  // forecast the set was generated for

    int count() const { return static_cast<int>(scenarios.rows()); }
};

struct DropReport {
    Date date;
    std::string reason;
};

struct SynthConfig {
    int n_days = 60;
    double ar_coefficient = 0.97;
    double noise_scale = 1.2;
    double power_curve_steepness = 1.1;
    double power_curve_midpoint = 8.0;  // m/s
    double forecast_error_scale = 0.8;
    std::uint64_t seed = 0;
    Date start_date{2016, 1, 1};
};

// --- ingestion ---------------------------------------------------------

std::vector<std::pair<Timestamp, double>> load_capacity_csv(const std::string& path);
std::vector<std::pair<Timestamp, double>> load_forecast_csv(const std::string& path);

struct AlignResult {
    Dataset dataset;
    std::vector<DropReport> drops;
};

// Joins capacity and forecast rows into complete day records; days lacking a
// full 96/24 complement on either side are dropped and reported.
AlignResult align_days(const std::vector<std::pair<Timestamp, double>>& capacity,
                       const std::vector<std::pair<Timestamp, double>>& forecast);

Dataset split_by_year(Dataset dataset, int test_year);

// n rows drawn uniformly with replacement from the train partition.
ScenarioSet sample_historical(const Dataset& dataset, int n, std::uint64_t seed);

// Deterministic synthetic wind data: hourly AR(1) latent speed pushed through
// a logistic power curve; the forecast is the latent speed plus noise.
Dataset synthesize(const SynthConfig& config);

// --- files --------------------------------------------------------------

void write_capacity_csv(const Dataset& dataset, const std::string& path);
void write_forecast_csv(const Dataset& dataset, const std::string& path);
void write_drop_report_jsonl(const std::vector<DropReport>& drops, std::ostream& os);

void write_scenarios_csv(const ScenarioSet& set, const std::string& path);
ScenarioSet load_scenarios_csv(const std::string& path);

}  // namespace windcast::data
