#pragma once

// File formats and the analysis driver behind the command-line tool:
// CSV ingestion, key=value run configuration, and the JSON/text reports.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "addt/core.hpp"
#include "addt/parametric.hpp"
#include "addt/semiparametric.hpp"
#include "addt/traditional.hpp"

namespace addt::io {

inline constexpr std::string_view kCsvHeader = "temp_c,time_hours,response";

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads `temp_c,time_hours,response` rows. Baseline rows leave temp_c empty
/// and have time_hours = 0. Blank lines are ignored; CRLF endings accepted.
Dataset parse_csv(std::istream& in);
Dataset parse_csv_file(const std::string& path);
std::string to_csv(const Dataset& d);

struct RunConfig {
    std::vector<Method> methods{Method::TM, Method::PM, Method::SPM};
    double p = 0.5;
    double target_time = 1e5;
    bool include_baseline = true;
    int knots = 4;
    std::uint64_t seed = 1;
    int n_reps = 1000;
    int workers = 1;
    std::string out = ".";
    std::string setting = "I";
    std::vector<int> scenarios{1, 2, 3, 4, 5, 6, 7, 8};
    bool plots = true;

    void validate() const;
};

/// Parses "all" or a comma-separated list of tm/pm/spm.
std::vector<Method> parse_methods(const std::string& s);
std::vector<int> parse_scenarios(const std::string& s);

/// Applies `key = value` lines (keys named like the long CLI flags without
/// dashes, e.g. target-time). '#' starts a comment. Unknown keys are errors.
void apply_config(std::istream& in, RunConfig& cfg);
void apply_config_file(const std::string& path, RunConfig& cfg);
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

struct MethodReport {
    Method method = Method::TM;
    bool ok = false;
    std::string error;
    ArrheniusLine line;
    double ti = 0.0;
    std::optional<double> loglik;
    std::optional<double> aic;
    std::optional<bool> converged;
    std::vector<double> discarded_temps;
    std::vector<std::string> warnings;
    std::map<std::string, double> params;

    bool operator==(const MethodReport&) const = default;
};

struct AnalysisReport {
    double p = 0.5;
    double target_time = 1e5;
    bool include_baseline = true;
    int knots = 4;
    std::string input;
    std::vector<MethodReport> methods;

    bool operator==(const AnalysisReport&) const = default;

    int failures() const;
};

/// Every estimator run on one dataset, with the fitted objects kept for plots.
struct Analysis {
    AnalysisReport report;
    std::optional<traditional::TraditionalFit> tm;
    std::optional<parametric::FitReport> pm;
    std::optional<semiparametric::SemiparamFit> spm;
};

/// Runs the configured methods. A method that throws is recorded as failed;
/// the others still run.
Analysis analyze(const Dataset& d, const RunConfig& cfg, const std::string& input_name = "");

std::string report_to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const std::string& text);

/// Text table with beta0 to 2 decimals, beta1 to 1 decimal and TI in whole degrees.
std::string report_table(const AnalysisReport& r);

}  // namespace addt::io
