#pragma once

// Monte Carlo comparison of the three TI estimators on simulated ADDT data.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "addt/core.hpp"

namespace addt::sim {

enum class Setting { I, II };

std::string_view setting_name(Setting s);
Setting parse_setting(std::string_view s);

/// Temperature levels and time points of one test plan.
struct ScenarioSpec {
    int id = 0;
    std::vector<double> temps;
    std::vector<double> times;
    int reps_per_cell = 5;
    int baseline_count = 10;

    /// The eight standard plans (ids 1..8). Throws DomainError otherwise.
    static ScenarioSpec preset(int id);
};

/// Data-generating model. Setting I uses the sigmoidal path
/// alpha / (1 + (t/eta)^gamma); Setting II the exponential path
/// alpha exp(-t/eta); both with eta(x) = exp(nu0 + nu1 x).
struct GeneratorSpec {
    Setting setting = Setting::I;
    double alpha = 9000.0;
    double nu0 = -16.0;
    double nu1 = 12500.0;
    double gamma = 2.0;  // unused by Setting II
    double sigma = 1000.0;
    double rho = 0.0;

    static GeneratorSpec preset(Setting s);

    double mean(double t, double x) const;
    /// Closed-form temperature-time line for threshold fraction p.
    ArrheniusLine true_line(double p) const;
    double true_ti(double p, double target_time) const;
};

/// alpha exp(-t / eta(x)).
double mu_setting2(double t, double x, double alpha, double nu0, double nu1);

/// One simulated test: reps_per_cell observations per (temperature, time)
/// cell plus baseline_count time-0 observations at alpha. Errors are
/// N(0, sigma^2) with compound symmetry rho inside a cell. The random stream
/// is Philox keyed by `seed` and addressed by (scenario id, replicate), so the
/// result depends only on those three numbers.
Dataset simulate_dataset(const GeneratorSpec& g, const ScenarioSpec& s, std::uint64_t seed,
                         std::uint32_t replicate = 0);

/// A named TI estimator. Throwing addt::Error or returning a non-finite
/// value counts as a failed replicate.
struct MethodSpec {
    std::string name;
    std::function<double(const Dataset&)> estimate;
};

struct EstimatorOptions {
    double p = 0.5;
    double target_time = 1e5;
    bool include_baseline = true;
    int knots = 4;
    int pm_starts = 8;
};

std::vector<MethodSpec> standard_methods(const std::vector<Method>& methods, const EstimatorOptions& opts = {});

struct StudyConfig {
    int n_reps = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    double p = 0.5;
    double target_time = 1e5;
};

struct SummaryRow {
    std::string setting;
    int scenario = 0;
    std::string method;
    double true_ti = 0.0;
    double mean = 0.0;
    double bias = 0.0;  // |mean - true_ti|
    double sd = 0.0;    // sample standard deviation
    double rmse = 0.0;
    int n_fail = 0;
    int n_reps = 0;
    bool valid = true;  // false when every replicate failed
};

struct StudySummary {
    std::vector<SummaryRow> rows;

    const SummaryRow* find(int scenario, std::string_view method) const;
};

/// Moments of the finite estimates around the known truth; non-finite
/// entries count as failed replicates.
SummaryRow summarize(const std::vector<double>& estimates, double true_ti);

/// Replicates run on `workers` threads; the summary is assembled in
/// replicate order, so it does not depend on the worker count.
StudySummary run_study(const GeneratorSpec& g, const std::vector<ScenarioSpec>& scenarios,
                       const std::vector<MethodSpec>& methods, const StudyConfig& cfg);

/// setting,scenario,method,mean,bias,sd,rmse,n_fail,n_reps (full precision).
std::string summary_csv(const StudySummary& s);
/// Whole-degree table, one row per scenario and a column group per statistic.
std::string summary_table(const StudySummary& s);

}  // namespace addt::sim
