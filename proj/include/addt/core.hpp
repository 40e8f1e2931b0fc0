#pragma once

// Domain types shared by every estimator: measurements grouped into batches,
// the Arrhenius temperature transform and the temperature-time line that all
// three methods reduce to.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace addt {

/// Celsius to absolute offset used by the TI convention (273.16, not 273.15).
inline constexpr double kKelvinOffset = 273.16;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Fewer usable temperature levels than a method needs.
class InsufficientLevels : public Error {
public:
    using Error::Error;
};

/// The (fitted) degradation path never reaches the failure threshold.
class ThresholdNotReached : public Error {
public:
    using Error::Error;
};

/// An optimizer or iterative fitter could not produce any usable estimate.
class FitError : public Error {
public:
    using Error::Error;
};

enum class Method { TM, PM, SPM };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// x = 1 / (A + 273.16). Throws DomainError for A <= -273.16 or non-finite A.
double celsius_to_x(double celsius);
/// Inverse of celsius_to_x.
double x_to_celsius(double x);

struct Measurement {
    std::optional<double> temp_c;  // empty for baseline rows
    double time = 0.0;             // hours
    double response = 0.0;
};

/// All specimens destroyed at one (temperature, time) cell.
struct Batch {
    double time = 0.0;
    std::vector<double> responses;

    double mean() const;
    std::size_t size() const { return responses.size(); }
};

struct TemperatureLevel {
    double temp_c = 0.0;
    double x = 0.0;
    std::vector<Batch> batches;  // ascending, distinct times

    double max_time() const;
};

/// Measurements grouped by temperature level and time point. Rows with time 0
/// are the baseline (unaged) specimens regardless of their temperature field.
class Dataset {
public:
    Dataset() = default;

    /// Groups and validates. Rows sharing (temp, time) accumulate into one
    /// batch. Throws DomainError on negative time, non-finite response, a
    /// non-baseline row without temperature, or an empty set of
    /// elevated-temperature rows. Responses are not required to be positive
    /// here (simulated Gaussian noise can cross zero); file input is stricter.
    static Dataset from_measurements(std::vector<Measurement> rows);

    const std::vector<TemperatureLevel>& levels() const { return levels_; }
    const std::vector<double>& baseline() const { return baseline_; }
    const std::vector<Measurement>& measurements() const { return rows_; }

    std::size_t level_count() const { return levels_.size(); }
    /// N: number of non-baseline observations.
    std::size_t observation_count() const;
    /// Reciprocal absolute temperature of the hottest level.
    double x_max() const;

private:
    std::vector<Measurement> rows_;
    std::vector<TemperatureLevel> levels_;  // ascending temperature
    std::vector<double> baseline_;
};

/// Mean of the baseline responses, or `override_level` when given.
/// Throws DomainError when neither is available.
double initial_level(const Dataset& d, std::optional<double> override_level = std::nullopt);

struct FailureThreshold {
    double p = 0.5;
    double y_f = 0.0;

    /// y_f = p * initial.
    static FailureThreshold from_fraction(double p, double initial);
};

/// log10 m(x) = beta0 + beta1 * x.
struct ArrheniusLine {
    double beta0 = 0.0;
    double beta1 = 0.0;

    double log10_time(double x) const { return beta0 + beta1 * x; }

    bool operator==(const ArrheniusLine&) const = default;
};

struct TIResult {
    double ti = 0.0;  // degrees Celsius
    ArrheniusLine line;
    double target_time = 1e5;
    Method method = Method::TM;
};

/// R = beta1 / (log10(t_d) - beta0) - 273.16.
double ti_from_line(const ArrheniusLine& line, double target_time);

TIResult make_ti_result(const ArrheniusLine& line, double target_time, Method method);

void check_fraction(double p);

}  // namespace addt
