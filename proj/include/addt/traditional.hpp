#pragma once

// Two-step least-squares procedure of UL 746B: per-level polynomial fits of
// batch means, interpolated failure times, then a straight line of
// log10(failure time) against reciprocal absolute temperature.

#include <optional>
#include <string>
#include <vector>

#include "addt/core.hpp"
#include "addt/numkit.hpp"

namespace addt::traditional {

struct MeanPoint {
    double time = 0.0;
    double mean = 0.0;
};

struct LevelSeries {
    double temp_c = 0.0;
    double x = 0.0;
    std::vector<MeanPoint> points;
};

using BatchMeanSeries = std::vector<LevelSeries>;

BatchMeanSeries batch_means(const Dataset& d);

struct LevelInterpolation {
    double temp_c = 0.0;
    double x = 0.0;
    num::PolyFit poly;
    std::optional<double> failure_time;  // empty: threshold not reached on [0, max time]
    std::string note;                    // why a level was skipped, if it was
};

/// Polynomial of degree min(3, points - 1) through the level's batch means,
/// and the earliest time on [0, last observed time] where it meets y_f.
/// A level with fewer than two time points comes back unfitted with a note.
LevelInterpolation interpolate_level(const LevelSeries& series, double y_f);

struct TraditionalFit {
    TIResult result;
    std::vector<LevelInterpolation> levels;
    std::vector<double> discarded_temps;
    double y_f = 0.0;
};

/// Ordinary least squares line through (x, log10 y).
ArrheniusLine fit_line(const std::vector<double>& x, const std::vector<double>& log10_time);

/// Full procedure. `initial` overrides the baseline mean used for y_f = p * initial.
/// Throws InsufficientLevels when fewer than two levels reach the threshold.
TraditionalFit fit_traditional(const Dataset& d, double p, double target_time,
                               std::optional<double> initial = std::nullopt);

}  // namespace addt::traditional
