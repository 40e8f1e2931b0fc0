#pragma once

// Static SVG figures: data with fitted paths per method, the fitted
// temperature-time lines with their TI, and grouped bars of a study summary.

#include <string>

#include "addt/io.hpp"
#include "addt/simstudy.hpp"

namespace addt::svg {

/// Scatter of the data by temperature level with the method's fitted mean
/// paths and the failure threshold. Throws Error if the method did not fit.
std::string fit_paths(const Dataset& d, const io::Analysis& a, Method m);

/// log10(time) against reciprocal temperature, one line per fitted method,
/// with the target time and the TI of each method marked.
std::string ti_lines(const io::Analysis& a);

/// Bias, SD and RMSE per scenario as grouped bars, one panel per statistic.
std::string study_bars(const sim::StudySummary& s);

}  // namespace addt::svg
