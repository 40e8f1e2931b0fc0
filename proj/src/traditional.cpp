#include "addt/traditional.hpp"

#include <algorithm>
#include <cmath>

namespace addt::traditional {

BatchMeanSeries batch_means(const Dataset& d) {
    BatchMeanSeries out;
    out.reserve(d.level_count());
    for (const auto& level : d.levels()) {
        LevelSeries s{level.temp_c, level.x, {}};
        for (const auto& b : level.batches) s.points.push_back({b.time, b.mean()});
        out.push_back(std::move(s));
    }
    return out;
}

LevelInterpolation interpolate_level(const LevelSeries& series, double y_f) {
    LevelInterpolation out{series.temp_c, series.x, {}, std::nullopt, {}};
    if (series.points.size() < 2) {
        out.note = "fewer than two time points";
        return out;
    }
    std::vector<double> t, y;
    for (const auto& p : series.points) {
        t.push_back(p.time);
        y.push_back(p.mean);
    }
    int degree = std::min<int>(3, static_cast<int>(t.size()) - 1);
    for (;; --degree) {
        try {
            out.poly = num::fit_polynomial(t, y, degree);
            break;
        } catch (const num::RankDeficient&) {
            if (degree == 1) throw;
        }
    }
    const double t_end = t.back();
    out.failure_time = num::solve_crossing(out.poly, y_f, 0.0, t_end);
    if (!out.failure_time) out.note = "fitted curve does not reach the threshold";
    return out;
}

ArrheniusLine fit_line(const std::vector<double>& x, const std::vector<double>& log10_time) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) throw InsufficientLevels("a line needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += log10_time[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (log10_time[i] - my);
    }
    if (sxx == 0.0) throw InsufficientLevels("line points share one temperature");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

TraditionalFit fit_traditional(const Dataset& d, double p, double target_time,
                               std::optional<double> initial) {
    TraditionalFit fit;
    fit.y_f = FailureThreshold::from_fraction(p, initial_level(d, initial)).y_f;

    std::vector<double> xs, logm;
    for (const auto& series : batch_means(d)) {
        auto interp = interpolate_level(series, fit.y_f);
        if (interp.failure_time && *interp.failure_time > 0.0) {
            xs.push_back(interp.x);
            logm.push_back(std::log10(*interp.failure_time));
        } else {
            fit.discarded_temps.push_back(interp.temp_c);
        }
        fit.levels.push_back(std::move(interp));
    }
    if (xs.size() < 2)
        throw InsufficientLevels("traditional method needs two levels that reach the threshold, got " +
                                 std::to_string(xs.size()));
    fit.result = make_ti_result(fit_line(xs, logm), target_time, Method::TM);
    return fit;
}

}  // namespace addt::traditional
