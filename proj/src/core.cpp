#include "addt/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace addt {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::TM: return "TM";
        case Method::PM: return "PM";
        case Method::SPM: return "SPM";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    if (s == "TM") return Method::TM;
    if (s == "PM") return Method::PM;
    if (s == "SPM") return Method::SPM;
    throw DomainError("unknown method '" + std::string(name) + "'");
}

double celsius_to_x(double celsius) {
    if (!std::isfinite(celsius) || celsius <= -kKelvinOffset) {
        std::ostringstream msg;
        msg << "temperature " << celsius << " C is at or below absolute zero";
        throw DomainError(msg.str());
    }
    return 1.0 / (celsius + kKelvinOffset);
}

double x_to_celsius(double x) {
    if (!std::isfinite(x) || x <= 0.0) throw DomainError("reciprocal temperature must be positive");
    return 1.0 / x - kKelvinOffset;
}

double Batch::mean() const {
    return std::accumulate(responses.begin(), responses.end(), 0.0) /
           static_cast<double>(responses.size());
}

double TemperatureLevel::max_time() const {
    return batches.empty() ? 0.0 : batches.back().time;
}

Dataset Dataset::from_measurements(std::vector<Measurement> rows) {
    Dataset d;
    std::map<double, std::map<double, std::vector<double>>> grouped;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::ostringstream where;
        where << "row " << i + 1 << ": ";
        if (!std::isfinite(r.time) || r.time < 0.0)
            throw DomainError(where.str() + "time must be finite and >= 0");
        if (!std::isfinite(r.response)) throw DomainError(where.str() + "response must be finite");
        if (r.time == 0.0) {
            d.baseline_.push_back(r.response);
            continue;
        }
        if (!r.temp_c) throw DomainError(where.str() + "aged specimen without temperature");
        celsius_to_x(*r.temp_c);
        grouped[*r.temp_c][r.time].push_back(r.response);
    }
    if (grouped.empty()) throw DomainError("dataset has no elevated-temperature measurements");

    for (auto& [temp, cells] : grouped) {
        TemperatureLevel level{temp, celsius_to_x(temp), {}};
        for (auto& [time, ys] : cells) level.batches.push_back(Batch{time, std::move(ys)});
        d.levels_.push_back(std::move(level));
    }
    d.rows_ = std::move(rows);
    return d;
}

std::size_t Dataset::observation_count() const {
    std::size_t n = 0;
    for (const auto& level : levels_)
        for (const auto& b : level.batches) n += b.size();
    return n;
}

double Dataset::x_max() const {
    if (levels_.empty()) throw DomainError("empty dataset");
    return levels_.back().x;
}

double initial_level(const Dataset& d, std::optional<double> override_level) {
    if (override_level) {
        if (!std::isfinite(*override_level) || *override_level <= 0.0)
            throw DomainError("initial level override must be positive");
        return *override_level;
    }
    const auto& base = d.baseline();
    if (base.empty()) throw DomainError("no baseline (time 0) measurements and no initial level given");
    return std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size());
}

void check_fraction(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("threshold fraction p must lie in (0, 1)");
}

FailureThreshold FailureThreshold::from_fraction(double p, double initial) {
    check_fraction(p);
    if (!(initial > 0.0)) throw DomainError("initial level must be positive");
    return {p, p * initial};
}

double ti_from_line(const ArrheniusLine& line, double target_time) {
    if (!(target_time > 0.0) || !std::isfinite(target_time))
        throw DomainError("target time must be positive");
    if (!std::isfinite(line.beta0) || !std::isfinite(line.beta1))
        throw DomainError("temperature-time line has non-finite coefficients");
    const double denom = std::log10(target_time) - line.beta0;
    if (denom == 0.0) throw DomainError("log10(target time) equals the line intercept");
    const double ti = line.beta1 / denom - kKelvinOffset;
    if (!std::isfinite(ti) || ti <= -kKelvinOffset)
        throw DomainError("temperature-time line yields no physical thermal index");
    return ti;
}

TIResult make_ti_result(const ArrheniusLine& line, double target_time, Method method) {
    return {ti_from_line(line, target_time), line, target_time, method};
}

}  // namespace addt
