#include "addt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace addt::io {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

Dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty input, expected header '" + std::string(kCsvHeader) + "'");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line != kCsvHeader)
        throw ParseError(1, "header must be exactly '" + std::string(kCsvHeader) + "', got '" + line + "'");

    std::vector<Measurement> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 3) throw ParseError(lineno, "expected 3 fields, got " + std::to_string(fields.size()));

        Measurement m;
        const auto time = to_double(fields[1]);
        if (!time) throw ParseError(lineno, "time_hours '" + fields[1] + "' is not a number");
        if (*time < 0.0) throw ParseError(lineno, "time_hours must be >= 0");
        m.time = *time;
        const auto resp = to_double(fields[2]);
        if (!resp) throw ParseError(lineno, "response '" + fields[2] + "' is not a number");
        if (*resp <= 0.0) throw ParseError(lineno, "response must be > 0");
        m.response = *resp;
        if (fields[0].empty()) {
            if (m.time != 0.0) throw ParseError(lineno, "only baseline rows (time 0) may omit temp_c");
        } else {
            const auto temp = to_double(fields[0]);
            if (!temp) throw ParseError(lineno, "temp_c '" + fields[0] + "' is not a number");
            if (*temp <= -kKelvinOffset) throw ParseError(lineno, "temp_c is below absolute zero");
            m.temp_c = *temp;
        }
        rows.push_back(m);
    }
    try {
        return Dataset::from_measurements(std::move(rows));
    } catch (const DomainError& e) {
        throw ParseError(lineno, e.what());
    }
}

Dataset parse_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_csv(in);
}

std::string to_csv(const Dataset& d) {
    std::string out(kCsvHeader);
    out += '\n';
    char buf[128];
    for (const auto& m : d.measurements()) {
        if (m.temp_c && m.time != 0.0)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", *m.temp_c, m.time, m.response);
        else
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", m.time, m.response);
        out += buf;
    }
    return out;
}

void RunConfig::validate() const {
    check_fraction(p);
    if (!(target_time > 0.0)) throw DomainError("target time must be positive");
    if (knots < 0) throw DomainError("knot count must be >= 0");
    if (n_reps < 2) throw DomainError("reps must be >= 2");
    if (workers < 1) throw DomainError("workers must be >= 1");
    if (methods.empty()) throw DomainError("no method selected");
    for (int s : scenarios)
        if (s < 1 || s > 8) throw DomainError("scenario must be one of 1..8");
}

std::vector<Method> parse_methods(const std::string& s) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "all") return {Method::TM, Method::PM, Method::SPM};
    std::vector<Method> out;
    std::stringstream ss(lower);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const Method m = parse_method(trim(item));
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw DomainError("no method selected");
    return out;
}

std::vector<int> parse_scenarios(const std::string& s) {
    if (s == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || v < 1 || v > 8)
            throw DomainError("scenario '" + item + "' is not one of 1..8");
        out.push_back(v);
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&]() {
        const auto v = to_double(value);
        if (!v) throw DomainError("config key '" + key + "' needs a number, got '" + value + "'");
        return *v;
    };
    auto flag = [&]() {
        if (value == "true" || value == "1" || value == "yes") return true;
        if (value == "false" || value == "0" || value == "no") return false;
        throw DomainError("config key '" + key + "' needs true/false");
    };
    if (key == "method") cfg.methods = parse_methods(value);
    else if (key == "p") cfg.p = num();
    else if (key == "target-time") cfg.target_time = num();
    else if (key == "include-baseline") cfg.include_baseline = flag();
    else if (key == "knots") cfg.knots = static_cast<int>(num());
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "reps") cfg.n_reps = static_cast<int>(num());
    else if (key == "workers") cfg.workers = static_cast<int>(num());
    else if (key == "out") cfg.out = value;
    else if (key == "setting") cfg.setting = value;
    else if (key == "scenario") cfg.scenarios = parse_scenarios(value);
    else if (key == "plots") cfg.plots = flag();
    else throw DomainError("unknown config key '" + key + "'");
}

void apply_config(std::istream& in, RunConfig& cfg) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
        try {
            apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const DomainError& e) {
            throw ParseError(lineno, e.what());
        }
    }
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    apply_config(in, cfg);
}

int AnalysisReport::failures() const {
    return static_cast<int>(std::count_if(methods.begin(), methods.end(), [](const auto& m) { return !m.ok; }));
}

Analysis analyze(const Dataset& d, const RunConfig& cfg, const std::string& input_name) {
    Analysis a;
    a.report.p = cfg.p;
    a.report.target_time = cfg.target_time;
    a.report.include_baseline = cfg.include_baseline;
    a.report.knots = cfg.knots;
    a.report.input = input_name;

    for (Method m : cfg.methods) {
        MethodReport r;
        r.method = m;
        try {
            switch (m) {
                case Method::TM: {
                    auto fit = traditional::fit_traditional(d, cfg.p, cfg.target_time);
                    r.line = fit.result.line;
                    r.ti = fit.result.ti;
                    r.discarded_temps = fit.discarded_temps;
                    r.params["y_f"] = fit.y_f;
                    for (const auto& lv : fit.levels)
                        if (lv.failure_time) r.params["m_" + std::to_string(static_cast<int>(lv.temp_c))] = *lv.failure_time;
                    a.tm = std::move(fit);
                    break;
                }
                case Method::PM: {
                    parametric::FitOptions fo;
                    fo.include_baseline = cfg.include_baseline;
                    auto fit = parametric::fit_parametric(d, fo);
                    const auto ti = parametric::ti_parametric(fit.params, cfg.p, cfg.target_time);
                    r.line = ti.line;
                    r.ti = ti.ti;
                    r.loglik = fit.loglik;
                    r.aic = fit.aic;
                    r.converged = fit.converged;
                    if (!fit.converged) r.warnings.emplace_back("optimizer stopped at the evaluation cap");
                    r.params = {{"nu0", fit.params.nu0},     {"nu1", fit.params.nu1},
                                {"alpha", fit.params.alpha}, {"gamma", fit.params.gamma},
                                {"sigma", fit.params.sigma}, {"rho", fit.params.rho}};
                    a.pm = std::move(fit);
                    break;
                }
                case Method::SPM: {
                    semiparametric::FitOptions fo;
                    fo.include_baseline = cfg.include_baseline;
                    fo.knot_quantiles.clear();
                    for (int k = 1; k <= cfg.knots; ++k)
                        fo.knot_quantiles.push_back(static_cast<double>(k) / (cfg.knots + 1));
                    auto fit = semiparametric::fit_semiparametric(d, fo);
                    r.loglik = fit.loglik;
                    r.aic = fit.aic;
                    r.converged = fit.converged;
                    r.warnings = fit.warnings;
                    r.params = {{"beta", fit.model.beta},   {"g0", fit.model.spline.g0},
                                {"sigma", fit.model.sigma}, {"rho", fit.model.rho},
                                {"x_max", fit.model.x_max}, {"iterations", fit.iterations}};
                    const auto& c = fit.model.spline.coeffs;
                    for (std::size_t l = 0; l < c.size(); ++l) r.params["coef_" + std::to_string(l + 1)] = c[l];
                    a.spm = std::move(fit);
                    const auto ti = semiparametric::ti_semiparametric(a.spm->model, cfg.p, cfg.target_time);
                    r.line = ti.line;
                    r.ti = ti.ti;
                    break;
                }
            }
            r.ok = true;
        } catch (const Error& e) {
            r.ok = false;
            r.error = e.what();
        }
        a.report.methods.push_back(std::move(r));
    }
    return a;
}

namespace {

using nlohmann::json;

json method_to_json(const MethodReport& m) {
    json j;
    j["method"] = std::string(method_name(m.method));
    j["ok"] = m.ok;
    if (!m.error.empty()) j["error"] = m.error;
    if (m.ok) {
        j["beta0"] = m.line.beta0;
        j["beta1"] = m.line.beta1;
        j["ti"] = m.ti;
    }
    if (m.loglik) j["loglik"] = *m.loglik;
    if (m.aic) j["aic"] = *m.aic;
    if (m.converged) j["converged"] = *m.converged;
    if (!m.discarded_temps.empty()) j["discarded_temps"] = m.discarded_temps;
    if (!m.warnings.empty()) j["warnings"] = m.warnings;
    j["params"] = m.params;
    return j;
}

MethodReport method_from_json(const json& j) {
    MethodReport m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.ok = j.at("ok").get<bool>();
    m.error = j.value("error", std::string{});
    if (m.ok) {
        m.line = {j.at("beta0").get<double>(), j.at("beta1").get<double>()};
        m.ti = j.at("ti").get<double>();
    }
    if (j.contains("loglik")) m.loglik = j["loglik"].get<double>();
    if (j.contains("aic")) m.aic = j["aic"].get<double>();
    if (j.contains("converged")) m.converged = j["converged"].get<bool>();
    if (j.contains("discarded_temps")) m.discarded_temps = j["discarded_temps"].get<std::vector<double>>();
    if (j.contains("warnings")) m.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("params")) m.params = j["params"].get<std::map<std::string, double>>();
    return m;
}

}  // namespace

std::string report_to_json(const AnalysisReport& r) {
    json j;
    j["p"] = r.p;
    j["target_time"] = r.target_time;
    j["include_baseline"] = r.include_baseline;
    j["knots"] = r.knots;
    j["input"] = r.input;
    j["methods"] = json::array();
    for (const auto& m : r.methods) j["methods"].push_back(method_to_json(m));
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        AnalysisReport r;
        r.p = j.at("p").get<double>();
        r.target_time = j.at("target_time").get<double>();
        r.include_baseline = j.at("include_baseline").get<bool>();
        r.knots = j.at("knots").get<int>();
        r.input = j.value("input", std::string{});
        for (const auto& m : j.at("methods")) r.methods.push_back(method_from_json(m));
        return r;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

std::string report_table(const AnalysisReport& r) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "Temperature-time relationship and TI (t_d = %.0f, p = %g%%)\n",
                  r.target_time, r.p * 100.0);
    os << buf;
    os << "Method      beta0     beta1    TI\n";
    for (const auto& m : r.methods) {
        if (m.ok)
            std::snprintf(buf, sizeof buf, "%-6s %10.2f %9.1f %5.0f\n", std::string(method_name(m.method)).c_str(),
                          m.line.beta0, m.line.beta1, m.ti);
        else
            std::snprintf(buf, sizeof buf, "%-6s failed: %s\n", std::string(method_name(m.method)).c_str(),
                          m.error.c_str());
        os << buf;
    }
    for (const auto& m : r.methods) {
        if (!m.discarded_temps.empty()) {
            os << method_name(m.method) << " discarded levels (threshold not reached):";
            for (double t : m.discarded_temps) os << ' ' << t;
            os << '\n';
        }
        if (m.aic) {
            std::snprintf(buf, sizeof buf, "%s loglik %.3f  AIC %.3f\n", std::string(method_name(m.method)).c_str(),
                          *m.loglik, *m.aic);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace addt::io
