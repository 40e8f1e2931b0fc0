#include "addt/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "addt/parametric.hpp"
#include "addt/philox.hpp"
#include "addt/semiparametric.hpp"
#include "addt/traditional.hpp"

namespace addt::sim {

std::string_view setting_name(Setting s) { return s == Setting::I ? "I" : "II"; }

Setting parse_setting(std::string_view s) {
    if (s == "I" || s == "1") return Setting::I;
    if (s == "II" || s == "2") return Setting::II;
    throw DomainError("setting must be I or II");
}

ScenarioSpec ScenarioSpec::preset(int id) {
    const std::vector<double> four{552, 1008, 2016, 3528};
    const std::vector<double> five{552, 1008, 2016, 3528, 5040};
    const std::vector<std::vector<double>> temps{
        {250, 260, 270}, {250, 260, 270, 280}, {240, 250, 260, 270}, {240, 250, 260, 270, 280}};
    if (id < 1 || id > 8) throw DomainError("scenario must be one of 1..8");
    ScenarioSpec s;
    s.id = id;
    s.temps = temps[static_cast<std::size_t>((id - 1) % 4)];
    s.times = id <= 4 ? four : five;
    return s;
}

GeneratorSpec GeneratorSpec::preset(Setting s) {
    GeneratorSpec g;
    g.setting = s;
    if (s == Setting::II) {
        g.nu0 = -15.6;
        g.nu1 = 12471.0;
        g.gamma = 1.0;
    }
    return g;
}

double mu_setting2(double t, double x, double alpha, double nu0, double nu1) {
    if (!(t >= 0.0)) throw DomainError("time must be >= 0");
    return alpha * std::exp(-t / parametric::eta(x, nu0, nu1));
}

double GeneratorSpec::mean(double t, double x) const {
    if (setting == Setting::II) return mu_setting2(t, x, alpha, nu0, nu1);
    return parametric::mu(t, x, {nu0, nu1, alpha, gamma, sigma, rho});
}

ArrheniusLine GeneratorSpec::true_line(double p) const {
    if (setting == Setting::I) return parametric::line_parametric({nu0, nu1, alpha, gamma, sigma, rho}, p);
    check_fraction(p);
    // alpha exp(-m / eta) = p alpha  =>  m = eta ln(1/p)
    const double ln10 = std::log(10.0);
    return {(nu0 + std::log(std::log(1.0 / p))) / ln10, nu1 / ln10};
}

double GeneratorSpec::true_ti(double p, double target_time) const {
    return ti_from_line(true_line(p), target_time);
}

Dataset simulate_dataset(const GeneratorSpec& g, const ScenarioSpec& s, std::uint64_t seed,
                         std::uint32_t replicate) {
    RandomStream rng(seed, static_cast<std::uint32_t>(s.id), replicate);
    const double a = std::sqrt(std::max(g.rho, 0.0));
    const double b = std::sqrt(1.0 - std::max(g.rho, 0.0));
    auto cell = [&](std::optional<double> temp, double t, double mu, int n, std::vector<Measurement>& rows) {
        const double shared = g.rho > 0.0 ? rng.normal() : 0.0;
        for (int k = 0; k < n; ++k) {
            const double eps = g.sigma * (a * shared + b * rng.normal());
            rows.push_back({temp, t, mu + eps});
        }
    };

    std::vector<Measurement> rows;
    cell(std::nullopt, 0.0, g.alpha, s.baseline_count, rows);
    for (double temp : s.temps) {
        const double x = celsius_to_x(temp);
        for (double t : s.times) cell(temp, t, g.mean(t, x), s.reps_per_cell, rows);
    }
    return Dataset::from_measurements(std::move(rows));
}

std::vector<MethodSpec> standard_methods(const std::vector<Method>& methods, const EstimatorOptions& opts) {
    std::vector<MethodSpec> out;
    for (Method m : methods) {
        switch (m) {
            case Method::TM:
                out.push_back({"TM", [opts](const Dataset& d) {
                                   return traditional::fit_traditional(d, opts.p, opts.target_time).result.ti;
                               }});
                break;
            case Method::PM:
                out.push_back({"PM", [opts](const Dataset& d) {
                                   parametric::FitOptions fo;
                                   fo.include_baseline = opts.include_baseline;
                                   fo.starts = opts.pm_starts;
                                   const auto fit = parametric::fit_parametric(d, fo);
                                   return parametric::ti_parametric(fit.params, opts.p, opts.target_time).ti;
                               }});
                break;
            case Method::SPM:
                out.push_back({"SPM", [opts](const Dataset& d) {
                                   semiparametric::FitOptions fo;
                                   fo.include_baseline = opts.include_baseline;
                                   fo.knot_quantiles.clear();
                                   for (int k = 1; k <= opts.knots; ++k)
                                       fo.knot_quantiles.push_back(static_cast<double>(k) / (opts.knots + 1));
                                   const auto fit = semiparametric::fit_semiparametric(d, fo);
                                   return semiparametric::ti_semiparametric(fit.model, opts.p, opts.target_time).ti;
                               }});
                break;
        }
    }
    return out;
}

const SummaryRow* StudySummary::find(int scenario, std::string_view method) const {
    for (const auto& r : rows)
        if (r.scenario == scenario && r.method == method) return &r;
    return nullptr;
}

SummaryRow summarize(const std::vector<double>& estimates, double true_ti) {
    SummaryRow row;
    row.true_ti = true_ti;
    row.n_reps = static_cast<int>(estimates.size());
    std::vector<double> ok;
    for (double v : estimates)
        if (std::isfinite(v)) ok.push_back(v);
    row.n_fail = row.n_reps - static_cast<int>(ok.size());
    if (ok.empty()) {
        row.valid = false;
        return row;
    }
    const auto n = static_cast<double>(ok.size());
    double sum = 0.0, sq = 0.0;
    for (double v : ok) {
        sum += v;
        sq += (v - true_ti) * (v - true_ti);
    }
    row.mean = sum / n;
    double ss = 0.0;
    for (double v : ok) ss += (v - row.mean) * (v - row.mean);
    row.sd = ok.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.bias = std::abs(row.mean - true_ti);
    row.rmse = std::sqrt(sq / n);
    return row;
}

StudySummary run_study(const GeneratorSpec& g, const std::vector<ScenarioSpec>& scenarios,
                       const std::vector<MethodSpec>& methods, const StudyConfig& cfg) {
    if (cfg.n_reps < 2) throw DomainError("a study needs at least two replicates");
    const double truth = g.true_ti(cfg.p, cfg.target_time);
    const std::size_t n_methods = methods.size();
    const auto n_reps = static_cast<std::size_t>(cfg.n_reps);
    const std::size_t n_tasks = scenarios.size() * n_reps;

    // results[task * n_methods + m]; filled by whichever worker ran the task
    std::vector<std::optional<double>> results(n_tasks * n_methods);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const auto& scen = scenarios[task / n_reps];
            const auto rep = static_cast<std::uint32_t>(task % n_reps);
            const Dataset d = simulate_dataset(g, scen, cfg.seed, rep);
            for (std::size_t m = 0; m < n_methods; ++m) {
                try {
                    const double ti = methods[m].estimate(d);
                    if (std::isfinite(ti)) results[task * n_methods + m] = ti;
                } catch (const Error&) {
                }
            }
        }
    };
    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    StudySummary out;
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            std::vector<double> est;
            for (std::size_t r = 0; r < n_reps; ++r)
                est.push_back(results[(si * n_reps + r) * n_methods + m].value_or(NAN));
            SummaryRow row = summarize(est, truth);
            row.setting = std::string(setting_name(g.setting));
            row.scenario = scenarios[si].id;
            row.method = methods[m].name;
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

std::string summary_csv(const StudySummary& s) {
    std::string out = "setting,scenario,method,mean,bias,sd,rmse,n_fail,n_reps\n";
    char buf[512];
    for (const auto& r : s.rows) {
        if (r.valid) {
            std::snprintf(buf, sizeof buf, "%s,%d,%s,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.setting.c_str(),
                          r.scenario, r.method.c_str(), r.mean, r.bias, r.sd, r.rmse, r.n_fail, r.n_reps);
        } else {
            std::snprintf(buf, sizeof buf, "%s,%d,%s,NA,NA,NA,NA,%d,%d\n", r.setting.c_str(), r.scenario,
                          r.method.c_str(), r.n_fail, r.n_reps);
        }
        out += buf;
    }
    return out;
}

std::string summary_table(const StudySummary& s) {
    std::vector<std::string> methods;
    std::vector<int> scenarios;
    for (const auto& r : s.rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
            scenarios.push_back(r.scenario);
    }
    std::ostringstream os;
    auto cell = [&](const SummaryRow* r, double SummaryRow::*field) {
        char buf[16];
        if (!r || !r->valid) std::snprintf(buf, sizeof buf, "%5s", "NA");
        else std::snprintf(buf, sizeof buf, "%5.0f", r->*field);
        os << buf;
    };
    os << "Scenario  True TI |";
    for (const char* stat : {"Mean", "Bias", "SD", "RMSE"}) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %-*s|", static_cast<int>(methods.size()) * 5, stat);
        os << buf;
    }
    os << "\n                  |";
    for (int k = 0; k < 4; ++k) {
        os << ' ';
        for (const auto& m : methods) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%5s", m.c_str());
            os << buf;
        }
        os << '|';
    }
    os << '\n';
    for (int sc : scenarios) {
        const SummaryRow* first = s.find(sc, methods.front());
        char buf[64];
        std::snprintf(buf, sizeof buf, "%8d  %7.0f |", sc, first ? first->true_ti : 0.0);
        os << buf;
        for (auto field : {&SummaryRow::mean, &SummaryRow::bias, &SummaryRow::sd, &SummaryRow::rmse}) {
            os << ' ';
            for (const auto& m : methods) cell(s.find(sc, m), field);
            os << '|';
        }
        os << '\n';
    }
    for (const auto& r : s.rows)
        if (r.n_fail > 0)
            os << "scenario " << r.scenario << " " << r.method << ": " << r.n_fail << " of " << r.n_reps
               << " replicates failed\n";
    return os.str();
}

}  // namespace addt::sim
