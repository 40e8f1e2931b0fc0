// addt: thermal index estimation from ADDT data.
//
//   addt fit data.csv [--method all] [--out DIR]
//   addt simulate --setting I --scenario 1,8 --reps 200 [--workers 4]
//   addt ti --beta0 -21.05 --beta1 8128.4
//
// Settings are resolved as: built-in defaults, then ADDT_WORKERS, then the
// --config file, then flags given on the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "addt/core.hpp"
#include "addt/io.hpp"
#include "addt/simstudy.hpp"
#include "addt/svg.hpp"

namespace fs = std::filesystem;
using namespace addt;

namespace {

constexpr int kOk = 0;
constexpr int kHardError = 1;
constexpr int kPartial = 2;

struct Flags {
    std::map<std::string, std::string> values;  // config key -> raw value
    std::string config;
    bool no_plots = false;

    void add(CLI::App* app, const std::string& key, const std::string& help) {
        app->add_option("--" + key, values[key], help);
    }

    io::RunConfig resolve(CLI::App* app) const {
        io::RunConfig cfg;
        if (const char* env = std::getenv("ADDT_WORKERS"); env && *env) {
            try {
                io::apply_setting(cfg, "workers", env);
            } catch (const DomainError& e) {
                throw Error(std::string("ADDT_WORKERS: ") + e.what());
            }
        }
        if (!config.empty()) io::apply_config_file(config, cfg);
        for (const auto& [key, value] : values)
            if (app->count("--" + key) > 0) io::apply_setting(cfg, key, value);
        if (no_plots) cfg.plots = false;
        return cfg;
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

int cmd_fit(const io::RunConfig& cfg, const std::string& input) {
    const Dataset d = io::parse_csv_file(input);
    const io::Analysis a = io::analyze(d, cfg, fs::path(input).filename().string());

    fs::create_directories(cfg.out);
    const fs::path out(cfg.out);
    write_file(out / "report.json", io::report_to_json(a.report));
    const std::string table = io::report_table(a.report);
    write_file(out / "table.txt", table);
    std::cout << table;

    if (cfg.plots) {
        bool any = false;
        for (const auto& m : a.report.methods) {
            if (!m.ok) continue;
            any = true;
            std::string name(method_name(m.method));
            for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            write_file(out / ("fit_" + name + ".svg"), svg::fit_paths(d, a, m.method));
        }
        if (any) write_file(out / "ti_lines.svg", svg::ti_lines(a));
    }

    for (const auto& m : a.report.methods)
        if (!m.ok) std::cerr << "addt: " << method_name(m.method) << " failed: " << m.error << '\n';
    return a.report.failures() == 0 ? kOk : kPartial;
}

int cmd_simulate(const io::RunConfig& cfg) {
    const sim::GeneratorSpec gen = sim::GeneratorSpec::preset(sim::parse_setting(cfg.setting));
    std::vector<sim::ScenarioSpec> scenarios;
    for (int id : cfg.scenarios) scenarios.push_back(sim::ScenarioSpec::preset(id));

    sim::EstimatorOptions eo;
    eo.p = cfg.p;
    eo.target_time = cfg.target_time;
    eo.include_baseline = cfg.include_baseline;
    eo.knots = cfg.knots;
    sim::StudyConfig sc;
    sc.n_reps = cfg.n_reps;
    sc.seed = cfg.seed;
    sc.workers = cfg.workers;
    sc.p = cfg.p;
    sc.target_time = cfg.target_time;

    const sim::StudySummary summary = sim::run_study(gen, scenarios, sim::standard_methods(cfg.methods, eo), sc);

    fs::create_directories(cfg.out);
    const fs::path out(cfg.out);
    write_file(out / "summary.csv", sim::summary_csv(summary));
    const std::string table = sim::summary_table(summary);
    write_file(out / "summary.txt", table);
    if (cfg.plots) write_file(out / "summary.svg", svg::study_bars(summary));
    std::cout << table;

    for (const auto& r : summary.rows)
        if (!r.valid) return kPartial;
    return kOk;
}

int cmd_ti(const io::RunConfig& cfg, CLI::App* app, double beta0, double beta1) {
    ArrheniusLine line;
    if (app->count("--beta0") && app->count("--beta1")) {
        line = {beta0, beta1};
    } else if (app->count("--beta0") || app->count("--beta1")) {
        throw Error("--beta0 and --beta1 must be given together");
    } else {
        line = sim::GeneratorSpec::preset(sim::parse_setting(cfg.setting)).true_line(cfg.p);
    }
    const double ti = ti_from_line(line, cfg.target_time);
    std::printf("beta0 %.6f  beta1 %.3f  target %g h  TI %.2f C\n", line.beta0, line.beta1, cfg.target_time, ti);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal index estimation from accelerated destructive degradation tests"};
    app.require_subcommand(1);

    Flags fit_flags, sim_flags, ti_flags;
    auto common = [](CLI::App* sub, Flags& f) {
        f.add(sub, "method", "tm, pm, spm, a comma list, or all");
        f.add(sub, "p", "failure threshold as a fraction of the initial level");
        f.add(sub, "target-time", "target time in hours");
        f.add(sub, "include-baseline", "use time-0 rows in the likelihood (true/false)");
        f.add(sub, "knots", "interior knots of the monotone spline");
        f.add(sub, "out", "output directory");
        sub->add_option("--config", f.config, "key=value file; flags override it")->check(CLI::ExistingFile);
        sub->add_flag("--no-plots", f.no_plots, "skip SVG output");
    };

    std::string input;
    CLI::App* fit = app.add_subcommand("fit", "fit TM, PM and SPM to a CSV file");
    fit->add_option("input", input, "CSV with header temp_c,time_hours,response")->required();
    common(fit, fit_flags);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the estimators");
    common(simulate, sim_flags);
    sim_flags.add(simulate, "setting", "data-generating model: I or II");
    sim_flags.add(simulate, "scenario", "test plans 1..8, comma separated, or all");
    sim_flags.add(simulate, "reps", "replicates per scenario");
    sim_flags.add(simulate, "seed", "random seed");
    sim_flags.add(simulate, "workers", "worker threads (default ADDT_WORKERS or 1)");

    double beta0 = 0.0, beta1 = 0.0;
    CLI::App* ti = app.add_subcommand("ti", "TI from a temperature-time line or a simulation setting");
    ti->add_option("--beta0", beta0, "intercept of log10 time on 1/(T + 273.16)");
    ti->add_option("--beta1", beta1, "slope");
    ti_flags.add(ti, "p", "failure threshold fraction (setting lines only)");
    ti_flags.add(ti, "target-time", "target time in hours");
    ti_flags.add(ti, "setting", "use the true line of simulation setting I or II");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kHardError;
    }

    try {
        if (*fit) {
            const auto cfg = fit_flags.resolve(fit);
            cfg.validate();
            return cmd_fit(cfg, input);
        }
        if (*simulate) {
            const auto cfg = sim_flags.resolve(simulate);
            cfg.validate();
            return cmd_simulate(cfg);
        }
        const auto cfg = ti_flags.resolve(ti);
        cfg.validate();
        return cmd_ti(cfg, ti, beta0, beta1);
    } catch (const DomainError& e) {
        std::cerr << "addt: usage: " << e.what() << '\n';
        return kHardError;
    } catch (const std::exception& e) {
        std::cerr << "addt: " << e.what() << '\n';
        return kHardError;
    }
}
