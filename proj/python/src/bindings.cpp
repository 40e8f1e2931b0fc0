#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "addt/core.hpp"
#include "addt/io.hpp"
#include "addt/numkit.hpp"
#include "addt/parametric.hpp"
#include "addt/semiparametric.hpp"
#include "addt/simstudy.hpp"
#include "addt/traditional.hpp"

namespace py = pybind11;
using namespace addt;

namespace {

using Row = std::tuple<std::optional<double>, double, double>;

Dataset to_dataset(const std::vector<Row>& rows) {
    std::vector<Measurement> m;
    m.reserve(rows.size());
    for (const auto& [temp, time, response] : rows) m.push_back({temp, time, response});
    return Dataset::from_measurements(std::move(m));
}

std::vector<Row> to_rows(const Dataset& d) {
    std::vector<Row> out;
    for (const auto& m : d.measurements()) out.emplace_back(m.temp_c, m.time, m.response);
    return out;
}

py::dict line_dict(const TIResult& r) {
    py::dict out;
    out["beta0"] = r.line.beta0;
    out["beta1"] = r.line.beta1;
    out["ti"] = r.ti;
    return out;
}

std::vector<Method> methods_from(const std::string& s) { return io::parse_methods(s); }

}  // namespace

PYBIND11_MODULE(_addt, m) {
    m.doc() = "Thermal index estimation from accelerated destructive degradation tests";

    // Base first: pybind11 tries the most recently registered translator first.
    const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<InsufficientLevels>(m, "InsufficientLevels", base);
    py::register_exception<ThresholdNotReached>(m, "ThresholdNotReached", base);
    py::register_exception<FitError>(m, "FitError", base);

    m.def("celsius_to_x", &celsius_to_x, py::arg("celsius"));
    m.def("x_to_celsius", &x_to_celsius, py::arg("x"));
    m.def(
        "ti_from_line", [](double b0, double b1, double td) { return ti_from_line({b0, b1}, td); },
        py::arg("beta0"), py::arg("beta1"), py::arg("target_time") = 1e5);
    m.def(
        "cs_logpdf", [](const std::vector<double>& r, double sigma, double rho) { return num::cs_logpdf(r, sigma, rho); },
        py::arg("residuals"), py::arg("sigma"), py::arg("rho"));

    m.def(
        "read_csv",
        [](const std::string& text) {
            std::istringstream in(text);
            return to_rows(io::parse_csv(in));
        },
        py::arg("text"), "Validate CSV text and return (temp_c, time_hours, response) rows.");
    m.def(
        "to_csv", [](const std::vector<Row>& rows) { return io::to_csv(to_dataset(rows)); }, py::arg("rows"));

    m.def(
        "fit_traditional",
        [](const std::vector<Row>& rows, double p, double td) {
            const auto fit = traditional::fit_traditional(to_dataset(rows), p, td);
            py::dict out = line_dict(fit.result);
            out["discarded_temps"] = fit.discarded_temps;
            out["y_f"] = fit.y_f;
            return out;
        },
        py::arg("rows"), py::arg("p") = 0.5, py::arg("target_time") = 1e5);

    m.def(
        "fit_parametric",
        [](const std::vector<Row>& rows, double p, double td, bool include_baseline) {
            parametric::FitOptions fo;
            fo.include_baseline = include_baseline;
            const auto fit = parametric::fit_parametric(to_dataset(rows), fo);
            py::dict out = line_dict(parametric::ti_parametric(fit.params, p, td));
            const auto& q = fit.params;
            out["params"] = py::dict(py::arg("nu0") = q.nu0, py::arg("nu1") = q.nu1, py::arg("alpha") = q.alpha,
                                     py::arg("gamma") = q.gamma, py::arg("sigma") = q.sigma, py::arg("rho") = q.rho);
            out["loglik"] = fit.loglik;
            out["aic"] = fit.aic;
            out["converged"] = fit.converged;
            return out;
        },
        py::arg("rows"), py::arg("p") = 0.5, py::arg("target_time") = 1e5, py::arg("include_baseline") = true);

    m.def(
        "fit_semiparametric",
        [](const std::vector<Row>& rows, double p, double td, bool include_baseline, int knots) {
            semiparametric::FitOptions fo;
            fo.include_baseline = include_baseline;
            fo.knot_quantiles.clear();
            for (int k = 1; k <= knots; ++k) fo.knot_quantiles.push_back(static_cast<double>(k) / (knots + 1));
            const auto fit = semiparametric::fit_semiparametric(to_dataset(rows), fo);
            py::dict out = line_dict(semiparametric::ti_semiparametric(fit.model, p, td));
            out["beta"] = fit.model.beta;
            out["g0"] = fit.model.spline.g0;
            out["coeffs"] = fit.model.spline.coeffs;
            out["knots"] = fit.model.spline.basis.interior_knots();
            out["sigma"] = fit.model.sigma;
            out["rho"] = fit.model.rho;
            out["loglik"] = fit.loglik;
            out["aic"] = fit.aic;
            out["converged"] = fit.converged;
            out["trace"] = fit.trace;
            return out;
        },
        py::arg("rows"), py::arg("p") = 0.5, py::arg("target_time") = 1e5, py::arg("include_baseline") = true,
        py::arg("knots") = 4);

    m.def(
        "analyze_json",
        [](const std::vector<Row>& rows, const std::string& method, double p, double td, bool include_baseline,
           int knots) {
            io::RunConfig cfg;
            cfg.methods = methods_from(method);
            cfg.p = p;
            cfg.target_time = td;
            cfg.include_baseline = include_baseline;
            cfg.knots = knots;
            cfg.validate();
            return io::report_to_json(io::analyze(to_dataset(rows), cfg).report);
        },
        py::arg("rows"), py::arg("method") = "all", py::arg("p") = 0.5, py::arg("target_time") = 1e5,
        py::arg("include_baseline") = true, py::arg("knots") = 4);

    m.def(
        "true_ti",
        [](const std::string& setting, double p, double td) {
            return sim::GeneratorSpec::preset(sim::parse_setting(setting)).true_ti(p, td);
        },
        py::arg("setting"), py::arg("p") = 0.5, py::arg("target_time") = 1e5);

    m.def(
        "simulate_dataset",
        [](const std::string& setting, int scenario, std::uint64_t seed, std::uint32_t replicate) {
            const auto g = sim::GeneratorSpec::preset(sim::parse_setting(setting));
            return to_rows(sim::simulate_dataset(g, sim::ScenarioSpec::preset(scenario), seed, replicate));
        },
        py::arg("setting"), py::arg("scenario"), py::arg("seed"), py::arg("replicate") = 0);

    m.def(
        "run_study_csv",
        [](const std::string& setting, const std::vector<int>& scenarios, int reps, std::uint64_t seed, int workers,
           const std::string& method) {
            const auto g = sim::GeneratorSpec::preset(sim::parse_setting(setting));
            std::vector<sim::ScenarioSpec> scen;
            for (int id : scenarios) scen.push_back(sim::ScenarioSpec::preset(id));
            sim::StudyConfig cfg;
            cfg.n_reps = reps;
            cfg.seed = seed;
            cfg.workers = workers;
            const auto methods = sim::standard_methods(methods_from(method));
            py::gil_scoped_release release;
            return sim::summary_csv(sim::run_study(g, scen, methods, cfg));
        },
        py::arg("setting"), py::arg("scenarios"), py::arg("reps"), py::arg("seed") = 1, py::arg("workers") = 1,
        py::arg("method") = "all");
}
