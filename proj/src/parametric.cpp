#include "addt/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "addt/traditional.hpp"

namespace addt::parametric {

namespace {

constexpr double kNu1Scale = 1e4;
const double kLn10 = std::log(10.0);

double path_fraction(double t, double eta_x, double gamma) {
    if (t == 0.0) return 1.0;
    return 1.0 / (1.0 + std::pow(t / eta_x, gamma));
}

}  // namespace

double mu(double t, double x, const Params& p) {
    if (!(t >= 0.0)) throw DomainError("time must be >= 0");
    return p.alpha * path_fraction(t, eta(x, p.nu0, p.nu1), p.gamma);
}

double loglik(const Dataset& d, const Params& p, bool include_baseline) {
    double total = 0.0;
    std::vector<double> r;
    for (const auto& level : d.levels()) {
        for (const auto& b : level.batches) {
            const double m = mu(b.time, level.x, p);
            r.clear();
            for (double y : b.responses) r.push_back(y - m);
            total += num::cs_logpdf(r, p.sigma, p.rho);
        }
    }
    if (include_baseline && !d.baseline().empty()) {
        r.clear();
        for (double y : d.baseline()) r.push_back(y - p.alpha);
        total += num::cs_logpdf(r, p.sigma, p.rho);
    }
    return total;
}

ProfileObjective::ProfileObjective(const Dataset& d, const FitOptions& opts) : rho_max_(opts.rho_max) {
    auto add = [&](const std::vector<double>& ys, double t, double x) {
        num::BatchStats s;
        s.n = static_cast<double>(ys.size());
        s.mean = std::accumulate(ys.begin(), ys.end(), 0.0) / s.n;
        for (double y : ys) s.within_ss += (y - s.mean) * (y - s.mean);
        stats_.push_back(s);
        times_.push_back(t);
        xs_.push_back(x);
        n_total_ += s.n;
    };
    double xsum = 0.0;
    for (const auto& level : d.levels()) {
        xsum += level.x;
        for (const auto& b : level.batches) add(b.responses, b.time, level.x);
    }
    if (opts.include_baseline && !d.baseline().empty())
        add(d.baseline(), 0.0, std::numeric_limits<double>::quiet_NaN());
    x_center_ = xsum / static_cast<double>(d.level_count());

    double scale = 0.0;
    for (const auto& s : stats_) scale = std::max(scale, std::abs(s.mean));
    var_floor_ = 1e-20 * scale * scale;
    rho_free_ = std::any_of(stats_.begin(), stats_.end(), [](const auto& s) { return s.n > 1.0; });
}

ProfileObjective::Inner ProfileObjective::at_rho(const std::vector<double>& h, double rho) const {
    double num = 0.0, den = 0.0, within = 0.0;
    for (std::size_t b = 0; b < stats_.size(); ++b) {
        const auto& s = stats_[b];
        const double w = num::cs_mean_weight(s.n, rho);
        num += w * s.mean * h[b];
        den += w * h[b] * h[b];
        within += s.within_ss;
    }
    Inner in{num / den, 0.0, rho, 0.0};
    double q = within / (1.0 - rho);
    for (std::size_t b = 0; b < stats_.size(); ++b) {
        const auto& s = stats_[b];
        const double dev = s.mean - in.alpha * h[b];
        q += num::cs_mean_weight(s.n, rho) * dev * dev;
    }
    in.sigma2 = std::max(q / n_total_, var_floor_);
    in.loglik = -0.5 * (n_total_ * std::log(2.0 * std::numbers::pi * in.sigma2) +
                        num::cs_logdet_correlation(stats_, rho) + q / in.sigma2);
    return in;
}

ProfileObjective::Inner ProfileObjective::solve_inner(double nu0, double nu1, double gamma) const {
    std::vector<double> h(stats_.size());
    for (std::size_t b = 0; b < stats_.size(); ++b)
        h[b] = std::isnan(xs_[b]) ? 1.0 : path_fraction(times_[b], eta(xs_[b], nu0, nu1), gamma);
    if (!rho_free_) return at_rho(h, 0.0);
    const auto best = num::minimize_scalar([&](double rho) { return -at_rho(h, rho).loglik; }, 0.0,
                                           rho_max_, 1e-9);
    return at_rho(h, best.x);
}

double ProfileObjective::operator()(std::span<const double> z) const {
    const double nu1 = z[1] * kNu1Scale;
    const double nu0 = z[0] - nu1 * x_center_;
    const double gamma = std::exp(z[2]);
    if (!std::isfinite(nu0) || !std::isfinite(gamma) || gamma > 1e3)
        return std::numeric_limits<double>::infinity();
    const auto in = solve_inner(nu0, nu1, gamma);
    if (!(in.alpha > 0.0) || !std::isfinite(in.loglik)) return std::numeric_limits<double>::infinity();
    return -in.loglik;
}

Params ProfileObjective::expand(std::span<const double> z) const {
    Params p;
    p.nu1 = z[1] * kNu1Scale;
    p.nu0 = z[0] - p.nu1 * x_center_;
    p.gamma = std::exp(z[2]);
    const auto in = solve_inner(p.nu0, p.nu1, p.gamma);
    p.alpha = in.alpha;
    p.sigma = std::sqrt(in.sigma2);
    p.rho = in.rho;
    return p;
}

std::vector<double> ProfileObjective::internal(double nu0, double nu1, double gamma) const {
    return {nu0 + nu1 * x_center_, nu1 / kNu1Scale, std::log(gamma)};
}

namespace {

struct Seed {
    double nu0, nu1, gamma;
};

// (nu0, nu1) from per-batch implied scale factors: inverting the path at each
// batch mean with a fixed shape gives log eta = log t - log(alpha / ybar - 1) / gamma.
std::optional<std::pair<double, double>> implied_scale_line(const Dataset& d, double alpha,
                                                            double gamma) {
    std::vector<double> xs, logeta;
    for (const auto& level : d.levels()) {
        double sum = 0.0;
        int count = 0;
        for (const auto& b : level.batches) {
            const double frac = b.mean() / alpha;
            if (frac <= 0.05 || frac >= 0.95) continue;
            sum += std::log(b.time) - std::log(1.0 / frac - 1.0) / gamma;
            ++count;
        }
        if (count == 0) continue;
        xs.push_back(level.x);
        logeta.push_back(sum / count);
    }
    if (xs.size() < 2) return std::nullopt;
    const auto line = traditional::fit_line(xs, logeta);
    return std::make_pair(line.beta0, line.beta1);
}

}  // namespace

FitReport fit_parametric(const Dataset& d, const FitOptions& opts) {
    if (d.level_count() < 2) throw InsufficientLevels("parametric fit needs at least two temperature levels");
    if (d.observation_count() < 7) throw FitError("parametric fit needs at least 7 observations");

    double alpha0 = 0.0;
    if (!d.baseline().empty()) {
        alpha0 = initial_level(d);
    } else {
        for (const auto& level : d.levels())
            for (const auto& b : level.batches) alpha0 = std::max(alpha0, b.mean());
    }

    const ProfileObjective objective(d, opts);
    const double xc = objective.x_center();

    std::optional<std::pair<double, double>> tm_line;
    try {
        const auto tm = traditional::fit_traditional(d, 0.5, 1e5, alpha0);
        tm_line = std::make_pair(tm.result.line.beta0 * kLn10, tm.result.line.beta1 * kLn10);
    } catch (const Error&) {
    }

    std::vector<Seed> seeds;
    for (double g0 : {1.0, 2.0}) {
        auto implied = implied_scale_line(d, alpha0, g0);
        if (!implied) {
            // Nothing to invert: a typical activation slope through the
            // longest observed time at the coolest level.
            const double nu1 = 12000.0;
            const auto& cool = d.levels().front();
            implied = std::make_pair(std::log(2.0 * cool.max_time()) - nu1 * cool.x, nu1);
        }
        auto pivot = [&](double nu0, double nu1, double factor) {
            const double c = nu0 + nu1 * xc;
            return Seed{c - factor * nu1 * xc, factor * nu1, g0};
        };
        const auto [n0, n1] = *implied;
        seeds.push_back({n0, n1, g0});
        if (tm_line && tm_line->second > 0.0)
            seeds.push_back({tm_line->first, tm_line->second, g0});
        else
            seeds.push_back(pivot(n0, n1, 0.85));
        seeds.push_back(pivot(n0, n1, 0.7));
        seeds.push_back(pivot(n0, n1, 1.4));
    }
    seeds.resize(std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(std::max(1, opts.starts))));

    num::MinimizeOptions mo;
    mo.step = {0.3, 0.1, 0.3};
    mo.max_evals = opts.max_evals;

    FitReport best;
    bool have = false;
    int total_evals = 0;
    for (const auto& s : seeds) {
        const auto z0 = objective.internal(s.nu0, s.nu1, s.gamma);
        if (!std::isfinite(objective(z0))) continue;
        const auto res = num::minimize(objective, z0, mo);
        total_evals += res.evals;
        if (!std::isfinite(res.value)) continue;
        if (!have || -res.value > best.loglik) {
            best.params = objective.expand(res.x);
            best.loglik = -res.value;
            best.converged = res.converged;
            have = true;
        }
    }
    if (!have) throw FitError("parametric fit: no start produced a finite likelihood");

    best.n_evals = total_evals;
    best.loglik = loglik(d, best.params, opts.include_baseline);
    best.aic = 2.0 * 6.0 - 2.0 * best.loglik;
    return best;
}

ArrheniusLine line_parametric(const Params& p, double fraction) {
    check_fraction(fraction);
    if (!(p.gamma > 0.0)) throw DomainError("shape parameter must be positive");
    return {p.nu0 / kLn10 + std::log((1.0 - fraction) / fraction) / (p.gamma * kLn10), p.nu1 / kLn10};
}

TIResult ti_parametric(const Params& p, double fraction, double target_time) {
    return make_ti_result(line_parametric(p, fraction), target_time, Method::PM);
}

}  // namespace addt::parametric
