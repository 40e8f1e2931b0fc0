#include "addt/semiparametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "addt/numkit.hpp"

namespace addt::semiparametric {

namespace {
const double kLn10 = std::log(10.0);
constexpr int kOrder = 4;  // cubic B-splines
}  // namespace

ISplineBasis::ISplineBasis(std::vector<double> interior_knots, double upper) : upper_(upper) {
    if (!(upper > 0.0) || !std::isfinite(upper)) throw DomainError("spline domain must be (0, upper] with upper > 0");
    std::sort(interior_knots.begin(), interior_knots.end());
    const double eps = 1e-9 * upper;
    for (double k : interior_knots) {
        if (!(k > eps && k < upper - eps)) continue;
        if (!interior_.empty() && k - interior_.back() <= eps) continue;
        interior_.push_back(k);
    }
    knots_.assign(kOrder, 0.0);
    knots_.insert(knots_.end(), interior_.begin(), interior_.end());
    knots_.insert(knots_.end(), kOrder, upper_);
}

std::vector<double> ISplineBasis::evaluate(double u) const {
    std::vector<double> out;
    evaluate(u, out);
    return out;
}

void ISplineBasis::evaluate(double u, std::vector<double>& out) const {
    const std::size_t n_basis = interior_.size() + kOrder;
    out.assign(n_basis - 1, 0.0);
    u = std::clamp(u, 0.0, upper_);

    // knot span: knots_[span] <= u < knots_[span + 1], last span closed at upper
    std::size_t span = n_basis - 1;
    if (u < upper_) {
        span = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), u) - knots_.begin()) - 1;
        span = std::clamp<std::size_t>(span, kOrder - 1, n_basis - 1);
    }

    // Nonzero cubic B-splines B_{span-3..span} at u (Cox-de Boor triangle).
    double basis[kOrder] = {1.0, 0.0, 0.0, 0.0};
    double left[kOrder] = {}, right[kOrder] = {};
    for (int j = 1; j < kOrder; ++j) {
        left[j] = u - knots_[span + 1 - static_cast<std::size_t>(j)];
        right[j] = knots_[span + static_cast<std::size_t>(j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = basis[r] / (right[r + 1] + left[j - r]);
            basis[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        basis[j] = saved;
    }

    // I_l = sum_{m >= l} B_m, l = 1..n_basis-1, stored at out[l - 1].
    const std::size_t first = span + 1 - kOrder;
    double tail = 0.0;
    for (std::size_t l = n_basis - 1; l >= 1; --l) {
        if (l >= first && l <= span) tail += basis[l - first];
        if (l < first) tail = 1.0;
        out[l - 1] = std::min(tail, 1.0);
    }
}

double MonotoneSpline::operator()(double u) const {
    thread_local std::vector<double> vals;
    basis.evaluate(u, vals);
    double g = g0;
    for (std::size_t l = 0; l < coeffs.size(); ++l) g -= coeffs[l] * vals[l];
    return g;
}

double MonotoneSpline::lowest() const {
    return g0 - std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
}

double scaled_time(double t, double x, double beta, double x_max) {
    return t / std::exp(beta * (x - x_max));
}

double spline_eval(const MonotoneSpline& s, double u) { return s(u); }

std::optional<double> spline_inverse(const MonotoneSpline& s, double y) {
    const double top = s.g0;
    const double bottom = s(s.basis.upper());
    if (!(y <= top && y >= bottom)) return std::nullopt;
    if (y == top) return 0.0;
    double lo = 0.0, hi = s.basis.upper();
    while (hi - lo > 1e-12 * s.basis.upper()) {
        const double mid = 0.5 * (lo + hi);
        if (s(mid) <= y) hi = mid; else lo = mid;
    }
    return hi;
}

double loglik(const Dataset& d, const SemiparamModel& m, bool include_baseline) {
    double total = 0.0;
    std::vector<double> r;
    for (const auto& level : d.levels()) {
        for (const auto& b : level.batches) {
            const double mu = m.mean(b.time, level.x);
            r.clear();
            for (double y : b.responses) r.push_back(y - mu);
            total += num::cs_logpdf(r, m.sigma, m.rho);
        }
    }
    if (include_baseline && !d.baseline().empty()) {
        r.clear();
        for (double y : d.baseline()) r.push_back(y - m.spline.g0);
        total += num::cs_logpdf(r, m.sigma, m.rho);
    }
    return total;
}

std::vector<double> quantile_knots(const std::vector<double>& scaled, const std::vector<double>& probs) {
    std::vector<double> v;
    for (double s : scaled)
        if (s > 0.0) v.push_back(s);
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double p : probs) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        out.push_back(v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]));
    }
    return out;
}

namespace {

class Fitter {
public:
    Fitter(const Dataset& d, const FitOptions& opts) : opts_(opts), x_max_(d.x_max()) {
        auto add = [&](const std::vector<double>& ys, double t, double x) {
            num::BatchStats s;
            s.n = static_cast<double>(ys.size());
            s.mean = std::accumulate(ys.begin(), ys.end(), 0.0) / s.n;
            for (double y : ys) s.within_ss += (y - s.mean) * (y - s.mean);
            within_ += s.within_ss;
            n_total_ += s.n;
            stats_.push_back(s);
            times_.push_back(t);
            xs_.push_back(x);
        };
        for (const auto& level : d.levels())
            for (const auto& b : level.batches) add(b.responses, b.time, level.x);
        if (opts.include_baseline && !d.baseline().empty())
            add(d.baseline(), 0.0, std::numeric_limits<double>::quiet_NaN());
        double scale = 0.0;
        for (const auto& s : stats_) scale = std::max(scale, std::abs(s.mean));
        var_floor_ = 1e-20 * scale * scale;
        rho_free_ = std::any_of(stats_.begin(), stats_.end(), [](const auto& s) { return s.n > 1.0; });
    }

    struct State {
        double beta = 0.0;
        double rho = 0.0;
        MonotoneSpline spline;
        double sigma2 = 0.0;
        double loglik = -std::numeric_limits<double>::infinity();
    };

    double scaled(std::size_t b, double beta) const {
        return std::isnan(xs_[b]) ? 0.0 : scaled_time(times_[b], xs_[b], beta, x_max_);
    }

    ISplineBasis basis_for(double beta) const {
        std::vector<double> u;
        double upper = 0.0;
        for (std::size_t b = 0; b < stats_.size(); ++b) {
            if (std::isnan(xs_[b])) continue;
            u.push_back(scaled(b, beta));
            upper = std::max(upper, u.back());
        }
        return ISplineBasis(quantile_knots(u, opts_.knot_quantiles), upper);
    }

    // Profile log-likelihood given the squared-deviation total of batch means.
    double profile(double mean_dev, double rho, double& sigma2) const {
        const double q = within_ / (1.0 - rho) + mean_dev;
        sigma2 = std::max(q / n_total_, var_floor_);
        return -0.5 * (n_total_ * std::log(2.0 * std::numbers::pi * sigma2) +
                       num::cs_logdet_correlation(stats_, rho) + q / sigma2);
    }

    // Step (a)/(b) kernel: best coefficients for fixed beta, basis and rho.
    State solve_coeffs(double beta, const ISplineBasis& basis, double rho) const {
        const auto rows = static_cast<Eigen::Index>(stats_.size());
        const auto cols = static_cast<Eigen::Index>(basis.size() + 1);
        Eigen::MatrixXd a(rows, cols);
        Eigen::VectorXd rhs(rows);
        std::vector<double> vals;
        for (std::size_t b = 0; b < stats_.size(); ++b) {
            const auto i = static_cast<Eigen::Index>(b);
            const double sw = std::sqrt(num::cs_mean_weight(stats_[b].n, rho));
            basis.evaluate(scaled(b, beta), vals);
            a(i, 0) = sw;
            for (std::size_t l = 0; l < vals.size(); ++l) a(i, static_cast<Eigen::Index>(l + 1)) = -sw * vals[l];
            rhs(i) = sw * stats_[b].mean;
        }
        const Eigen::VectorXd v = num::nnls(a, rhs);
        State s;
        s.beta = beta;
        s.rho = rho;
        s.spline.basis = basis;
        s.spline.g0 = v(0);
        s.spline.coeffs.assign(v.data() + 1, v.data() + v.size());
        s.loglik = profile((a * v - rhs).squaredNorm(), rho, s.sigma2);
        return s;
    }

    // Step (c): rho (and sigma) with the fitted means held fixed.
    State update_rho(const State& cur) const {
        if (!rho_free_) return cur;
        std::vector<double> dev2(stats_.size());
        for (std::size_t b = 0; b < stats_.size(); ++b) {
            const double d = stats_[b].mean - cur.spline(scaled(b, cur.beta));
            dev2[b] = d * d;
        }
        auto ll = [&](double rho, double& sigma2) {
            double mean_dev = 0.0;
            for (std::size_t b = 0; b < stats_.size(); ++b) mean_dev += num::cs_mean_weight(stats_[b].n, rho) * dev2[b];
            return profile(mean_dev, rho, sigma2);
        };
        double scratch = 0.0;
        const auto best = num::minimize_scalar([&](double rho) { return -ll(rho, scratch); }, 0.0, opts_.rho_max, 1e-9);
        State next = cur;
        next.rho = best.x;
        next.loglik = ll(best.x, next.sigma2);
        return next.loglik > cur.loglik ? next : cur;
    }

    State start() const {
        State best;
        const int n = std::max(2, opts_.beta_grid);
        for (int k = 0; k < n; ++k) {
            const double beta = opts_.beta_max * k / (n - 1);
            auto s = solve_coeffs(beta, basis_for(beta), 0.0);
            if (s.loglik > best.loglik) best = std::move(s);
        }
        return best;
    }

    SemiparamFit run() {
        SemiparamFit fit;
        State cur = start();
        cur = update_rho(cur);
        fit.trace.push_back(cur.loglik);

        double window = opts_.beta_max / (std::max(2, opts_.beta_grid) - 1);
        for (int it = 1; it <= opts_.max_iterations; ++it) {
            const double before = cur.loglik;

            // (a) refresh knots at the current beta; keep the old basis when
            // the refreshed one fits worse.
            {
                auto fresh = solve_coeffs(cur.beta, basis_for(cur.beta), cur.rho);
                if (fresh.loglik >= cur.loglik) {
                    cur = std::move(fresh);
                } else {
                    auto same = solve_coeffs(cur.beta, cur.spline.basis, cur.rho);
                    if (same.loglik >= cur.loglik) cur = std::move(same);
                }
                fit.trace.push_back(cur.loglik);
            }

            // (b) beta, coefficients profiled out, basis fixed.
            {
                const auto basis = cur.spline.basis;
                const double rho = cur.rho;
                const double lo = std::max(0.0, cur.beta - window);
                const double hi = std::min(opts_.beta_max, cur.beta + window);
                const auto best = num::minimize_scalar(
                    [&](double beta) { return -solve_coeffs(beta, basis, rho).loglik; }, lo, hi,
                    1e-6 * std::max(1.0, cur.beta));
                auto cand = solve_coeffs(best.x, basis, rho);
                if (cand.loglik > cur.loglik) {
                    const bool at_edge = (best.x - lo < 1e-3 * window && lo > 0.0) ||
                                         (hi - best.x < 1e-3 * window && hi < opts_.beta_max);
                    window = at_edge ? window * 2.0 : std::max(window * 0.5, 50.0);
                    cur = std::move(cand);
                }
                fit.trace.push_back(cur.loglik);
            }

            // (c) correlation and noise scale.
            cur = update_rho(cur);
            fit.trace.push_back(cur.loglik);

            fit.iterations = it;
            if (cur.loglik - before <= opts_.rel_tol * std::max(1.0, std::abs(cur.loglik))) {
                fit.converged = true;
                break;
            }
        }

        fit.model.spline = cur.spline;
        fit.model.beta = cur.beta;
        fit.model.sigma = std::sqrt(cur.sigma2);
        fit.model.rho = cur.rho;
        fit.model.x_max = x_max_;
        return fit;
    }

private:
    FitOptions opts_;
    double x_max_;
    std::vector<num::BatchStats> stats_;
    std::vector<double> times_;
    std::vector<double> xs_;
    double within_ = 0.0;
    double n_total_ = 0.0;
    double var_floor_ = 0.0;
    bool rho_free_ = true;
};

}  // namespace

SemiparamFit fit_semiparametric(const Dataset& d, const FitOptions& opts) {
    if (d.level_count() < 2) throw InsufficientLevels("semiparametric fit needs at least two temperature levels");
    if (!(opts.beta_max > 0.0)) throw DomainError("beta search bracket must be positive");

    Fitter fitter(d, opts);
    SemiparamFit fit = fitter.run();
    if (!std::isfinite(fit.trace.back())) throw FitError("semiparametric fit: likelihood is not finite");

    fit.loglik = loglik(d, fit.model, opts.include_baseline);
    const auto k = static_cast<double>(fit.model.spline.coeffs.size() + 1 + 3);
    fit.aic = 2.0 * k - 2.0 * fit.loglik;
    if (std::all_of(fit.model.spline.coeffs.begin(), fit.model.spline.coeffs.end(),
                    [](double c) { return c == 0.0; }))
        fit.warnings.emplace_back("fitted baseline path is flat (all spline coefficients are zero)");
    if (!fit.converged) fit.warnings.emplace_back("outer iteration limit reached before convergence");
    return fit;
}

ArrheniusLine line_semiparametric(const SemiparamModel& m, double fraction) {
    check_fraction(fraction);
    const auto u = spline_inverse(m.spline, fraction * m.spline.g0);
    if (!u || !(*u > 0.0))
        throw ThresholdNotReached("fitted baseline path does not reach the threshold within the data range");
    return {std::log10(*u) - m.beta * m.x_max / kLn10, m.beta / kLn10};
}

TIResult ti_semiparametric(const SemiparamModel& m, double fraction, double target_time) {
    return make_ti_result(line_semiparametric(m, fraction), target_time, Method::SPM);
}

}  // namespace addt::semiparametric
