#pragma once

// Semiparametric degradation model: a monotone spline baseline path g at the
// hottest level, with every other level running on an Arrhenius-scaled clock
//   mu(t; x) = g(t / exp(beta (x - x_max))).

#include <optional>
#include <string>
#include <vector>

#include "addt/core.hpp"

namespace addt::semiparametric {

/// Cubic I-spline basis on [0, upper]: I_l(u) = sum_{m >= l} B_m(u) over the
/// clamped cubic B-splines B_0..B_{K+3}, for l = 1..K+3. Every I_l rises
/// monotonically from 0 at u = 0 to 1 at u = upper.
class ISplineBasis {
public:
    ISplineBasis() = default;
    /// Interior knots outside (0, upper) and duplicates are dropped.
    ISplineBasis(std::vector<double> interior_knots, double upper);

    std::size_t size() const { return interior_.size() + 3; }
    double upper() const { return upper_; }
    const std::vector<double>& interior_knots() const { return interior_; }

    /// Values of all I_l at u (clamped to [0, upper]).
    std::vector<double> evaluate(double u) const;
    void evaluate(double u, std::vector<double>& out) const;

private:
    std::vector<double> interior_;
    std::vector<double> knots_;  // full clamped knot vector
    double upper_ = 1.0;
};

/// g(u) = g0 - sum_l coeffs_l I_l(u) with coeffs >= 0, hence nonincreasing.
struct MonotoneSpline {
    ISplineBasis basis;
    double g0 = 0.0;
    std::vector<double> coeffs;

    double operator()(double u) const;
    double lowest() const;  // g(upper)
};

/// t / exp(beta (x - x_max)).
double scaled_time(double t, double x, double beta, double x_max);

double spline_eval(const MonotoneSpline& s, double u);

/// Smallest u in [0, upper] with g(u) <= y, bisected to 1e-12 * upper.
/// Empty when y lies outside [g(upper), g0].
std::optional<double> spline_inverse(const MonotoneSpline& s, double y);

struct SemiparamModel {
    MonotoneSpline spline;
    double beta = 0.0;  // Kelvin
    double sigma = 0.0;
    double rho = 0.0;
    double x_max = 0.0;

    double mean(double t, double x) const { return spline(scaled_time(t, x, beta, x_max)); }
};

struct FitOptions {
    bool include_baseline = true;
    std::vector<double> knot_quantiles{0.2, 0.4, 0.6, 0.8};
    double beta_max = 40000.0;
    double rho_max = 0.9;
    int max_iterations = 200;
    double rel_tol = 1e-8;
    int beta_grid = 81;  // coarse scan used to start the outer loop
};

struct SemiparamFit {
    SemiparamModel model;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double aic = 0.0;  // k = (#coeffs + 1) + 3
    /// Log-likelihood after every conditional-maximization step, in order.
    std::vector<double> trace;
    std::vector<std::string> warnings;
};

/// Exact log-likelihood of the model (compound-symmetric normal per batch).
double loglik(const Dataset& d, const SemiparamModel& m, bool include_baseline = true);

/// Knots at the given quantiles of the pooled positive scaled times.
std::vector<double> quantile_knots(const std::vector<double>& scaled, const std::vector<double>& probs);

/// Iterative conditional maximization:
///  (a) spline coefficients by nonnegative weighted least squares given beta,
///      with knots refreshed from the current scaled times,
///  (b) beta by a 1-D search of the likelihood profiled over the coefficients,
///  (c) sigma in closed form and rho by a 1-D search given the fitted means.
/// Stops when the relative log-likelihood gain drops below rel_tol.
SemiparamFit fit_semiparametric(const Dataset& d, const FitOptions& opts = {});

/// beta0 = log10(g^{-1}(p g0)) - beta x_max / ln 10, beta1 = beta / ln 10.
/// Throws ThresholdNotReached if p g0 is below the fitted range of g.
ArrheniusLine line_semiparametric(const SemiparamModel& m, double fraction);
TIResult ti_semiparametric(const SemiparamModel& m, double fraction, double target_time);

}  // namespace addt::semiparametric
