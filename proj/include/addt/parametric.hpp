#pragma once

// Maximum likelihood fit of the sigmoidal degradation path
//   mu(t; x) = alpha / (1 + (t / eta(x))^gamma),  eta(x) = exp(nu0 + nu1 x)
// with compound-symmetric Gaussian errors inside each (temperature, time) batch.

#include <cmath>
#include <span>
#include <vector>

#include "addt/core.hpp"
#include "addt/numkit.hpp"

namespace addt::parametric {

struct Params {
    double nu0 = 0.0;
    double nu1 = 0.0;    // Kelvin
    double alpha = 0.0;  // initial level
    double gamma = 1.0;
    double sigma = 1.0;
    double rho = 0.0;
};

inline double eta(double x, double nu0, double nu1) { return std::exp(nu0 + nu1 * x); }

/// Mean degradation path. Throws DomainError for t < 0.
double mu(double t, double x, const Params& p);

/// Exact log-likelihood: sum over batches of the compound-symmetric normal
/// log density. Baseline rows, when included, form one batch with mean alpha.
double loglik(const Dataset& d, const Params& p, bool include_baseline = true);

struct FitOptions {
    bool include_baseline = true;
    int starts = 8;
    double rho_max = 0.9;
    int max_evals = 100000;
};

struct FitReport {
    Params params;
    double loglik = 0.0;
    bool converged = false;
    int n_evals = 0;
    double aic = 0.0;  // 2 * 6 - 2 * loglik
};

/// The negative log-likelihood with alpha, sigma and rho maximized out, as a
/// function of the internal coordinates (log eta at the mean reciprocal
/// temperature, nu1 / 1e4, log gamma). This is what the optimizer descends.
class ProfileObjective {
public:
    ProfileObjective(const Dataset& d, const FitOptions& opts);

    double operator()(std::span<const double> z) const;
    /// Full parameter vector at internal point z (profiled values filled in).
    Params expand(std::span<const double> z) const;
    std::vector<double> internal(double nu0, double nu1, double gamma) const;

    double x_center() const { return x_center_; }

private:
    struct Inner {
        double alpha, sigma2, rho, loglik;
    };
    Inner solve_inner(double nu0, double nu1, double gamma) const;
    Inner at_rho(const std::vector<double>& h, double rho) const;

    std::vector<num::BatchStats> stats_;
    std::vector<double> times_;
    std::vector<double> xs_;  // NaN marks baseline batches (h = 1)
    double n_total_ = 0.0;
    double x_center_ = 0.0;
    double var_floor_ = 0.0;
    double rho_max_ = 0.9;
    bool rho_free_ = true;
};

/// Multistart Nelder-Mead maximization of the likelihood.
/// Needs at least two temperature levels and more observations than parameters.
FitReport fit_parametric(const Dataset& d, const FitOptions& opts = {});

/// Temperature-time line for threshold fraction p and the resulting TI:
///   beta0 = nu0 / ln 10 + ln((1-p)/p) / (gamma ln 10),  beta1 = nu1 / ln 10.
TIResult ti_parametric(const Params& p, double fraction, double target_time);
ArrheniusLine line_parametric(const Params& p, double fraction);

}  // namespace addt::parametric
