#pragma once

// Numerical kernels shared by the estimators.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "addt/core.hpp"

namespace addt::num {

/// Coefficients a0 + a1 t + a2 t^2 + a3 t^3 (lowest order first).
struct PolyFit {
    std::vector<double> coeffs;

    double operator()(double t) const;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// The least-squares design does not determine every coefficient; callers
/// retry with a lower degree.
class RankDeficient : public DomainError {
public:
    using DomainError::DomainError;
};

/// Ordinary least squares polynomial of the given degree (0..3). Needs at
/// least degree + 1 distinct abscissae.
PolyFit fit_polynomial(std::span<const double> t, std::span<const double> y, int degree);

/// Earliest root of f(t) = target on [lo, hi]. The bracket is scanned on a
/// uniform grid of `cells` cells for the first sign change of f - target,
/// then bisected until the interval is below rel_tol * (hi - lo).
/// Returns nullopt when f - target never changes sign (not reached).
std::optional<double> solve_crossing(const std::function<double(double)>& f, double target,
                                     double lo, double hi, int cells = 1024,
                                     double rel_tol = 1e-9);

/// Box constraint applied through a smooth change of variables.
struct Bound {
    enum class Kind { Free, Positive, Interval };
    Kind kind = Kind::Free;
    double lo = 0.0;
    double hi = 0.0;

    static Bound free() { return {}; }
    static Bound positive() { return {Kind::Positive, 0.0, 0.0}; }
    static Bound interval(double lo, double hi) { return {Kind::Interval, lo, hi}; }

    double to_internal(double v) const;
    double to_external(double z) const;
};

struct MinimizeOptions {
    std::vector<Bound> bounds;  // empty: all free
    std::vector<double> step;   // initial simplex edge per coordinate, internal scale
    double xtol = 1e-8;         // simplex diameter, relative
    double ftol = 1e-12;        // spread of simplex values, relative
    int max_evals = 100000;
    int max_restarts = 3;
};

struct MinimizeResult {
    std::vector<double> x;  // external (constrained) coordinates
    double value = 0.0;
    int evals = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex descent. Bounds are enforced by reparameterization
/// (log for positive, scaled logistic for intervals); the simplex lives in
/// the unconstrained space. Non-finite values inside the run count as +inf.
/// Throws DomainError if the objective is not finite at `start`.
MinimizeResult minimize(const Objective& f, std::vector<double> start,
                        const MinimizeOptions& opts = {});

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
    int evals = 0;
};

/// Brent's derivative-free minimizer on [lo, hi] (golden section with
/// parabolic steps).
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-10, int max_iter = 200);

/// Nonnegative least squares, min |A x - b| subject to x >= 0, by the
/// Lawson-Hanson active-set method. Entering variables are chosen by largest
/// dual value with ties going to the smallest index.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

/// Log density of one batch of residuals under N(0, sigma^2[(1-rho)I + rho J]).
/// Closed form; throws DomainError unless sigma > 0, 1 - rho > 0 and
/// 1 + (n-1) rho > 0.
double cs_logpdf(std::span<const double> residuals, double sigma, double rho);

/// Batch summary used by the estimators' concentrated likelihoods: for a batch
/// of size n with mean ybar and within sum of squares W, the compound-symmetric
/// quadratic form for a common fitted value mu is
///   W / (1 - rho) + n (ybar - mu)^2 / (1 + (n-1) rho)      (unit sigma).
struct BatchStats {
    double n = 0.0;
    double mean = 0.0;
    double within_ss = 0.0;
};

/// Weight n / (1 + (n-1) rho) multiplying (ybar - mu)^2 in the quadratic form.
inline double cs_mean_weight(double n, double rho) { return n / (1.0 + (n - 1.0) * rho); }

/// sum_b [(n_b - 1) log(1 - rho) + log(1 + (n_b - 1) rho)], the correlation part of log|Sigma|.
double cs_logdet_correlation(std::span<const BatchStats> batches, double rho);

}  // namespace addt::num
