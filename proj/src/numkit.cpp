#include "addt/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace addt::num {

double PolyFit::operator()(double t) const {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
    return v;
}

PolyFit fit_polynomial(std::span<const double> t, std::span<const double> y, int degree) {
    if (degree < 0 || degree > 3) throw DomainError("polynomial degree must be 0..3");
    if (t.size() != y.size()) throw DomainError("abscissa and ordinate lengths differ");
    const auto n = static_cast<Eigen::Index>(t.size());
    const int ncoef = degree + 1;
    if (n < ncoef) {
        std::ostringstream msg;
        msg << "degree " << degree << " fit needs " << ncoef << " points, got " << n;
        throw DomainError(msg.str());
    }

    // Columns in powers of t / scale keep the cubic design well conditioned
    // for times in the thousands of hours.
    double scale = 0.0;
    for (double v : t) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    Eigen::MatrixXd design(n, ncoef);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = t[static_cast<std::size_t>(i)] / scale;
        double pw = 1.0;
        for (int k = 0; k < ncoef; ++k) {
            design(i, k) = pw;
            pw *= u;
        }
        rhs(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < ncoef) throw RankDeficient("polynomial design is rank deficient");
    const Eigen::VectorXd c = qr.solve(rhs);

    PolyFit fit;
    fit.coeffs.resize(static_cast<std::size_t>(ncoef));
    double pw = 1.0;
    for (int k = 0; k < ncoef; ++k) {
        fit.coeffs[static_cast<std::size_t>(k)] = c(k) / pw;
        pw *= scale;
    }
    return fit;
}

std::optional<double> solve_crossing(const std::function<double(double)>& f, double target,
                                     double lo, double hi, int cells, double rel_tol) {
    if (!(hi > lo) || cells < 1) throw DomainError("crossing bracket must satisfy lo < hi");
    auto g = [&](double t) { return f(t) - target; };

    const double width = hi - lo;
    double a = lo;
    double ga = g(a);
    if (ga == 0.0) return a;
    for (int i = 1; i <= cells; ++i) {
        const double b = (i == cells) ? hi : lo + width * static_cast<double>(i) / cells;
        const double gb = g(b);
        if (gb == 0.0) return b;
        if ((ga < 0.0) != (gb < 0.0)) {
            double left = a, right = b, gl = ga;
            while (right - left > rel_tol * width) {
                const double mid = 0.5 * (left + right);
                const double gm = g(mid);
                if (gm == 0.0) return mid;
                if ((gl < 0.0) == (gm < 0.0)) {
                    left = mid;
                    gl = gm;
                } else {
                    right = mid;
                }
            }
            return 0.5 * (left + right);
        }
        a = b;
        ga = gb;
    }
    return std::nullopt;
}

double Bound::to_internal(double v) const {
    switch (kind) {
        case Kind::Free: return v;
        case Kind::Positive:
            if (!(v > 0.0)) throw DomainError("start value violates positivity bound");
            return std::log(v);
        case Kind::Interval: {
            if (!(v > lo && v < hi)) throw DomainError("start value outside open interval bound");
            const double u = (v - lo) / (hi - lo);
            return std::log(u / (1.0 - u));
        }
    }
    return v;
}

double Bound::to_external(double z) const {
    switch (kind) {
        case Kind::Free: return z;
        case Kind::Positive: return std::exp(z);
        case Kind::Interval: return lo + (hi - lo) / (1.0 + std::exp(-z));
    }
    return z;
}

namespace {

struct Simplex {
    std::vector<std::vector<double>> v;
    std::vector<double> f;
};

}  // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> start, const MinimizeOptions& opts) {
    const std::size_t dim = start.size();
    if (dim == 0) throw DomainError("minimize needs at least one coordinate");
    if (!opts.bounds.empty() && opts.bounds.size() != dim)
        throw DomainError("bounds length does not match start");
    if (!opts.step.empty() && opts.step.size() != dim)
        throw DomainError("step length does not match start");

    auto bound = [&](std::size_t i) { return opts.bounds.empty() ? Bound{} : opts.bounds[i]; };

    std::vector<double> z(dim);
    for (std::size_t i = 0; i < dim; ++i) z[i] = bound(i).to_internal(start[i]);

    int evals = 0;
    std::vector<double> ext(dim);
    auto eval = [&](const std::vector<double>& zz) {
        for (std::size_t i = 0; i < dim; ++i) ext[i] = bound(i).to_external(zz[i]);
        ++evals;
        const double v = f(ext);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    if (!std::isfinite(f(start))) throw DomainError("objective is not finite at the start point");

    auto make_simplex = [&](const std::vector<double>& base, double fbase) {
        Simplex s;
        s.v.assign(dim + 1, base);
        s.f.assign(dim + 1, fbase);
        for (std::size_t i = 0; i < dim; ++i) {
            double h = opts.step.empty() ? (base[i] != 0.0 ? 0.05 * std::abs(base[i]) : 0.00025)
                                         : opts.step[i];
            s.v[i + 1][i] += h;
            s.f[i + 1] = eval(s.v[i + 1]);
        }
        return s;
    };

    std::vector<double> best = z;
    double fbest = eval(z);
    bool converged = false;

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        Simplex s = make_simplex(best, fbest);
        std::vector<std::size_t> order(dim + 1);
        std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
        bool run_converged = false;

        while (evals < opts.max_evals) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
            const std::size_t lo = order.front(), hi = order.back(), nh = order[dim - 1];

            double diam = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < dim; ++i) scale = std::max(scale, std::abs(s.v[lo][i]));
            for (std::size_t k = 0; k <= dim; ++k)
                for (std::size_t i = 0; i < dim; ++i)
                    diam = std::max(diam, std::abs(s.v[k][i] - s.v[lo][i]));
            const double spread = s.f[hi] - s.f[lo];
            if (diam <= opts.xtol * scale &&
                spread <= opts.ftol * std::max(1.0, std::abs(s.f[lo]))) {
                run_converged = true;
                break;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k <= dim; ++k) {
                if (k == hi) continue;
                for (std::size_t i = 0; i < dim; ++i) centroid[i] += s.v[k][i];
            }
            for (double& c : centroid) c /= static_cast<double>(dim);

            for (std::size_t i = 0; i < dim; ++i) xr[i] = centroid[i] + (centroid[i] - s.v[hi][i]);
            const double fr = eval(xr);
            if (fr < s.f[lo]) {
                for (std::size_t i = 0; i < dim; ++i) xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
                const double fe = eval(xe);
                if (fe < fr) {
                    s.v[hi] = xe;
                    s.f[hi] = fe;
                } else {
                    s.v[hi] = xr;
                    s.f[hi] = fr;
                }
                continue;
            }
            if (fr < s.f[nh]) {
                s.v[hi] = xr;
                s.f[hi] = fr;
                continue;
            }
            const bool outside = fr < s.f[hi];
            for (std::size_t i = 0; i < dim; ++i)
                xc[i] = outside ? centroid[i] + 0.5 * (xr[i] - centroid[i])
                                : centroid[i] + 0.5 * (s.v[hi][i] - centroid[i]);
            const double fc = eval(xc);
            if (fc < (outside ? fr : s.f[hi])) {
                s.v[hi] = xc;
                s.f[hi] = fc;
                continue;
            }
            // shrink toward the best vertex
            for (std::size_t k = 0; k <= dim; ++k) {
                if (k == lo) continue;
                for (std::size_t i = 0; i < dim; ++i)
                    s.v[k][i] = s.v[lo][i] + 0.5 * (s.v[k][i] - s.v[lo][i]);
                s.f[k] = eval(s.v[k]);
            }
        }

        const auto it = std::min_element(s.f.begin(), s.f.end());
        const auto k = static_cast<std::size_t>(it - s.f.begin());
        const double improvement = fbest - *it;
        if (*it <= fbest) {
            fbest = *it;
            best = s.v[k];
        }
        converged = run_converged;
        if (!run_converged) break;
        // A collapsed simplex can stall away from a minimum; restart from the
        // best vertex until a fresh simplex no longer improves.
        if (restart > 0 && improvement <= opts.ftol * std::max(1.0, std::abs(fbest))) break;
    }

    MinimizeResult out;
    out.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) out.x[i] = bound(i).to_external(best[i]);
    out.value = fbest;
    out.evals = evals;
    out.converged = converged;
    return out;
}

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              double tol, int max_iter) {
    if (!(hi > lo)) throw DomainError("scalar search needs lo < hi");
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
    double a = lo, b = hi;
    double x = a + golden * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    int evals = 1;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = eps * std::abs(x) + tol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool golden_step = true;
        if (std::abs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        ++evals;
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    // Brent never evaluates the end points; a minimum on the boundary is
    // common for correlation parameters.
    for (double end : {lo, hi}) {
        const double fe = f(end);
        ++evals;
        if (fe < fx) {
            x = end;
            fx = fe;
        }
    }
    return {x, fx, evals};
}

double cs_logpdf(std::span<const double> residuals, double sigma, double rho) {
    const double n = static_cast<double>(residuals.size());
    if (residuals.empty()) throw DomainError("empty batch");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    const double one_minus = 1.0 - rho;
    const double one_plus = 1.0 + (n - 1.0) * rho;
    if (n > 1.0 && !(one_minus > 0.0 && one_plus > 0.0))
        throw DomainError("compound-symmetric covariance is not positive definite");

    double s1 = 0.0, s2 = 0.0;
    for (double r : residuals) {
        s1 += r;
        s2 += r * r;
    }
    const double var = sigma * sigma;
    double logdet = n * std::log(var);
    double quad = 0.0;
    if (n > 1.0) {
        logdet += (n - 1.0) * std::log(one_minus) + std::log(one_plus);
        // Sigma^{-1} = [I - rho / (1 + (n-1) rho) J] / (sigma^2 (1 - rho))
        quad = (s2 - rho / one_plus * s1 * s1) / (var * one_minus);
    } else {
        quad = s2 / var;
    }
    return -0.5 * (n * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

double cs_logdet_correlation(std::span<const BatchStats> batches, double rho) {
    double total = 0.0;
    for (const auto& b : batches) {
        if (b.n <= 1.0) continue;
        total += (b.n - 1.0) * std::log1p(-rho) + std::log1p((b.n - 1.0) * rho);
    }
    return total;
}

}  // namespace addt::num

namespace addt::num {

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
    const Eigen::Index m = a.rows(), n = a.cols();
    if (b.size() != m) throw DomainError("nnls: right-hand side length mismatch");
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff()) *
                       static_cast<double>(std::max(m, n));

    auto solve_passive = [&](Eigen::VectorXd& s) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
        Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
        const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
        s.setZero(n);
        for (std::size_t k = 0; k < cols.size(); ++k) s(cols[k]) = z(static_cast<Eigen::Index>(k));
    };

    Eigen::VectorXd s(n);
    for (int outer = 0; outer < max_iter; ++outer) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index enter = -1;
        double wmax = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (passive[static_cast<std::size_t>(j)]) continue;
            if (w(j) > wmax) {
                wmax = w(j);
                enter = j;
            }
        }
        if (enter < 0) break;
        passive[static_cast<std::size_t>(enter)] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            solve_passive(s);
            double step = 1.0;
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!passive[static_cast<std::size_t>(j)] || s(j) > 0.0) continue;
                feasible = false;
                const double denom = x(j) - s(j);
                if (denom > 0.0) step = std::min(step, x(j) / denom);
            }
            if (feasible) {
                x = s;
                break;
            }
            x += step * (s - x);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x(j) = 0.0;
                }
            }
        }
    }
    return x;
}

}  // namespace addt::num
