#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "addt/numkit.hpp"
#include "support.hpp"

using namespace addt;
using namespace addt::num;
namespace ts = testing_support;

TEST(Polynomial, RecoversQuadratic) {
    std::vector<double> t{0, 10, 20, 30, 40, 50}, y;
    for (double v : t) y.push_back(100 - 2 * v + 0.01 * v * v);
    const PolyFit f = fit_polynomial(t, y, 2);
    ASSERT_EQ(f.degree(), 2);
    EXPECT_NEAR(f.coeffs[0], 100, 1e-9);
    EXPECT_NEAR(f.coeffs[1], -2, 1e-10);
    EXPECT_NEAR(f.coeffs[2], 0.01, 1e-12);
    // 100 - 2t + 0.01 t^2 = 50  ->  t = 100 - sqrt(5000)
    const auto root = solve_crossing(f, 50.0, 0.0, 50.0);
    ASSERT_TRUE(root);
    EXPECT_NEAR(*root, 100 - std::sqrt(5000.0), 1e-6);
}

TEST(Polynomial, RankDeficientDesign) {
    std::vector<double> t{5, 5, 5}, y{1, 2, 3};
    EXPECT_THROW(fit_polynomial(t, y, 1), RankDeficient);
    EXPECT_THROW(fit_polynomial(t, y, 4), DomainError);
}

TEST(Crossing, EarliestAndMissing) {
    auto f = [](double t) { return std::cos(t); };
    const auto r = solve_crossing(f, 0.0, 0.0, 10.0);
    ASSERT_TRUE(r);
    EXPECT_NEAR(*r, std::numbers::pi / 2, 1e-7);
    EXPECT_FALSE(solve_crossing(f, 2.0, 0.0, 10.0));
}

TEST(Minimize, Rosenbrock) {
    auto f = [](std::span<const double> z) {
        return 100 * std::pow(z[1] - z[0] * z[0], 2) + std::pow(1 - z[0], 2);
    };
    const auto r = minimize(f, {-1.2, 1.0});
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
    EXPECT_TRUE(r.converged);
}

TEST(Minimize, BoundsAreRespected) {
    MinimizeOptions o;
    o.bounds = {Bound::positive(), Bound::interval(0.0, 0.5)};
    auto f = [](std::span<const double> z) { return std::pow(z[0] + 1, 2) + std::pow(z[1] - 2, 2); };
    const auto r = minimize(f, {1.0, 0.25}, o);
    EXPECT_GT(r.x[0], 0.0);
    EXPECT_LT(r.x[0], 1e-3);
    EXPECT_LE(r.x[1], 0.5);
    EXPECT_GT(r.x[1], 0.499);
    EXPECT_THROW(minimize([](std::span<const double>) { return NAN; }, {0.0}), DomainError);
}

TEST(Minimize, ScalarBrent) {
    const auto r = minimize_scalar([](double x) { return (x - 2) * (x - 2) + 1; }, 0.0, 5.0);
    EXPECT_NEAR(r.x, 2.0, 1e-7);
    const auto edge = minimize_scalar([](double x) { return x; }, 1.0, 3.0);
    EXPECT_NEAR(edge.x, 1.0, 1e-8);
}

TEST(Nnls, MatchesEnumeratedActiveSets) {
    std::mt19937 rng(11);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd a(8, 3);
        Eigen::VectorXd b(8);
        for (int i = 0; i < 8; ++i) {
            b(i) = z(rng);
            for (int j = 0; j < 3; ++j) a(i, j) = z(rng);
        }
        // Oracle: best feasible unconstrained solve over every subset of columns.
        double best = (b).squaredNorm();
        for (int mask = 1; mask < 8; ++mask) {
            std::vector<int> cols;
            for (int j = 0; j < 3; ++j)
                if (mask & (1 << j)) cols.push_back(j);
            Eigen::MatrixXd s(8, cols.size());
            for (std::size_t k = 0; k < cols.size(); ++k) s.col(k) = a.col(cols[k]);
            const Eigen::VectorXd c = s.colPivHouseholderQr().solve(b);
            if ((c.array() >= 0).all()) best = std::min(best, (s * c - b).squaredNorm());
        }
        const Eigen::VectorXd x = nnls(a, b);
        EXPECT_TRUE((x.array() >= 0).all());
        EXPECT_NEAR((a * x - b).squaredNorm(), best, 1e-9);
    }
}

TEST(CompoundSymmetry, MatchesDenseOracle) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        const double sigma = 0.5 + 2.5 * unit(rng);
        const double rho = n > 1 ? -0.9 / (n - 1) + (0.95 + 0.9 / (n - 1)) * unit(rng) : 0.0;
        std::vector<double> r(n);
        for (auto& v : r) v = sigma * (4 * unit(rng) - 2);
        EXPECT_NEAR(cs_logpdf(r, sigma, rho), ts::dense_mvn_logpdf(r, sigma, rho), 1e-10);
    }
    std::vector<double> r{1.0, 2.0};
    EXPECT_THROW(cs_logpdf(r, 0.0, 0.1), DomainError);
    EXPECT_THROW(cs_logpdf(r, 1.0, 1.0), DomainError);
    EXPECT_THROW(cs_logpdf(r, 1.0, -1.0), DomainError);
}

TEST(CompoundSymmetry, BatchDecomposition) {
    // W/(1-rho) + n (ybar-mu)^2/(1+(n-1)rho) equals the full quadratic form.
    std::vector<double> y{3.0, 5.0, 4.5, 6.0};
    const double mu = 4.0, rho = 0.3, n = 4.0;
    double ybar = 0, w = 0;
    for (double v : y) ybar += v / n;
    for (double v : y) w += (v - ybar) * (v - ybar);
    std::vector<double> r;
    for (double v : y) r.push_back(v - mu);
    const double logdet = cs_logdet_correlation(std::vector<BatchStats>{{n, ybar, w}}, rho);
    const double q = w / (1 - rho) + cs_mean_weight(n, rho) * (ybar - mu) * (ybar - mu);
    EXPECT_NEAR(-0.5 * (n * std::log(2 * std::numbers::pi) + logdet + q), ts::dense_mvn_logpdf(r, 1.0, rho), 1e-12);
}
