#include <gtest/gtest.h>

#include <cmath>

#include "addt/parametric.hpp"
#include "addt/simstudy.hpp"
#include "support.hpp"

using namespace addt;
using namespace addt::parametric;
namespace ts = testing_support;

namespace {

Params setting_one() { return {-16.0, 12500.0, 9000.0, 2.0, 1000.0, 0.0}; }

}  // namespace

TEST(Parametric, MeanPath) {
    const ts::SigmoidTruth truth;
    const Params p = setting_one();
    for (double temp : {200.0, 250.0, 280.0})
        for (double t : {0.0, 100.0, 2000.0, 50000.0})
            EXPECT_NEAR(mu(t, ts::recip(temp), p), truth.mean(t, ts::recip(temp)), 1e-9);
    EXPECT_DOUBLE_EQ(mu(0.0, ts::recip(250), p), 9000.0);
    EXPECT_THROW(mu(-1.0, ts::recip(250), p), DomainError);
}

TEST(Parametric, LoglikSumsBatchDensities) {
    const Dataset d = Dataset::from_measurements({{std::nullopt, 0.0, 9100.0},
                                                  {std::nullopt, 0.0, 8800.0},
                                                  {250.0, 1000.0, 7000.0},
                                                  {250.0, 1000.0, 7600.0},
                                                  {250.0, 1000.0, 6900.0},
                                                  {270.0, 2000.0, 3000.0},
                                                  {270.0, 2000.0, 2500.0}});
    Params p = setting_one();
    p.rho = 0.35;
    double expect = ts::dense_mvn_logpdf({9100.0 - 9000.0, 8800.0 - 9000.0}, p.sigma, p.rho);
    const ts::SigmoidTruth truth;
    const double m1 = truth.mean(1000, ts::recip(250)), m2 = truth.mean(2000, ts::recip(270));
    expect += ts::dense_mvn_logpdf({7000 - m1, 7600 - m1, 6900 - m1}, p.sigma, p.rho);
    expect += ts::dense_mvn_logpdf({3000 - m2, 2500 - m2}, p.sigma, p.rho);
    EXPECT_NEAR(loglik(d, p, true), expect, 1e-9);
    const double without = expect - ts::dense_mvn_logpdf({100.0, -200.0}, p.sigma, p.rho);
    EXPECT_NEAR(loglik(d, p, false), without, 1e-9);
}

TEST(Parametric, LineFormula) {
    const ts::SigmoidTruth truth;
    for (double frac : {0.3, 0.5, 0.7}) {
        const auto line = line_parametric(setting_one(), frac);
        EXPECT_NEAR(line.beta0, truth.beta0(frac), 1e-12);
        EXPECT_NEAR(line.beta1, truth.beta1(), 1e-9);
    }
    EXPECT_NEAR(ti_parametric(setting_one(), 0.5, 1e5).ti, 181.17, 0.01);
}

TEST(Parametric, NoiselessRecovery) {
    const ts::SigmoidTruth truth;
    const Dataset d = ts::noiseless([&](double t, double x) { return truth.mean(t, x); }, {250, 260, 270, 280},
                                    {552, 1008, 2016, 3528, 5040});
    const auto fit = fit_parametric(d);
    EXPECT_NEAR(fit.params.nu0 / truth.nu0, 1.0, 1e-3);
    EXPECT_NEAR(fit.params.nu1 / truth.nu1, 1.0, 1e-3);
    EXPECT_NEAR(fit.params.alpha / truth.alpha, 1.0, 1e-3);
    EXPECT_NEAR(fit.params.gamma / truth.gamma, 1.0, 1e-3);
}

TEST(Parametric, NoisyFitIsStationaryAndBeatsTruth) {
    const auto g = sim::GeneratorSpec::preset(sim::Setting::I);
    const Dataset d = sim::simulate_dataset(g, sim::ScenarioSpec::preset(8), 21, 0);
    const auto fit = fit_parametric(d);
    EXPECT_GE(fit.loglik, loglik(d, setting_one()) - 1e-9);
    EXPECT_NEAR(fit.loglik, loglik(d, fit.params), 1e-8);
    EXPECT_NEAR(fit.aic, 12 - 2 * fit.loglik, 1e-9);

    const ProfileObjective obj(d, FitOptions{});
    const auto z = obj.internal(fit.params.nu0, fit.params.nu1, fit.params.gamma);
    const double f0 = obj(z);
    for (std::size_t k = 0; k < z.size(); ++k) {
        auto up = z, down = z;
        const double h = 1e-4;
        up[k] += h;
        down[k] -= h;
        const double grad = (obj(up) - obj(down)) / (2 * h);
        EXPECT_LT(std::abs(grad), 1e-2) << "coordinate " << k;
        EXPECT_GE(obj(up), f0 - 1e-9);
        EXPECT_GE(obj(down), f0 - 1e-9);
    }
    const Params back = obj.expand(z);
    EXPECT_NEAR(back.alpha, fit.params.alpha, 1e-6 * fit.params.alpha);
}

TEST(Parametric, NeedsTwoLevels) {
    const ts::SigmoidTruth truth;
    const Dataset d = ts::noiseless([&](double t, double x) { return truth.mean(t, x); }, {270}, {552, 1008, 2016});
    EXPECT_THROW(fit_parametric(d), InsufficientLevels);
}
