#include <gtest/gtest.h>

#include <cmath>

#include "addt/traditional.hpp"
#include "support.hpp"

using namespace addt;
using namespace addt::traditional;
namespace ts = testing_support;

namespace {

// Linear decay at two temperatures: 100 - 0.01 t at 200 C and 100 - 0.05 t at
// 250 C cross 50 at t = 5000 and t = 1000.
Dataset two_linear_levels() {
    std::vector<Measurement> rows{{std::nullopt, 0.0, 100.0}, {std::nullopt, 0.0, 100.0}};
    for (double t : {500.0, 1500.0, 3000.0, 6000.0}) {
        rows.push_back({200.0, t, 100 - 0.01 * t});
        rows.push_back({250.0, t, 100 - 0.05 * t});
    }
    return Dataset::from_measurements(rows);
}

}  // namespace

TEST(Traditional, BatchMeans) {
    const auto series = batch_means(Dataset::from_measurements(
        {{250.0, 10.0, 2.0}, {250.0, 10.0, 4.0}, {250.0, 20.0, 1.0}, {std::nullopt, 0.0, 5.0}}));
    ASSERT_EQ(series.size(), 1u);
    ASSERT_EQ(series[0].points.size(), 2u);
    EXPECT_DOUBLE_EQ(series[0].points[0].mean, 3.0);
}

TEST(Traditional, TwoLevelLine) {
    const auto fit = fit_traditional(two_linear_levels(), 0.5, 1e5);
    ASSERT_EQ(fit.levels.size(), 2u);
    EXPECT_NEAR(*fit.levels[0].failure_time, 5000.0, 1e-4);
    EXPECT_NEAR(*fit.levels[1].failure_time, 1000.0, 1e-4);
    const double x1 = ts::recip(200), x2 = ts::recip(250);
    const double b1 = (std::log10(5000.0) - 3.0) / (x1 - x2);
    const double b0 = 3.0 - b1 * x2;
    EXPECT_NEAR(fit.result.line.beta1, b1, 1e-4);
    EXPECT_NEAR(fit.result.line.beta0, b0, 1e-7);
    EXPECT_NEAR(fit.result.ti, ts::ti_of(b0, b1, 1e5), 1e-4);
}

TEST(Traditional, OlsLine) {
    const auto l = fit_line({1.0, 2.0, 3.0}, {2.0, 4.1, 5.9});
    EXPECT_NEAR(l.beta1, 1.95, 1e-12);
    EXPECT_NEAR(l.beta0, 4.0 - 1.95 * 2.0, 1e-12);
}

TEST(Traditional, DegreeFollowsPointCount) {
    LevelSeries s{250.0, ts::recip(250), {{100, 90}, {200, 40}}};
    const auto li = interpolate_level(s, 50.0);
    EXPECT_EQ(li.poly.degree(), 1);
    EXPECT_NEAR(*li.failure_time, 180.0, 1e-6);
    LevelSeries single{250.0, ts::recip(250), {{100, 90}}};
    const auto none = interpolate_level(single, 50.0);
    EXPECT_FALSE(none.failure_time);
    EXPECT_FALSE(none.note.empty());
}

TEST(Traditional, NoiselessSigmoidNearTruth) {
    const ts::SigmoidTruth truth;
    const Dataset d = ts::noiseless([&](double t, double x) { return truth.mean(t, x); }, {250, 260, 270, 280},
                                    {552, 1008, 2016, 3528, 5040});
    EXPECT_NEAR(fit_traditional(d, 0.5, 1e5).result.ti, truth.ti(0.5, 1e5), 2.0);
}

TEST(Traditional, DiscardsLevelThatNeverFails) {
    const ts::SigmoidTruth truth;
    const Dataset d = ts::noiseless([&](double t, double x) { return truth.mean(t, x); }, {200, 250, 260, 270},
                                    {552, 1008, 2016, 3528, 5040});
    const auto fit = fit_traditional(d, 0.5, 1e5);
    ASSERT_EQ(fit.discarded_temps.size(), 1u);
    EXPECT_DOUBLE_EQ(fit.discarded_temps[0], 200.0);
    EXPECT_TRUE(std::isfinite(fit.result.ti));
}

TEST(Traditional, TooFewLevels) {
    const ts::SigmoidTruth truth;
    const Dataset d = ts::noiseless([&](double t, double x) { return truth.mean(t, x); }, {180, 200, 250},
                                    {552, 1008, 2016});
    EXPECT_THROW(fit_traditional(d, 0.5, 1e5), InsufficientLevels);
}
