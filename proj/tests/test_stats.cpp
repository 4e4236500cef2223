#include "aftershock/stats.hpp"
#include "aftershock/rng.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace aftershock;

namespace {

PriceSeries prices(std::vector<double> x, std::size_t origin = 0) {
    PriceSeries s;
    for (std::size_t k = 0; k < x.size(); ++k) {
        s.wall_clock.push_back(Minute{std::chrono::minutes{static_cast<long>(k)}});
    }
    s.x = std::move(x);
    s.origin = origin;
    return s;
}

ReturnSeries returns(std::vector<double> r, std::int64_t first = 0) { return {first, std::move(r)}; }

}  // namespace

TEST(ComputeReturns, Arithmetic) {
    EXPECT_EQ(compute_returns(prices({100, 101})).r.size(), 1u);
    EXPECT_DOUBLE_EQ(compute_returns(prices({100, 101})).r[0], 0.01);
    const auto r = compute_returns(prices({50, 60, 30}));
    EXPECT_DOUBLE_EQ(r.r[0], 0.2);
    EXPECT_DOUBLE_EQ(r.r[1], -0.5);
}

TEST(ComputeReturns, ConstantPricesGiveZero) {
    for (double v : compute_returns(prices({7, 7, 7, 7})).r) EXPECT_EQ(v, 0.0);
}

TEST(ComputeReturns, IndexFollowsOrigin) {
    const auto r = compute_returns(prices({1, 2, 3, 4}, 2));
    EXPECT_EQ(r.first, -2);
    EXPECT_EQ(r.end_index(), 1);
    EXPECT_DOUBLE_EQ(r.at(0), 4.0 / 3.0 - 1.0);
}

TEST(ComputeReturns, TooShort) { EXPECT_THROW(compute_returns(prices({1})), DataError); }

TEST(WindowStats, Examples) {
    const auto a = window_stats(returns({1, 1, 1}), 0, 3);
    EXPECT_EQ(a.mean, 1.0);
    EXPECT_EQ(a.variance, 0.0);
    const auto b = window_stats(returns({0, 2}), 0, 2);
    EXPECT_DOUBLE_EQ(b.mean, 1.0);
    EXPECT_DOUBLE_EQ(b.variance, 1.0);
    EXPECT_DOUBLE_EQ(b.sigma, 1.0);
}

TEST(WindowStats, WindowIsHalfOpenFromT0) {
    const auto s = window_stats(returns({100, 0, 2, 100}, -1), 0, 2);
    EXPECT_DOUBLE_EQ(s.mean, 1.0);
    EXPECT_EQ(s.t0, 0);
    EXPECT_EQ(s.length, 2);
}

TEST(WindowStats, Errors) {
    EXPECT_THROW(window_stats(returns({1, 2}), 0, 0), DataError);
    EXPECT_THROW(window_stats(returns({1, 2}), 0, 3), DataError);
    EXPECT_THROW(window_stats(returns({1, 2}, 0), -1, 1), DataError);
}

TEST(WindowStatsProperty, TranslationAndScale) {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> r(200);
        for (auto& v : r) v = (rng.uniform() - 0.5) * 0.01;
        const double shift = (rng.uniform() - 0.5) * 2.0;
        const double lambda = 0.1 + 10.0 * rng.uniform();
        auto shifted = r, scaled = r;
        for (auto& v : shifted) v += shift;
        for (auto& v : scaled) v *= lambda;
        const auto base = window_stats(returns(r), 0, 200);
        EXPECT_NEAR(window_stats(returns(shifted), 0, 200).variance, base.variance, 1e-12);
        EXPECT_NEAR(window_stats(returns(scaled), 0, 200).sigma, lambda * base.sigma, 1e-12);
        EXPECT_NEAR(base.sigma * base.sigma, base.variance, 1e-15);
        EXPECT_GE(base.variance, 0.0);
    }
}

TEST(WindowStatsProperty, IdenticalValuesMeanExact) {
    for (double v : {0.1, -3e-7, 12345.678}) {
        EXPECT_EQ(window_stats(returns(std::vector<double>(1000, v)), 0, 1000).mean, v);
    }
}
