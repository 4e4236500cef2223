#include "aftershock/omori.hpp"
#include "aftershock/rng.hpp"
#include "aftershock/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aftershock;

TEST(CumulativeCount, Examples) {
    const EventSequence ev{{1, 2, 5}, {}, {}};
    const std::vector<double> grid{0, 0.5, 1, 4.9, 5, 6};
    const auto n = cumulative_count(ev, grid);
    ASSERT_EQ(n.size(), grid.size());
    EXPECT_EQ(n[0].n, 0u);
    EXPECT_EQ(n[1].n, 0u);
    EXPECT_EQ(n[2].n, 1u);
    EXPECT_EQ(n[3].n, 2u);
    EXPECT_EQ(n[4].n, 3u);
    EXPECT_EQ(n[5].n, 3u);
}

TEST(CumulativeCount, UnsortedGridRejected) {
    const EventSequence ev{{1, 2}, {}, {}};
    const std::vector<double> grid{0, 2, 1};
    EXPECT_THROW(cumulative_count(ev, grid), std::invalid_argument);
}

TEST(OmoriModel, VanishesAtZero) {
    for (double p : {0.0, 0.3, 0.999, 1.0, 1.0000001, 1.7}) {
        for (double c : {0.5, 10.0}) EXPECT_EQ(omori_model(0.0, p, 2.0, c), 0.0);
    }
    EXPECT_EQ(omori_model(0.0, 0.46, 6.24, 0.0), 0.0);
}

TEST(OmoriModel, LogBranchClosedForm) {
    EXPECT_NEAR(omori_model(std::exp(1.0) - 1.0, 1.0, 2.0, 1.0), 2.0, 1e-14);
}

TEST(OmoriModel, PowerBranchClosedForm) {
    // A [(t+c)^(1-p) - c^(1-p)] / (1-p)
    const double p = 0.4642, A = 6.2409, c = 3.0, t = 1000.0;
    const double expected = A * (std::pow(t + c, 1 - p) - std::pow(c, 1 - p)) / (1 - p);
    EXPECT_NEAR(omori_model(t, p, A, c), expected, 1e-10 * expected);
    EXPECT_NEAR(omori_model(t, p, A, 0.0), A * std::pow(t, 1 - p) / (1 - p), 1e-9);
}

TEST(OmoriModel, BranchContinuity) {
    for (double t : {1.0, 10.0, 1e3, 1e5}) {
        const double ref = omori_model(t, 1.0, 1.0, 1.0);
        for (double p : {1.0 - 1e-8, 1.0 + 1e-8, 1.0 - 2e-6, 1.0 + 2e-6}) {
            // the exact relative gap is about |1 - p| ln(1 + t) / 2
            const double tol = std::abs(1.0 - p) * std::log1p(t) + 1e-9;
            EXPECT_LT(std::abs(omori_model(t, p, 1.0, 1.0) - ref) / ref, tol) << "t=" << t << " p=" << p;
        }
    }
}

TEST(OmoriModel, DomainErrors) {
    EXPECT_THROW(omori_model(1.0, 1.5, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(omori_model(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(omori_model(1.0, 0.5, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(omori_model(1.0, -0.1, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(omori_model(1.0, 0.5, 1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(omori_model(-1.0, 0.5, 1.0, 1.0), std::invalid_argument);
}

TEST(OmoriModelProperty, NondecreasingAndInverse) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const double p = 2.5 * rng.uniform();
        const double c = rng.uniform() < 0.2 && p < 0.99 ? 0.0 : 0.01 + 100.0 * rng.uniform();
        const double A = 0.1 + 10.0 * rng.uniform();
        double prev = 0.0;
        for (double t = 0.0; t < 1e5; t = t * 1.7 + 0.3) {
            const double n = omori_model(t, p, A, c);
            EXPECT_GE(n, prev);
            prev = n;
            const double back = omori_inverse(n, p, A, c);
            EXPECT_NEAR(back, t, 1e-7 * (1.0 + t)) << "p=" << p << " c=" << c;
        }
    }
}

TEST(BestAmplitude, PerturbingNeverLowersRss) {
    Rng rng(9);
    const auto ev = gen_omori({0.6, 4.0, 2.0, 5000.0, 3, false}).events;
    CountCurve curve;
    for (const auto& pt : cumulative_count(ev, uniform_grid(1.0, 5000.0))) {
        curve.t.push_back(pt.t);
        curve.y.push_back(static_cast<double>(pt.n));
    }
    for (int trial = 0; trial < 50; ++trial) {
        const double p = 0.2 + 1.2 * rng.uniform(), c = 0.5 + 20.0 * rng.uniform();
        const double A = best_amplitude(curve, p, c);
        const double base = omori_rss(curve, p, A, c);
        for (double f : {0.9, 0.999, 1.001, 1.1}) EXPECT_GE(omori_rss(curve, p, A * f, c), base);
    }
}

TEST(FitOmori, SelfConsistencyOnExactCurve) {
    struct Case {
        double p, A, c;
        bool c_search;
    };
    for (const auto& k : {Case{0.46, 6.24, 0.0, false}, Case{0.8, 3.0, 0.0, false}, Case{1.0, 2.0, 10.0, true},
                          Case{1.5, 5.0, 5.0, true}}) {
        CountCurve curve;
        for (double t : uniform_grid(1.0, 20000.0)) {
            curve.t.push_back(t);
            curve.y.push_back(omori_model(t, k.p, k.A, k.c));
        }
        const auto fit = fit_count_curve(curve, k.c_search);
        EXPECT_NEAR(fit.p, k.p, 0.02 * k.p);
        EXPECT_NEAR(fit.A, k.A, 0.02 * k.A);
        EXPECT_GT(fit.p, 0.0);
        EXPECT_GT(fit.A, 0.0);
        EXPECT_GE(fit.c, 0.0);
    }
}

TEST(FitOmori, DuplicatedGridSameMinimizer) {
    const auto ev = gen_omori({0.5, 5.0, 0.0, 4000.0, 21, false}).events;
    CountCurve once, twice;
    for (const auto& pt : cumulative_count(ev, uniform_grid(1.0, 4000.0))) {
        once.t.push_back(pt.t);
        once.y.push_back(static_cast<double>(pt.n));
        for (int r = 0; r < 2; ++r) {
            twice.t.push_back(pt.t);
            twice.y.push_back(static_cast<double>(pt.n));
        }
    }
    const auto a = fit_count_curve(once, false), b = fit_count_curve(twice, false);
    EXPECT_NEAR(a.p, b.p, 1e-6);
    EXPECT_NEAR(a.A, b.A, 1e-6 * a.A);
    EXPECT_NEAR(2.0 * a.rss, b.rss, 1e-6 * b.rss);
}

TEST(FitOmori, SeededCatalogRecoversP) {
    // Lambda(40000) = 5 * 200 / 0.5 = 2000 expected events.
    const auto g = gen_omori({0.5, 5.0, 0.0, 40000.0, 2024, false});
    ASSERT_GE(g.events.size(), 1800u);
    const auto fit = fit_omori(g.events, 1.0, 40000.0, false);
    EXPECT_NEAR(fit.p, 0.5, 0.05);
    EXPECT_EQ(fit.c, 0.0);
    EXPECT_EQ(fit.grid_points, 40001u);
    EXPECT_EQ(fit.events, g.events.size());
    EXPECT_EQ(omori_model(0.0, fit.p, fit.A, fit.c), 0.0);
}

TEST(FitOmori, CSearchFindsPositiveOffset) {
    const auto g = gen_omori_stacked({1.0, 2.0, 10.0, 20000.0, 77, false}, 150);
    const auto fit = fit_omori(g.events, 1.0, 20000.0, true);
    EXPECT_NEAR(fit.p, 1.0, 0.05);
    EXPECT_GT(fit.c, 1.0);
    EXPECT_LT(fit.c, 100.0);
}

TEST(FitOmori, Errors) {
    EXPECT_THROW(fit_omori(EventSequence{{1, 2, 3}, {}, {}}, 1.0, 100.0, false), DataError);
    const std::vector<double> same(20, 4.0);
    EXPECT_THROW(fit_omori(std::span<const double>(same), 1.0, 100.0, false), DataError);
    EXPECT_THROW(fit_omori(EventSequence{{1, 2, 3}, {}, {}}, 0.0, 100.0, false), std::invalid_argument);
    EXPECT_THROW(fit_omori(EventSequence{{1, 2, 3}, {}, {}}, 1.0, -1.0, false), std::invalid_argument);
}

TEST(FitOmoriMle, RecoversPOnLargeCatalog) {
    const auto g = gen_omori({0.7, 5.0, 20.0, 50000.0, 8, false});
    const auto fit = fit_omori_mle(std::span<const double>(g.events.times), 50000.0);
    EXPECT_NEAR(fit.p, 0.7, 0.05);
    EXPECT_GT(fit.c, 0.0);
    EXPECT_NEAR(omori_model(50000.0, fit.p, fit.A, fit.c), static_cast<double>(g.events.size()), 1e-6 * fit.A);
}
