#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eqcm/scan.hpp"

using namespace eqcm;

namespace {

SweepSpec constant_path(int samples) {
    SweepSpec s;
    s.base = {0, 1, 1, 0, 0, 64};
    s.slope = {0, 0, 0, 0, 0};
    s.samples = samples;
    return s;
}

/// J2 = c (1 - J1), L1 = 1, L2 = 0, h = 0, parametrised by t = J1.
SweepSpec compass_path(double c, double t_min, double t_max, int samples, int n_cells) {
    SweepSpec s;
    s.base = {0, c, 1, 0, 0, n_cells};
    s.slope = {1, -c, 0, 0, 0};
    s.t_min = t_min;
    s.t_max = t_max;
    s.samples = samples;
    return s;
}

bool same_sample(const Sample& a, const Sample& b) {
    return a.t == b.t && a.eval.params == b.eval.params && a.eval.degenerate == b.eval.degenerate &&
           a.eval.measures.discord == b.eval.measures.discord &&
           a.eval.measures.mutual_info == b.eval.measures.mutual_info &&
           a.eval.correlators.cxx == b.eval.correlators.cxx && a.eval.gap == b.eval.gap;
}

}  // namespace

TEST(Quantity, NamesRoundTrip) {
    for (Quantity q : kAllQuantities) EXPECT_EQ(parse_quantity(quantity_name(q)), q);
    EXPECT_EQ(parse_quantity("e0"), Quantity::e0);
    EXPECT_FALSE(parse_quantity("entropy"));
}

TEST(Sweep, RejectsTooFewSamples) {
    EXPECT_THROW(sweep(constant_path(8)), std::invalid_argument);
    auto s = constant_path(16);
    s.t_max = s.t_min;
    EXPECT_THROW(sweep(s), std::invalid_argument);
}

TEST(Sweep, ConstantCompassPathHasZeroDiscord) {
    const auto r = sweep(constant_path(16));
    ASSERT_EQ(r.samples.size(), 16u);
    for (const auto& s : r.samples) {
        EXPECT_TRUE(s.eval.ok());
        EXPECT_TRUE(s.degenerate());
        EXPECT_NEAR(s.value(Quantity::discord), 0, 1e-10);
        EXPECT_TRUE(same_sample({r.samples[0].t, s.eval}, r.samples[0]));
    }
}

TEST(Sweep, OrderedAndDeterministicAcrossThreadCounts) {
    auto spec = compass_path(1, -0.5, 0.5, 41, 64);
    spec.threads = 1;
    const auto a = sweep(spec);
    spec.threads = 7;
    const auto b = sweep(spec);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_TRUE(same_sample(a.samples[i], b.samples[i]));
        if (i) {
            EXPECT_GT(a.samples[i].t, a.samples[i - 1].t);
        }
    }
}

TEST(Sweep, DiscordDropsAtJ1ZeroOnMulticriticalPath) {
    const auto r = sweep(compass_path(1, -0.5, 0.5, 21, 512));
    const auto& mid = r.samples[10];
    EXPECT_NEAR(mid.t, 0.0, 1e-15);
    EXPECT_TRUE(mid.degenerate());
    EXPECT_GT(r.samples[9].value(Quantity::discord) - mid.value(Quantity::discord), 0.1);
    EXPECT_GT(r.samples[11].value(Quantity::discord) - mid.value(Quantity::discord), 0.1);
}

TEST(Sweep, FailuresAreRecordedPerSample) {
    // n_cells below the minimum makes every evaluation fail, but the sweep itself
    // validates the base and refuses; a per-point failure is exercised directly.
    const auto ev = evaluate_point({1, 0, 1, 0, 0, 1}, BondKind::odd);
    EXPECT_FALSE(ev.ok());
    EXPECT_TRUE(std::isnan(ev.value(Quantity::discord)));
}

TEST(Sweep, RefinedKeepsCoarseSamples) {
    const auto s = compass_path(2, -1, 1, 21, 32);
    const auto r = s.refined(2);
    EXPECT_EQ(r.samples, 41);
    for (int i = 0; i < s.samples; ++i) EXPECT_DOUBLE_EQ(s.t_at(i), r.t_at(2 * i));
}

TEST(FiniteDifference, Linear) {
    std::vector<double> t, y;
    for (int i = 0; i < 20; ++i) {
        t.push_back(0.1 * i);
        y.push_back(2 * t.back());
    }
    const auto d = finite_difference(t, y);
    for (double v : d.value) EXPECT_NEAR(v, 2.0, 1e-12);
    EXPECT_NEAR(d.spacing, 0.1, 1e-15);
}

TEST(FiniteDifference, QuadraticSecondOrderAccurate) {
    for (double h : {0.1, 0.05}) {
        std::vector<double> t, y;
        for (int i = 0; i <= static_cast<int>(std::lround(1 / h)); ++i) {
            t.push_back(i * h);
            y.push_back(t.back() * t.back() * t.back());
        }
        const auto d = finite_difference(t, y);
        for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(d.value[i], 3 * t[i] * t[i], 2.5 * h * h);
    }
    std::vector<double> t{0, 1, 2, 3}, y{0, 1, 4, 9};
    const auto d = finite_difference(t, y);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(d.value[i], 2 * t[i], 1e-12);
}

TEST(FiniteDifference, Rejections) {
    std::vector<double> t{0, 1}, y{0, 1};
    EXPECT_THROW(finite_difference(t, y), std::invalid_argument);
    std::vector<double> tn{0, 1, 3}, yn{0, 1, 2};
    EXPECT_THROW(finite_difference(tn, yn), std::invalid_argument);
}

TEST(FiniteDifference, ExcludedSamplesBlankTheirStencils) {
    std::vector<double> t{0, 1, 2, 3, 4, 5}, y{0, 1, 2, 3, 4, 5};
    const bool mask[] = {false, false, true, false, false, false};
    const auto d = finite_difference(t, y, mask);
    EXPECT_TRUE(std::isnan(d.value[0]));
    EXPECT_TRUE(std::isnan(d.value[1]));
    EXPECT_TRUE(std::isnan(d.value[2]));
    EXPECT_TRUE(std::isnan(d.value[3]));
    EXPECT_NEAR(d.value[4], 1, 1e-15);
    EXPECT_NEAR(d.value[5], 1, 1e-15);
}

TEST(Classify, SmoothRegionIsEmpty) {
    auto s = compass_path(0.5, 0.2, 0.8, 61, 256);  // J2 in (0.1, 0.4): no transition
    const auto coarse = sweep(s);
    const auto fine = sweep(s.refined(2));
    EXPECT_TRUE(classify_transitions(coarse, fine, Quantity::discord).empty());
    EXPECT_TRUE(classify_transitions(coarse, Quantity::discord).empty());
}

TEST(Classify, RequiresDenserRefinement) {
    auto s = compass_path(0.5, 0.2, 0.8, 21, 32);
    const auto coarse = sweep(s);
    EXPECT_THROW(classify_transitions(coarse, coarse, Quantity::discord), std::invalid_argument);
}

TEST(Classify, SingleResolutionIsUnresolved) {
    const auto r = sweep(compass_path(2, -0.5, 1, 151, 256));
    const auto reps = classify_transitions(r, Quantity::discord);
    ASSERT_FALSE(reps.empty());
    for (const auto& rep : reps) EXPECT_EQ(rep.order, TransitionOrder::unresolved);
}

TEST(Classify, FirstOrderAtJ1ZeroAndSecondOrderAtJ2One) {
    // The J2 = 1 peak sits near the automatic cut, so the peak threshold is explicit.
    const auto s = compass_path(2, -0.5, 1, 151, 512);  // J2 = 2 (1 - J1)
    const auto reps = classify_transitions(sweep(s), sweep(s.refined(2)), Quantity::discord, Thresholds{0, 1.0});
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_EQ(reps[0].order, TransitionOrder::first);
    EXPECT_NEAR(reps[0].t, 0.0, s.spacing());
    EXPECT_EQ(reps[1].order, TransitionOrder::second);
    EXPECT_NEAR(reps[1].t, 0.5, s.spacing());
    for (const auto& r : reps) {
        EXPECT_GE(r.jump, 0);
        EXPECT_GE(r.peak, 0);
    }
}

TEST(Classify, PeakLocationStableUnderSizeChange) {
    double where[2];
    const auto base = compass_path(2, 0.2, 0.8, 61, 512);
    for (int i = 0; i < 2; ++i) {
        auto s = base;
        s.base.n_cells = i == 0 ? 512 : 1024;
        const auto reps = classify_transitions(sweep(s), sweep(s.refined(2)), Quantity::discord, Thresholds{0, 1.0});
        ASSERT_EQ(reps.size(), 1u);
        EXPECT_EQ(reps[0].order, TransitionOrder::second);
        where[i] = reps[0].t;
    }
    EXPECT_LT(std::abs(where[0] - where[1]), base.spacing());
}

TEST(Scan2D, TwoByTwoMatchesPointEvaluations) {
    Scan2DSpec s;
    s.base = {0.3, 0.4, 1, 0.1, 0.5, 64};
    s.x_slope = {1, 0, 0, 0, 0};
    s.y_slope = {0, 0, 0, 0, 1};
    s.x_min = -0.5;
    s.x_max = 0.5;
    s.y_min = 0;
    s.y_max = 1;
    s.nx = s.ny = 2;
    const auto r = scan_2d(s);
    ASSERT_EQ(r.points.size(), 4u);
    for (int iy = 0; iy < 2; ++iy) {
        for (int ix = 0; ix < 2; ++ix) {
            const auto want = evaluate_point(s.params_at(r.x[ix], r.y[iy]), s.bond, s.measure);
            const auto& got = r.at(ix, iy);
            EXPECT_EQ(got.params, want.params);
            EXPECT_EQ(got.measures.discord, want.measures.discord);
            EXPECT_EQ(got.correlators.cyy, want.correlators.cyy);
        }
    }
    EXPECT_DOUBLE_EQ(r.at(1, 0).params.j1, 0.8);
    EXPECT_DOUBLE_EQ(r.at(0, 1).params.h, 1.5);
}

TEST(Scan2D, IsingRidgeInXYPlane) {
    // gamma along x at J1 + J2 = 1 (J1 = L1, J2 = L2), field along y.
    Scan2DSpec s;
    s.base = {0.5, 0.5, 0.5, 0.5, 0, 256};
    s.x_slope = {0.5, -0.5, 0.5, -0.5, 0};
    s.y_slope = {0, 0, 0, 0, 1};
    s.x_min = 0.9;
    s.x_max = 1.0;
    s.nx = 3;
    s.y_min = 1.5;
    s.y_max = 2.5;
    s.ny = 101;
    s.axis = Axis::y;
    s.quantity = Quantity::concurrence;
    const auto r = scan_2d(s);
    // At gamma = 1 the derivative along h peaks at the Ising point h = 2.
    int best = 0;
    for (int iy = 0; iy < s.ny; ++iy) {
        const double d = r.derivative[static_cast<std::size_t>(iy * s.nx + 2)];
        if (d > r.derivative[static_cast<std::size_t>(best * s.nx + 2)]) best = iy;
    }
    EXPECT_NEAR(r.y[best], 2.0, 0.01 + 1e-12);
}

TEST(Scan2D, Validation) {
    Scan2DSpec s;
    s.base = {1, 0, 1, 0, 0, 16};
    s.nx = 1;
    EXPECT_THROW(scan_2d(s), std::invalid_argument);
}
