#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fibspec/tracemap.hpp"

using namespace fibspec;

namespace {

void expect_triple(const TraceTriple& t, double a, double b, double c, double tol = 1e-15) {
    EXPECT_NEAR(t.x_next, a, tol);
    EXPECT_NEAR(t.x_cur, b, tol);
    EXPECT_NEAR(t.x_prev, c, tol);
}

} // namespace

TEST(HoppingPair, RejectsNonPositive) {
    EXPECT_THROW(HoppingPair(0.0, 1.0), Error);
    EXPECT_THROW(HoppingPair(1.0, -2.0), Error);
    EXPECT_THROW(HoppingPair(NAN, 1.0), Error);
    EXPECT_THROW(HoppingPair(INFINITY, 1.0), Error);
    EXPECT_TRUE(HoppingPair(1.5, 1.5).degenerate());
    EXPECT_FALSE(HoppingPair(1, 2).degenerate());
}

TEST(InitialTriple, Examples) {
    expect_triple(initial_triple({1, 1}, 2), 1, 1, 1);
    expect_triple(initial_triple({1, 2}, 0), 0, 0, 1.25);
    expect_triple(initial_triple({2, 1}, 2), 0.5, 1, 1.25);
}

TEST(Step, Examples) {
    expect_triple(step({1, 1, 1, 0}), 1, 1, 1);
    expect_triple(step({0, 0, 1.25, 0}), -1.25, 0, 0);
    EXPECT_EQ(step({0, 0, 1.25, 3}).level, 4);
}

TEST(StepInverse, Examples) {
    expect_triple(step_inverse({1, 1, 1, 0}), 1, 1, 1);
    expect_triple(step_inverse({-1.25, 0, 0, 1}), 0, 0, 1.25);
}

TEST(StepInverse, TwiceRecoversStart) {
    const HoppingPair p(1.3, 0.7);
    const TraceTriple t0 = initial_triple(p, 0.9);
    const TraceTriple t2 = step(step(t0));
    const TraceTriple back = step_inverse(step_inverse(t2));
    expect_triple(back, t0.x_next, t0.x_cur, t0.x_prev, 1e-13);
    EXPECT_EQ(back.level, 0);
}

TEST(Step, RoundTripRandom) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const TraceTriple t{d(rng), d(rng), d(rng), 0};
        const TraceTriple a = step(step_inverse(t)), b = step_inverse(step(t));
        expect_triple(a, t.x_next, t.x_cur, t.x_prev, 1e-12);
        expect_triple(b, t.x_next, t.x_cur, t.x_prev, 1e-12);
    }
}

TEST(Step, OverflowIsReported) {
    try {
        step({1e200, 1e200, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NumericalDivergence);
        EXPECT_TRUE(e.numerical());
    }
}

TEST(TraceValue, Examples) {
    const HoppingPair p(1, 2);
    EXPECT_NEAR(trace_value(p, 0, 2), -1.25, 1e-15);
    EXPECT_NEAR(trace_value(p, 0, 3), 0.0, 1e-15);
    EXPECT_NEAR(trace_value(p, 0, 5), 1.25, 1e-15);
    EXPECT_NEAR(trace_value(p, 0, -1), 1.25, 1e-15);
    EXPECT_THROW(trace_value(p, 0, -2), Error);
}

TEST(TraceValue, SixPeriodicOrbitAtZero) {
    const HoppingPair p(1, 2);
    const double pattern[6] = {0, -1.25, 0, 0, 1.25, 0};
    for (int k = 1; k <= 60; ++k) EXPECT_NEAR(trace_value(p, 0, k), pattern[(k - 1) % 6], 1e-12) << k;
}

TEST(TraceValue, ClosedFormsOfLowLevels) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> h(0.5, 3), en(-6, 6);
    for (int i = 0; i < 200; ++i) {
        const double a = h(rng), b = h(rng), e = en(rng);
        const HoppingPair p(a, b);
        EXPECT_NEAR(trace_value(p, e, 1), e / (2 * a), 1e-13);
        EXPECT_NEAR(trace_value(p, e, 2), (e * e - a * a - b * b) / (2 * a * b), 1e-12);
        EXPECT_NEAR(trace_value(p, e, 3), (e * e * e - 2 * e * a * a - e * b * b) / (2 * a * a * b), 1e-11);
    }
}

TEST(TraceValue, TripleAtAgrees) {
    const HoppingPair p(1, 2);
    for (int k = 1; k <= 10; ++k) EXPECT_DOUBLE_EQ(triple_at(p, 0.37, k).x_cur, trace_value(p, 0.37, k));
    EXPECT_NEAR(triple_at(p, 0.37, -1).x_cur, p.coupling(), 1e-12);
}

TEST(HalfTrace, MatchesRecursionAndSaturates) {
    const HoppingPair p(1, 2);
    for (int k = -1; k <= 15; ++k)
        EXPECT_NEAR(half_trace<long double>(p, 0.813, k), trace_value(p, 0.813, k),
                    1e-9 * std::max(1.0, std::abs(trace_value(p, 0.813, k))));
    EXPECT_EQ(half_trace<long double>(p, 10.0, 40), INFINITY);
    EXPECT_EQ(half_trace<double>(p, 10.0, 40), INFINITY);
}

TEST(Invariant, Examples) {
    EXPECT_NEAR(invariant_value({1, 1, 1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(invariant_value({0, 0, 1.25, 0}), 9.0 / 16.0, 1e-15);
    EXPECT_NEAR(invariant_expected({1, 1}), 0.0, 1e-15);
    EXPECT_NEAR(invariant_expected({1, 2}), 9.0 / 16.0, 1e-15);
    EXPECT_NEAR(invariant_expected({2, 1}), 9.0 / 16.0, 1e-15);
}

TEST(Invariant, ConservedByStepAtModerateMagnitude) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 2000; ++i) {
        const TraceTriple t{d(rng), d(rng), d(rng), 0};
        const double scale = std::max({1.0, t.x_next * t.x_next, t.x_cur * t.x_cur, t.x_prev * t.x_prev});
        // Double cancellation: error grows with the squared entries of the image.
        const TraceTriple s = step(t);
        const double s_scale = std::max({scale, s.x_next * s.x_next, std::abs(2 * s.x_next * s.x_cur * s.x_prev)});
        EXPECT_NEAR(invariant_value(s), invariant_value(t), 1e-14 * s_scale * 16);
    }
}

TEST(Invariant, LineOfInitialConditions) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> h(0.5, 3), en(-8, 8);
    for (int i = 0; i < 500; ++i) {
        const HoppingPair p(h(rng), h(rng));
        const double i0 = invariant_value(initial_triple(p, en(rng)));
        EXPECT_NEAR(i0, invariant_expected(p), 1e-12 * (1 + invariant_expected(p)));
    }
}

TEST(InvariantDrift, WidePrecisionConserves) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> h(0.5, 3), en(-8, 8);
    for (int i = 0; i < 500; ++i) {
        const HoppingPair p(h(rng), h(rng));
        const InvariantDrift d = invariant_drift(p, en(rng), 40);
        EXPECT_LE(d.max_drift, 1e-9);
        EXPECT_GE(d.levels, 1);
    }
}

TEST(InvariantDrift, PerturbationIsDetected) {
    const HoppingPair p(1, 2);
    EXPECT_GT(invariant_drift(p, 0.7, 40, 1e6, 1e-6).max_drift, 1e-9);
}

TEST(TraceBound, Examples) {
    EXPECT_NEAR(trace_bound({1, 1}), 1.0, 1e-15);
    EXPECT_NEAR(trace_bound({1, 2}), 1.75, 1e-15);
    EXPECT_NEAR(trace_bound({1, 3}), 1.0 + 4.0 / 3.0, 1e-14);
}

TEST(EscapeClassify, Examples) {
    EXPECT_TRUE(escape_classify({1, 2}, 0, 100).bounded());
    EXPECT_EQ(escape_classify({1, 2}, 0, 100).level, 100);
    const EscapeResult r = escape_classify({1, 2}, 10, 100);
    EXPECT_TRUE(r.escaped());
    EXPECT_LE(r.level, 3);
    EXPECT_TRUE(escape_classify({1, 1}, 2, 100).bounded());
    EXPECT_THROW(escape_classify({1, 2}, 0, 1), Error);
}

TEST(EscapeClassify, EscapeIsPermanent) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> en(-4, 4);
    const HoppingPair p(1, 2);
    for (int i = 0; i < 300; ++i) {
        const double e = en(rng);
        const EscapeResult r = escape_classify(p, e, 30);
        if (!r.escaped() || r.non_finite) continue;
        // Once two consecutive traces exceed one, every later trace does.
        for (int j = r.level; j <= r.level + 6; ++j) {
            const double x = half_trace<long double>(p, e, j);
            EXPECT_GT(std::abs(x), 1.0) << e << " " << j;
        }
    }
}

TEST(GrowthRate, Examples) {
    const HoppingPair free(1, 1);
    const EscapeResult r = escape_classify(free, 3, 50);
    ASSERT_TRUE(r.escaped());
    EXPECT_GT(growth_rate_after_escape(free, 3, r.level, 8), 1.0);
    try {
        growth_rate_after_escape({1, 2}, 0, 5, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    }
}

TEST(GrowthRate, AnyEscapedOrbitExceedsOne) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> en(-8, 8);
    const HoppingPair p(1, 2);
    int seen = 0;
    while (seen < 50) {
        const double e = en(rng);
        const EscapeResult r = escape_classify(p, e, 30);
        if (!r.escaped()) continue;
        ++seen;
        EXPECT_GT(growth_rate_after_escape(p, e, r.level, 8), 1.0) << e;
    }
}

TEST(Parity, EnergyReflection) {
    const HoppingPair p(1, 2);
    for (int k = 0; k <= 15; ++k) {
        const double sign = fibonacci(k) % 2 == 0 ? 1.0 : -1.0;
        EXPECT_NEAR(trace_value(p, -0.61, k), sign * trace_value(p, 0.61, k), 1e-9) << k;
    }
}
