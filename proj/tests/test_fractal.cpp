#include <gtest/gtest.h>

#include <cmath>

#include "fibspec/fractal.hpp"

using namespace fibspec;

namespace {

constexpr double tol = 1e-12;

BandSet middle_thirds(int levels) {
    std::vector<Interval> bands{{0.0, 1.0}};
    for (int l = 0; l < levels; ++l) {
        std::vector<Interval> next;
        for (const Interval& b : bands) {
            const double t = b.length() / 3.0;
            next.push_back({b.lo, b.lo + t});
            next.push_back({b.hi - t, b.hi});
        }
        bands = std::move(next);
    }
    return make_band_set(std::move(bands));
}

} // namespace

TEST(BoxCount, Basics) {
    const BandSet unit = make_band_set({{0, 1}});
    EXPECT_EQ(box_count(unit, 0.125), 8u);
    EXPECT_EQ(box_count(make_band_set({{0, 0}}), 0.01), 1u);
    EXPECT_EQ(box_count(make_band_set({}), 0.01), 0u);
    EXPECT_THROW(box_count(unit, 0.0), Error);
}

TEST(NeighbourhoodCount, WithinFactorTwoOfGreedyCount) {
    const BandSet c = middle_thirds(8);
    for (double eps = 1e-3; eps < 0.3; eps *= 1.7) {
        const double n = neighbourhood_count(c, eps);
        const double g = static_cast<double>(box_count(c, eps));
        EXPECT_LE(n, 2.0 * g + 1e-9) << eps;
        EXPECT_GE(n, 0.5 * g - 1e-9) << eps;
    }
}

TEST(BoxDimension, MiddleThirdsFixture) {
    const DimensionEstimate d = box_dimension({middle_thirds(8)});
    EXPECT_NEAR(d.value, std::log(2.0) / std::log(3.0), 0.02);
    EXPECT_EQ(d.method, DimensionMethod::BoxFit);
    EXPECT_GT(d.r_squared, 0.99);
    EXPECT_GE(d.scales.size(), 4u);
}

TEST(BoxDimension, IntervalIsOne) {
    const DimensionEstimate d = box_dimension({cover({1, 1}, 6, tol)});
    EXPECT_NEAR(d.value, 1.0, 0.05);
}

TEST(BoxDimension, PointIsZero) {
    const DimensionEstimate d = box_dimension({make_band_set({{0.5, 0.5}})}, {1e-4, 1e-3, 1e-2, 1e-1});
    EXPECT_NEAR(d.value, 0.0, 0.05);
}

TEST(BoxDimension, NeedsEnoughScales) {
    try {
        box_dimension({middle_thirds(8)}, {0.1, 0.2, 0.3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientScales);
    }
    // Scales below the resolution floor are unusable.
    EXPECT_THROW(box_dimension({middle_thirds(8)}, {1e-8, 1e-7, 1e-6, 1e-5}), Error);
    EXPECT_THROW(box_dimension({}), Error);
}

TEST(BoxDimension, ResultIsClamped) {
    const DimensionEstimate d = box_dimension({make_band_set({{0, 1}})}, {1e-3, 1e-2, 1e-1, 1.0});
    EXPECT_LE(d.value, 1.0);
    EXPECT_GE(d.value, 0.0);
}

TEST(ResolutionFloor, Values) {
    EXPECT_EQ(resolution_floor(make_band_set({{0, 1}})), 0.0);
    EXPECT_NEAR(resolution_floor(make_band_set({{0, 1}, {2, 4}})), 3.0, 1e-15);
    const auto eps = default_eps_list(middle_thirds(8));
    ASSERT_EQ(eps.size(), 12u);
    EXPECT_TRUE(std::is_sorted(eps.begin(), eps.end()));
    EXPECT_NEAR(eps.back(), 1.0 / 8.0, 1e-15);
}

TEST(BandScaling, FreeCaseIsDegenerate) {
    const DimensionEstimate d = band_scaling_dimension({1, 1}, 4, 10, tol);
    EXPECT_TRUE(d.degenerate);
    EXPECT_EQ(d.value, 1.0);
    EXPECT_EQ(d.method, DimensionMethod::BandScaling);
}

TEST(BandScaling, RejectsBadLevels) {
    EXPECT_THROW(band_scaling_dimension({1, 2}, 5, 5, tol), Error);
    EXPECT_THROW(band_scaling_dimension({1, 2}, 0, 5, tol), Error);
    EXPECT_THROW(band_scaling_dimension({1, 2}, 5, 30, tol), Error);
}

TEST(Dimension, EstimatorsAgreeAtOneTwo) {
    const HoppingPair p(1, 2);
    const DimensionEstimate box = global_dimension(p, 14, tol);
    const DimensionEstimate scaling = band_scaling_dimension(p, 8, 14, tol, 4);
    EXPECT_GT(box.value, 0.05);
    EXPECT_LT(box.value, 0.99);
    EXPECT_GT(scaling.value, 0.05);
    EXPECT_LT(scaling.value, 0.99);
    EXPECT_LE(std::abs(box.value - scaling.value), 0.05);
    EXPECT_FALSE(box.clamped);
    EXPECT_FALSE(scaling.degenerate);
}

TEST(LocalDimension, Examples) {
    const DimensionEstimate free = local_dimension({1, 1}, 0.0, 0.5, 8, tol);
    EXPECT_NEAR(free.value, 1.0, 0.05);
    const HoppingPair p(1, 2);
    const double global = global_dimension(p, 14, tol).value;
    EXPECT_NEAR(local_dimension(p, 0.0, 0.5, 14, tol).value, global, 0.1);
    EXPECT_THROW(local_dimension(p, 10.0, 0.5, 8, tol), Error);
    EXPECT_THROW(local_dimension(p, 0.0, 0.0, 8, tol), Error);
}

TEST(DimensionSweep, TrendAndFlags) {
    const auto rows = dimension_sweep(1.0, {1.5, 2.0, 3.0}, 8, 14, tol, 3);
    ASSERT_EQ(rows.size(), 3u);
    for (const SweepRow& r : rows) {
        ASSERT_TRUE(r.box) << r.error;
        ASSERT_TRUE(r.scaling) << r.error;
        EXPECT_GT(r.box->value, 0.0);
        EXPECT_LT(r.box->value, 1.0);
        EXPECT_NEAR(r.invariant, invariant_expected({1.0, r.b}), 1e-15);
    }
    EXPECT_TRUE(sweep_nonincreasing(rows));
    EXPECT_TRUE(dimension_sweep(1.0, {}, 8, 14, tol).empty());
    const auto degenerate = dimension_sweep(1.0, {1.0}, 4, 8, tol);
    ASSERT_EQ(degenerate.size(), 1u);
    EXPECT_TRUE(degenerate[0].degenerate);
    const auto bad = dimension_sweep(1.0, {-1.0}, 4, 8, tol);
    EXPECT_FALSE(bad[0].error.empty());
    EXPECT_FALSE(bad[0].box);
}

TEST(DimensionSweep, NonincreasingDetectsRise) {
    std::vector<SweepRow> rows(2);
    rows[0].box = DimensionEstimate{};
    rows[0].box->value = 0.5;
    rows[1].box = DimensionEstimate{};
    rows[1].box->value = 0.6;
    EXPECT_FALSE(sweep_nonincreasing(rows));
}
