#include <gtest/gtest.h>

#include <cmath>

#include "fibspec/operator.hpp"

using namespace fibspec;

TEST(BuildWindow, Examples) {
    EXPECT_EQ(build_window(Word::from_string("ab"), {1, 2}).hoppings, (std::vector<double>{1, 2}));
    EXPECT_EQ(build_window(fib_prefix(4), {1, 2}).hoppings, (std::vector<double>{1, 2, 1, 1, 2}));
    EXPECT_THROW(build_window(Word{}, {1, 2}), Error);
    const JacobiWindow j = build_window(omega_s(1, 10), {1, 2});
    EXPECT_EQ(j.dimension(), 11u);
    EXPECT_EQ(build_window(omega_s(1, 10), {1, 2}, Boundary::Periodic).dimension(), 10u);
}

TEST(Eigenvalues, AnalyticSmallCases) {
    const auto two = eigenvalues(JacobiWindow{{1.7}, Boundary::Free}, 1e-13);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_NEAR(two.values[0], -1.7, 1e-12);
    EXPECT_NEAR(two.values[1], 1.7, 1e-12);
    const auto three = eigenvalues(JacobiWindow{{1, 1}, Boundary::Free}, 1e-13);
    ASSERT_EQ(three.size(), 3u);
    EXPECT_NEAR(three.values[0], -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(three.values[1], 0.0, 1e-12);
    EXPECT_NEAR(three.values[2], std::sqrt(2.0), 1e-12);
}

TEST(Eigenvalues, NormBoundSymmetryInterlacing) {
    const HoppingPair p(1, 2);
    for (long long n : {10LL, 233LL, 1000LL, 1999LL}) {
        const JacobiWindow outer = build_window(omega_s(1, n), p);
        const JacobiWindow inner = build_window(omega_s(1, n - 1), p);
        const auto eo = eigenvalues(outer, default_eigen_tol(p), 3);
        const auto ei = eigenvalues(inner, default_eigen_tol(p), 3);
        EXPECT_EQ(eo.size(), static_cast<std::size_t>(n + 1));
        for (double v : eo.values) EXPECT_LE(std::abs(v), p.norm_bound() + 1e-12);
        EXPECT_LE(symmetry_defect(eo), 1e-8) << n;
        EXPECT_TRUE(interlaces(eo, ei, 1e-8)) << n;
        EXPECT_TRUE(std::is_sorted(eo.values.begin(), eo.values.end()));
    }
}

TEST(Eigenvalues, ThreadCountDoesNotMatter) {
    const JacobiWindow j = build_window(omega_s(1, 1500), {1, 2});
    EXPECT_EQ(eigenvalues(j, 1e-11, 1).values, eigenvalues(j, 1e-11, 8).values);
}

TEST(Eigenvalues, PeriodicRingMatchesBandEdges) {
    const HoppingPair p(1, 2);
    for (int k = 2; k <= 10; ++k) {
        const JacobiWindow ring = build_window(fib_prefix(k), p, Boundary::Periodic);
        const auto ev = eigenvalues(ring, 1e-12);
        EXPECT_EQ(ev.size(), fibonacci(k));
        for (double v : ev.values) EXPECT_NEAR(detail::hopping_half_trace(ring.hoppings, v), 1.0, 1e-6) << k;
    }
}

TEST(Eigenvalues, ThreeSiteRing) {
    const JacobiWindow ring{{1, 2, 1}, Boundary::Periodic};
    const auto ev = eigenvalues(ring, 1e-13);
    // [[0,1,1],[1,0,2],[1,2,0]]: x^3 - 6x - 4 = (x + 2)(x^2 - 2x - 2).
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_NEAR(ev.values[0], -2.0, 1e-10);
    EXPECT_NEAR(ev.values[1], 1 - std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(ev.values[2], 1 + std::sqrt(3.0), 1e-10);
}

TEST(Eigenvalues, RejectsBadInputs) {
    EXPECT_THROW(eigenvalues_free(JacobiWindow{{}, Boundary::Free}, 1e-10), Error);
    EXPECT_THROW(eigenvalues_free(JacobiWindow{{1}, Boundary::Free}, 0.0), Error);
    EXPECT_THROW(eigenvalues_free(JacobiWindow{{1}, Boundary::Periodic}, 1e-10), Error);
}

TEST(BandCount, SturmAgreesWithBands) {
    for (double b : {1.2, 2.0, 5.0})
        for (int k = 1; k <= 12; ++k) EXPECT_TRUE(band_count_check({1, b}, k, 1e-12).agree) << b << " " << k;
}

TEST(BandsBelow, CountsBands) {
    const HoppingPair p(1, 2);
    EXPECT_EQ(bands_below(p, 2, 0.0), 1u);
    EXPECT_EQ(bands_below(p, 2, 3.5), 2u);
    EXPECT_EQ(bands_below(p, 2, -3.5), 0u);
}

TEST(PeriodicBandCheck, Examples) {
    const SpectrumDefect free = periodic_band_check({1, 1}, 5, 1e-12);
    EXPECT_LE(free.max_defect, 1e-11);
    const SpectrumDefect two = periodic_band_check({1, 2}, 2, 1e-12);
    EXPECT_LE(two.max_defect, 1e-2);
    const SpectrumDefect eight = periodic_band_check({1, 2}, 8, 1e-12, 20, 4);
    EXPECT_LE(eight.max_defect, 1e-2);
    EXPECT_EQ(eight.eigenvalues, 20u * fibonacci(8) + 1);
    // At most a couple of edge states per gap.
    EXPECT_LE(eight.excluded, 2 * (fibonacci(8) - 1));
    EXPECT_THROW(periodic_band_check({1, 2}, 17, 1e-12), Error);
    EXPECT_THROW(periodic_band_check({1, 2}, 4, 1e-12, 0), Error);
}

TEST(TruncationConsistency, Examples) {
    const SpectrumDefect free = truncation_spectrum_consistency({1, 1}, 4, 100, 1e-12);
    EXPECT_LE(free.max_defect, 1e-2);
    const SpectrumDefect d = truncation_spectrum_consistency({1, 2}, 10, static_cast<long long>(fibonacci(14)), 1e-12, 4);
    EXPECT_LE(d.max_defect, 0.05);
    try {
        truncation_spectrum_consistency({1, 2}, 10, 100, 1e-12);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    }
}
