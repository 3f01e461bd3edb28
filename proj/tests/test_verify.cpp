#include <gtest/gtest.h>

#include "fibspec/verify.hpp"

using namespace fibspec;

namespace {

bool all_pass(const std::vector<CheckResult>& r) {
    for (const CheckResult& c : r)
        if (!c.passed) return false;
    return true;
}

} // namespace

TEST(Verify, DefaultsPass) {
    for (const HoppingPair p : {HoppingPair{1, 2}, HoppingPair{2, 1}, HoppingPair{0.7, 2.9}}) {
        const auto r = run_verification(p);
        EXPECT_GE(r.size(), 10u);
        for (const CheckResult& c : r) EXPECT_TRUE(c.passed) << c.name << " " << c.measured;
    }
}

TEST(Verify, DegenerateWarns) {
    const auto r = run_verification({1, 1});
    EXPECT_TRUE(all_pass(r));
    EXPECT_EQ(r.front().note, "a = b: degenerate hull");
}

TEST(Verify, FaultInjectionFailsInvariantOnly) {
    VerifyOptions opt;
    opt.perturb_recursion = 1e-6;
    const auto r = run_verification({1, 2}, opt);
    ASSERT_FALSE(r.empty());
    EXPECT_EQ(r.front().name, "invariant conservation");
    EXPECT_FALSE(r.front().passed);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_TRUE(r[i].passed) << r[i].name;
}

TEST(Verify, SeedDeterminism) {
    VerifyOptions opt;
    opt.samples = 50;
    const auto x = run_verification({1, 2}, opt), y = run_verification({1, 2}, opt);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].measured, y[i].measured);
}
