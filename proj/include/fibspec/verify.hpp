#pragma once

// Self-test suite of invariants and identities, run by `fibspec verify`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fibspec/error.hpp"
#include "fibspec/tracemap.hpp"
#include "fibspec/transfer.hpp"
#include "fibspec/words.hpp"

namespace fibspec {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed value
    double threshold = 0.0;  // pass iff measured <= threshold
    std::string note;
};

struct VerifyOptions {
    std::uint64_t seed = 20240611;
    int samples = 200;
    double perturb_recursion = 0.0;
};

namespace detail {

inline CheckResult finish(std::string name, double measured, double threshold, std::string note = {}) {
    return {std::move(name), measured <= threshold, measured, threshold, std::move(note)};
}

inline double rel_gap(double x, double y) { return std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y))); }

} // namespace detail

inline std::vector<CheckResult> run_verification(const HoppingPair& p, const VerifyOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    const double reach = p.norm_bound() + 1.0;
    std::uniform_real_distribution<double> energy(-reach, reach);
    std::vector<CheckResult> out;
    const std::string degenerate = p.degenerate() ? "a = b: degenerate hull" : "";

    {
        double worst = 0.0;
        for (int i = 0; i < opt.samples; ++i)
            worst = std::max(worst, invariant_drift(p, 2.0 * energy(rng), 40, 1e6, opt.perturb_recursion).max_drift);
        out.push_back(detail::finish("invariant conservation", worst, 1e-9, degenerate));
    }
    {
        std::uniform_real_distribution<double> entry(-10.0, 10.0);
        double worst = 0.0;
        for (int i = 0; i < opt.samples; ++i) {
            const TraceTriple t{entry(rng), entry(rng), entry(rng), 0};
            const TraceTriple r = step_inverse(step(t));
            const double scale = std::max({1.0, std::abs(t.x_next), std::abs(t.x_cur), std::abs(t.x_prev)});
            worst = std::max({worst, std::abs(r.x_next - t.x_next) / scale, std::abs(r.x_cur - t.x_cur) / scale,
                              std::abs(r.x_prev - t.x_prev) / scale});
        }
        out.push_back(detail::finish("trace map inversion", worst, 1e-12));
    }
    {
        const SignedWindow w = omega_s(1, static_cast<long long>(fibonacci(12)));
        double worst = 0.0;
        for (int i = 0; i < opt.samples / 4 + 1; ++i) {
            const double e = energy(rng);
            for (int k = 1; k <= 12; ++k) {
                const double x = half_trace<double>(p, e, k);
                if (!(std::abs(x) < 1e100)) break;
                const double half = 0.5 * cocycle(w, p, e, static_cast<long long>(fibonacci(k))).trace();
                worst = std::max(worst, detail::rel_gap(x, half));
            }
        }
        out.push_back(detail::finish("recursion vs cocycle", worst, 1e-9));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < opt.samples; ++i) {
            const double e = energy(rng);
            for (int k = 0; k <= 20; ++k) {
                if (!(std::abs(half_trace<double>(p, e, k)) < 1e100)) break;
                const double sign = fibonacci(k) % 2 == 0 ? 1.0 : -1.0;
                worst = std::max(worst, detail::rel_gap(trace_value(p, -e, k), sign * trace_value(p, e, k)));
            }
        }
        out.push_back(detail::finish("parity under E -> -E", worst, 1e-9));
    }
    {
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            const auto conj = cyclic_conjugates(k);
            for (int i = 0; i < 5; ++i) {
                const double e = energy(rng);
                const double ref = half_trace<double>(p, e, k + 1);
                if (!(std::abs(ref) < 1e100)) continue;
                for (const Word& c : conj) worst = std::max(worst, detail::rel_gap(periodic_half_trace(c, p, e), ref));
            }
        }
        out.push_back(detail::finish("cyclic trace invariance", worst, 1e-9));
    }
    {
        const SignedWindow w = omega_s(1, 2 * static_cast<long long>(fibonacci(10)));
        double worst = 0.0;
        for (int k = 3; k <= 10; ++k)
            for (int i = 0; i < 10; ++i)
                worst = std::max(worst, cayley_hamilton_defect(w, p, -4.0 + 8.0 * (i + 0.5) / 10.0, k));
        out.push_back(detail::finish("cayley-hamilton defect", worst, 1e-8));
    }
    {
        const SignedWindow w = omega_s(1, 2 * static_cast<long long>(fibonacci(16)));
        int failures = 0;
        for (int k = 2; k <= 15; ++k)
            if (!square_prefix_check(w, k)) ++failures;
        out.push_back(detail::finish("square prefixes", failures, 0.0));
    }
    {
        const SignedWindow w = omega_s(1, 4096);
        double worst = 0.0;
        for (int i = 0; i < opt.samples / 4 + 1; ++i) worst = std::max(worst, cocycle_scaled(w, p, energy(rng), 4096).det_defect());
        out.push_back(detail::finish("cocycle determinant", worst, 1e-10));
    }
    {
        int failures = 0;
        for (std::size_t L = 1; L <= 50; ++L)
            if (subwords(L).size() != L + 1) ++failures;
        out.push_back(detail::finish("factor complexity", failures, 0.0));
    }
    {
        int failures = 0;
        for (int k = 2; k <= 24; ++k)
            if (!(fib_prefix(k + 1) == fib_prefix(k) + fib_prefix(k - 1))) ++failures;
        out.push_back(detail::finish("prefix recursion", failures, 0.0));
    }
    return out;
}

} // namespace fibspec
