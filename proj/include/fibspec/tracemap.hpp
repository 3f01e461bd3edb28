#pragma once

// Trace map T(x, y, z) = (2xy - z, x, y) acting on consecutive half-traces
// x_k(E) = Tr M(F_k, E) / 2 over the special hull element.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fibspec/error.hpp"
#include "fibspec/log_real.hpp"
#include "fibspec/words.hpp"

namespace fibspec {

/// The two hopping values. Equal values are accepted (the free chain) but
/// reported through degenerate().
class HoppingPair {
public:
    HoppingPair(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw Error(ErrorKind::InvalidArgument, "hopping values must be finite and positive");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    bool degenerate() const noexcept { return a_ == b_; }

    double hop(Letter l) const noexcept { return l == Letter::A ? a_ : b_; }

    /// max(2a, 2b): bound on the operator norm.
    double norm_bound() const noexcept { return 2.0 * std::max(a_, b_); }

    /// (a^2 + b^2) / 2ab, equal to x_{-1} for every energy.
    double coupling() const noexcept { return (a_ * a_ + b_ * b_) / (2.0 * a_ * b_); }

private:
    double a_;
    double b_;
};

/// (x_{k+1}, x_k, x_{k-1}) with level = k.
struct TraceTriple {
    double x_next = 0.0;
    double x_cur = 0.0;
    double x_prev = 0.0;
    int level = 0;

    bool finite() const { return std::isfinite(x_next) && std::isfinite(x_cur) && std::isfinite(x_prev); }
};

/// (x_1, x_0, x_{-1}) = (E/2a, E/2b, (a^2+b^2)/2ab) at level 0.
inline TraceTriple initial_triple(const HoppingPair& p, double energy) {
    return {energy / (2.0 * p.a()), energy / (2.0 * p.b()), p.coupling(), 0};
}

inline TraceTriple step_unchecked(const TraceTriple& t) {
    return {2.0 * t.x_next * t.x_cur - t.x_prev, t.x_next, t.x_cur, t.level + 1};
}

inline TraceTriple step(const TraceTriple& t) {
    TraceTriple out = step_unchecked(t);
    if (!out.finite())
        throw Error(ErrorKind::NumericalDivergence, "trace map overflowed at level " + std::to_string(out.level));
    return out;
}

inline TraceTriple step_inverse(const TraceTriple& t) {
    TraceTriple out{t.x_cur, t.x_prev, 2.0 * t.x_cur * t.x_prev - t.x_next, t.level - 1};
    if (!out.finite())
        throw Error(ErrorKind::NumericalDivergence, "inverse trace map overflowed at level " + std::to_string(out.level));
    return out;
}

/// Fricke invariant x^2 + y^2 + z^2 - 2xyz - 1.
inline double invariant_value(const TraceTriple& t) {
    return t.x_next * t.x_next + t.x_cur * t.x_cur + t.x_prev * t.x_prev - 2.0 * t.x_next * t.x_cur * t.x_prev - 1.0;
}

inline double invariant_expected(const HoppingPair& p) {
    const double a2 = p.a() * p.a(), b2 = p.b() * p.b();
    // (a^2 - b^2)^2 / 4a^2b^2 avoids cancellation near a = b.
    const double d = a2 - b2;
    return d * d / (4.0 * a2 * b2);
}

/// 1 + sqrt(I): bound on |x_k| over the spectrum for k >= 2.
inline double trace_bound(const HoppingPair& p) { return 1.0 + std::sqrt(invariant_expected(p)); }

/// Triple with x_cur = x_k, reached by forward or inverse iteration.
inline TraceTriple triple_at(const HoppingPair& p, double energy, int k) {
    TraceTriple t = initial_triple(p, energy);
    while (t.level < k) t = step(t);
    while (t.level > k) t = step_inverse(t);
    return t;
}

/// x_k(E) for k >= -1 via the scalar recursion x_{k+1} = 2 x_k x_{k-1} - x_{k-2}.
inline double trace_value(const HoppingPair& p, double energy, int k) {
    detail::require(k >= -1, ErrorKind::InvalidArgument, "trace_value requires k >= -1");
    TraceTriple t = initial_triple(p, energy);
    if (k == -1) return t.x_prev;
    if (k == 0) return t.x_cur;
    while (t.level < k - 1) t = step(t);
    return t.x_next;
}

/// Half-trace x_k(E) evaluated in Real arithmetic for band searches. Orbits
/// whose values pass 1e300 have escaped, so the result saturates to +inf
/// instead of overflowing to nan.
template <typename Real = long double>
double half_trace(const HoppingPair& p, double energy, int k) {
    const Real e = energy, a = p.a(), b = p.b();
    Real next = e / (2 * a), cur = e / (2 * b), prev = (a * a + b * b) / (2 * a * b);
    if (k == -1) return static_cast<double>(prev);
    if (k == 0) return static_cast<double>(cur);
    constexpr Real huge = 1e300;
    for (int lvl = 0; lvl < k - 1; ++lvl) {
        const Real n2 = 2 * next * cur - prev;
        prev = cur;
        cur = next;
        next = n2;
        if (!(std::abs(next) < huge)) return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(next);
}

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
#else
using wide_real = long double;
#endif

struct InvariantDrift {
    double max_drift = 0.0;  // max |I_k - I| / (1 + I)
    int levels = 0;          // triples examined
};

/// Invariant along the orbit of E in wide precision, for levels 0..k_max,
/// stopping once a trace exceeds `cutoff` in modulus. In doubles the
/// cancellation in x^2 + y^2 + z^2 - 2xyz leaves errors near eps * |x|^2,
/// so the orbit and the invariant are both carried in wide_real. A nonzero
/// `perturb` scales each new trace by (1 + perturb), breaking conservation.
inline InvariantDrift invariant_drift(const HoppingPair& p, double energy, int k_max, double cutoff = 1e6,
                                      double perturb = 0.0) {
    using R = wide_real;
    const R a = p.a(), b = p.b(), e = energy;
    const R a2 = a * a, b2 = b * b;
    const R expected = (a2 - b2) * (a2 - b2) / (4 * a2 * b2);
    R x = e / (2 * a), y = e / (2 * b), z = (a2 + b2) / (2 * a * b);
    InvariantDrift out;
    for (int k = 0; k <= k_max; ++k) {
        const R v = x * x + y * y + z * z - 2 * x * y * z - 1;
        const double d = static_cast<double>((v - expected) / (1 + expected));
        out.max_drift = std::max(out.max_drift, std::abs(d));
        ++out.levels;
        R next = 2 * x * y - z;
        if (perturb != 0.0) next *= 1 + static_cast<R>(perturb);
        z = y;
        y = x;
        x = next;
        if (!(std::abs(static_cast<double>(x)) <= cutoff)) break;
    }
    return out;
}

/// Guard band for the escape threshold |x| > 1.
inline constexpr double escape_guard = 1.0 + 1e-12;

struct EscapeResult {
    enum class Kind { Bounded, Escaped };
    Kind kind = Kind::Bounded;
    /// K_max when bounded; the first k with |x_k|, |x_{k+1}| > 1 when escaped.
    int level = 0;
    /// Escape detected through overflow rather than the threshold.
    bool non_finite = false;
    TraceTriple last_triple;

    bool bounded() const { return kind == Kind::Bounded; }
    bool escaped() const { return kind == Kind::Escaped; }
};

/// Scans the pairs (x_j, x_{j+1}) for 0 <= j <= K_max. Bounded(K_max) means
/// E lies in every cover sigma_j u sigma_{j+1}, j <= K_max; borderline pairs
/// within the guard band count as bounded.
inline EscapeResult escape_classify(const HoppingPair& p, double energy, int k_max) {
    detail::require(k_max >= 2, ErrorKind::InvalidArgument, "escape_classify requires K_max >= 2");
    TraceTriple t = initial_triple(p, energy);
    for (;;) {
        if (!t.finite()) return {EscapeResult::Kind::Escaped, t.level, true, t};
        if (std::abs(t.x_cur) > escape_guard && std::abs(t.x_next) > escape_guard)
            return {EscapeResult::Kind::Escaped, t.level, false, t};
        if (t.level >= k_max) return {EscapeResult::Kind::Bounded, k_max, false, t};
        t = step_unchecked(t);
    }
}

/// Largest c with |x_{k+l}| >= c^{F_l} for 0 <= l <= L after an escape at
/// level k, evaluated in log-domain so the superexponential tail is exact.
inline double growth_rate_after_escape(const HoppingPair& p, double energy, int k_escape, int L) {
    detail::require(L >= 0, ErrorKind::InvalidArgument, "growth_rate_after_escape requires L >= 0");
    const EscapeResult r = escape_classify(p, energy, std::max(k_escape, 2));
    if (!r.escaped() || r.level != k_escape)
        throw Error(ErrorKind::Precondition, "energy did not escape at level " + std::to_string(k_escape));

    // Replay the orbit in log-domain from the start.
    const TraceTriple t0 = initial_triple(p, energy);
    LogReal next = LogReal::from(t0.x_next), cur = LogReal::from(t0.x_cur), prev = LogReal::from(t0.x_prev);
    const LogReal two = LogReal::from(2.0);
    for (int lvl = 0; lvl < k_escape; ++lvl) {
        LogReal n2 = two * next * cur - prev;
        prev = cur;
        cur = next;
        next = n2;
    }
    double min_rate = std::numeric_limits<double>::infinity();
    for (int l = 0; l <= L; ++l) {
        min_rate = std::min(min_rate, cur.log_abs / static_cast<double>(fibonacci(l)));
        LogReal n2 = two * next * cur - prev;
        prev = cur;
        cur = next;
        next = n2;
    }
    return std::exp(min_rate);
}

} // namespace fibspec
