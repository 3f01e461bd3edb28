#pragma once

// Transfer-matrix cocycle of the difference equation
//   w_{n+1} u_{n+1} + w_n u_{n-1} = E u_n
// acting on U_n = (u_n, w_n u_{n-1}).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fibspec/error.hpp"
#include "fibspec/tracemap.hpp"
#include "fibspec/words.hpp"

namespace fibspec {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

struct TransferMatrix {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    static TransferMatrix identity() { return {}; }

    double det() const { return m11 * m22 - m12 * m21; }
    double trace() const { return m11 + m22; }
    double frobenius() const { return std::hypot(std::hypot(m11, m12), std::hypot(m21, m22)); }

    /// Largest singular value.
    double operator_norm() const {
        const double s = std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
        if (s == 0.0 || !std::isfinite(s)) return s;
        const TransferMatrix u = scaled(1.0 / s);
        const double f2 = u.m11 * u.m11 + u.m12 * u.m12 + u.m21 * u.m21 + u.m22 * u.m22;
        const double d = u.det();
        const double disc = std::max(0.0, f2 * f2 - 4.0 * d * d);
        return s * std::sqrt(0.5 * (f2 + std::sqrt(disc)));
    }

    TransferMatrix scaled(double s) const { return {m11 * s, m12 * s, m21 * s, m22 * s}; }

    friend TransferMatrix operator*(const TransferMatrix& l, const TransferMatrix& r) {
        return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
                l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
    }
    friend TransferMatrix operator+(const TransferMatrix& l, const TransferMatrix& r) {
        return {l.m11 + r.m11, l.m12 + r.m12, l.m21 + r.m21, l.m22 + r.m22};
    }
    friend TransferMatrix operator-(const TransferMatrix& l, const TransferMatrix& r) {
        return {l.m11 - r.m11, l.m12 - r.m12, l.m21 - r.m21, l.m22 - r.m22};
    }
    friend Vec2 operator*(const TransferMatrix& m, const Vec2& v) {
        return {m.m11 * v.x + m.m12 * v.y, m.m21 * v.x + m.m22 * v.y};
    }
};

/// T(n, E) = (1/w) [[E, -1], [w^2, 0]] for hopping w = w_n.
inline TransferMatrix local_matrix(double hop, double energy) {
    detail::require(hop > 0.0, ErrorKind::InvalidArgument, "hopping must be positive");
    return {energy / hop, -1.0 / hop, hop, 0.0};
}

inline TransferMatrix local_matrix_inverse(double hop, double energy) {
    // det = 1, so the inverse is the adjugate.
    return {0.0, 1.0 / hop, -hop, energy / hop};
}

inline void require_coverage(const SignedWindow& w, long long from, long long to) {
    if (!w.covers(from, to))
        throw Error(ErrorKind::WindowTooShort, "window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi()) +
                                                   "] does not cover [" + std::to_string(from) + ", " +
                                                   std::to_string(to) + "]");
}

/// M(n, E) = T(n, E) ... T(1, E) over the window's letters.
inline TransferMatrix cocycle(const SignedWindow& w, const HoppingPair& p, double energy, long long n) {
    detail::require(n >= 1, ErrorKind::InvalidArgument, "cocycle requires n >= 1");
    require_coverage(w, 1, n);
    TransferMatrix m;
    for (long long i = 1; i <= n; ++i) m = local_matrix(p.hop(w.at(i)), energy) * m;
    return m;
}

/// Half-trace of the cocycle over one period of a periodic word.
inline double periodic_half_trace(const Word& period, const HoppingPair& p, double energy) {
    TransferMatrix m;
    for (Letter l : period) m = local_matrix(p.hop(l), energy) * m;
    return 0.5 * m.trace();
}

/// Product M = exp(log_scale) * matrix, renormalized every `renorm_every`
/// factors so long orbits stay in range.
struct ScaledProduct {
    TransferMatrix matrix;
    double log_scale = 0.0;

    double log_norm() const { return log_scale + std::log(matrix.frobenius()); }

    /// det(M) - 1 relative to the natural scale |M|^2.
    double det_defect() const {
        const double f = matrix.frobenius();
        const double det_true_over_f2 = matrix.det() / (f * f);
        return std::abs(det_true_over_f2 - std::exp(-2.0 * (log_scale + std::log(f))));
    }
};

inline constexpr int renorm_every = 32;

class CocycleAccumulator {
public:
    void push(const TransferMatrix& t) {
        product_.matrix = t * product_.matrix;
        if (++count_ % renorm_every == 0) renormalize();
    }

    ScaledProduct value() const {
        ScaledProduct out = product_;
        const double f = out.matrix.frobenius();
        if (f > 0.0) {
            out.matrix = out.matrix.scaled(1.0 / f);
            out.log_scale += std::log(f);
        }
        return out;
    }

    long long count() const { return count_; }

private:
    void renormalize() {
        const double f = product_.matrix.frobenius();
        product_.matrix = product_.matrix.scaled(1.0 / f);
        product_.log_scale += std::log(f);
    }

    ScaledProduct product_;
    long long count_ = 0;
};

inline ScaledProduct cocycle_scaled(const SignedWindow& w, const HoppingPair& p, double energy, long long n) {
    detail::require(n >= 1, ErrorKind::InvalidArgument, "cocycle requires n >= 1");
    require_coverage(w, 1, n);
    CocycleAccumulator acc;
    for (long long i = 1; i <= n; ++i) acc.push(local_matrix(p.hop(w.at(i)), energy));
    return acc.value();
}

/// U_n = (u_n, w_n u_{n-1}).
struct SolutionState {
    double u_cur = 0.0;
    double weighted_prev = 0.0;
    long long position = 0;

    Vec2 vec() const { return {u_cur, weighted_prev}; }
};

/// Solution of the three-term recurrence with data (u_0, u_1), returned as
/// the states U_1 ... U_{n_max}.
inline std::vector<SolutionState> evolve_solution(const SignedWindow& w, const HoppingPair& p, double energy,
                                                  double u0, double u1, long long n_max) {
    detail::require(n_max >= 1, ErrorKind::InvalidArgument, "evolve_solution requires n_max >= 1");
    require_coverage(w, 1, n_max);
    std::vector<SolutionState> out;
    out.reserve(static_cast<std::size_t>(n_max));
    double prev = u0, cur = u1;
    out.push_back({cur, p.hop(w.at(1)) * prev, 1});
    for (long long n = 2; n <= n_max; ++n) {
        // w_n u_n = E u_{n-1} - w_{n-1} u_{n-2}
        const double next = (energy * cur - p.hop(w.at(n - 1)) * prev) / p.hop(w.at(n));
        prev = cur;
        cur = next;
        out.push_back({cur, p.hop(w.at(n)) * prev, n});
    }
    return out;
}

/// U_0 = T(1)^{-1} U_1 for data (u_0, u_1); then U_n = M(n) U_0.
inline Vec2 state_before_origin(const SignedWindow& w, const HoppingPair& p, double energy, double u0, double u1) {
    require_coverage(w, 1, 1);
    const double h1 = p.hop(w.at(1));
    return local_matrix_inverse(h1, energy) * Vec2{u1, h1 * u0};
}

struct LyapunovEstimate {
    double gamma = 0.0;
    long long n_used = 0;
    double residual = 0.0;
};

/// gamma(E) from the slope of log|M(F_j, E)| against F_j over the last half
/// of the Fibonacci checkpoints F_j <= n, clamped at 0.
inline LyapunovEstimate lyapunov(const SignedWindow& w, const HoppingPair& p, double energy, long long n) {
    detail::require(n >= 2, ErrorKind::InvalidArgument, "lyapunov requires n >= 2");
    require_coverage(w, 1, n);

    std::vector<double> times, logs;
    CocycleAccumulator acc;
    int j = 1;
    long long next_checkpoint = static_cast<long long>(fibonacci(j));
    for (long long i = 1; i <= n; ++i) {
        acc.push(local_matrix(p.hop(w.at(i)), energy));
        if (i == next_checkpoint) {
            times.push_back(static_cast<double>(i));
            logs.push_back(acc.value().log_norm());
            while (static_cast<long long>(fibonacci(j)) <= i) ++j;
            next_checkpoint = static_cast<long long>(fibonacci(j));
        }
    }
    if (times.empty() || times.back() != static_cast<double>(n)) {
        times.push_back(static_cast<double>(n));
        logs.push_back(acc.value().log_norm());
    }

    const std::size_t first = times.size() / 2;
    const std::size_t count = times.size() - first;
    LyapunovEstimate est;
    est.n_used = n;
    if (count < 2) {
        est.gamma = std::max(0.0, logs.back() / times.back());
        return est;
    }
    double mt = 0, ml = 0;
    for (std::size_t i = first; i < times.size(); ++i) mt += times[i], ml += logs[i];
    mt /= static_cast<double>(count);
    ml /= static_cast<double>(count);
    double stt = 0, stl = 0;
    for (std::size_t i = first; i < times.size(); ++i) {
        stt += (times[i] - mt) * (times[i] - mt);
        stl += (times[i] - mt) * (logs[i] - ml);
    }
    const double slope = stl / stt;
    double ss = 0;
    for (std::size_t i = first; i < times.size(); ++i) {
        const double r = logs[i] - (ml + slope * (times[i] - mt));
        ss += r * r;
    }
    est.gamma = std::max(0.0, slope);
    est.residual = std::sqrt(ss / static_cast<double>(count));
    return est;
}

/// Over the special element omega_s.
inline LyapunovEstimate lyapunov(const HoppingPair& p, double energy, long long n) {
    return lyapunov(omega_s(1, n), p, energy, n);
}

inline void require_square(const SignedWindow& w, int k) {
    detail::require(k >= 1, ErrorKind::InvalidArgument, "level must be >= 1");
    if (!square_prefix_check(w, k - 1))
        throw Error(ErrorKind::Precondition,
                    "window does not begin with the square of a conjugate of s_" + std::to_string(k));
}

/// |M(2F_k) - 2x_k M(F_k) + I| / (1 + |M(F_k)|^2), operator norms. The window
/// must begin with x x, x a rotation of s_k, so that M(2F_k) = M(F_k)^2 and
/// Tr M(F_k) = 2 x_k.
inline double cayley_hamilton_defect(const SignedWindow& w, const HoppingPair& p, double energy, int k) {
    require_square(w, k);
    const auto period = static_cast<long long>(fibonacci(k));
    const TransferMatrix m1 = cocycle(w, p, energy, period);
    const TransferMatrix m2 = cocycle(w, p, energy, 2 * period);
    const double xk = trace_value(p, energy, k);
    const TransferMatrix lhs = m2 - m1.scaled(2.0 * xk) + TransferMatrix::identity();
    const double scale = m1.operator_norm();
    return lhs.operator_norm() / (1.0 + scale * scale);
}

/// min over levels k' <= k with the square structure of
/// max(|U_{F_k'}|, |U_{2F_k'}|) / |U_0|.
inline double no_decay_witness(const SignedWindow& w, const HoppingPair& p, double energy, int k, double u0,
                               double u1) {
    detail::require(u0 != 0.0 || u1 != 0.0, ErrorKind::InvalidArgument, "solution vanishes identically");
    detail::require(k >= 1, ErrorKind::InvalidArgument, "level must be >= 1");
    const Vec2 start = state_before_origin(w, p, energy, u0, u1);
    const double base = start.norm();
    double best = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= k; ++level) {
        const auto period = static_cast<long long>(fibonacci(level));
        if (!w.covers(1, 2 * period)) break;
        if (!square_prefix_check(w, level - 1)) continue;
        const double r1 = (cocycle(w, p, energy, period) * start).norm();
        const double r2 = (cocycle(w, p, energy, 2 * period) * start).norm();
        best = std::min(best, std::max(r1, r2) / base);
    }
    if (!std::isfinite(best))
        throw Error(ErrorKind::Precondition, "no level <= " + std::to_string(k) + " has the square structure");
    return best;
}

} // namespace fibspec
