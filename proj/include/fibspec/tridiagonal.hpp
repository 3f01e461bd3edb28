#pragma once

// Symmetric tridiagonal kernels: Sturm counts, bisection eigenvalues and
// inverse-iteration eigenvectors. Diagonal is zero for every matrix built in
// this library, but the kernels take it explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fibspec/error.hpp"

namespace fibspec {

class SymTridiagonal {
public:
    SymTridiagonal() = default;
    SymTridiagonal(std::vector<double> diag, std::vector<double> off) : diag_(std::move(diag)), off_(std::move(off)) {
        detail::require(!diag_.empty(), ErrorKind::InvalidArgument, "empty tridiagonal matrix");
        detail::require(off_.size() + 1 == diag_.size(), ErrorKind::InvalidArgument,
                        "off-diagonal length must be dimension - 1");
        off_sq_.resize(off_.size());
        for (std::size_t i = 0; i < off_.size(); ++i) off_sq_[i] = off_[i] * off_[i];
        double scale = 0.0;
        for (double e : off_) scale = std::max(scale, std::abs(e));
        for (double d : diag_) scale = std::max(scale, std::abs(d));
        pivmin_ = std::numeric_limits<double>::min() * std::max(1.0, scale * scale);
    }

    static SymTridiagonal zero_diagonal(std::vector<double> off) {
        std::vector<double> diag(off.size() + 1, 0.0);
        return SymTridiagonal(std::move(diag), std::move(off));
    }

    std::size_t size() const noexcept { return diag_.size(); }
    std::span<const double> diag() const noexcept { return diag_; }
    std::span<const double> off() const noexcept { return off_; }

    /// Gershgorin enclosure of the spectrum.
    std::pair<double, double> gershgorin() const {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < diag_.size(); ++i) {
            double r = 0.0;
            if (i > 0) r += std::abs(off_[i - 1]);
            if (i + 1 < diag_.size()) r += std::abs(off_[i]);
            lo = std::min(lo, diag_[i] - r);
            hi = std::max(hi, diag_[i] + r);
        }
        return {lo, hi};
    }

    /// Number of eigenvalues strictly below x (negative pivots of T - x).
    std::size_t sturm_count(double x) const {
        std::size_t count = 0;
        double q = diag_[0] - x;
        if (std::abs(q) < pivmin_) q = -pivmin_;
        if (q < 0) ++count;
        for (std::size_t i = 1; i < diag_.size(); ++i) {
            q = diag_[i] - x - off_sq_[i - 1] / q;
            if (std::abs(q) < pivmin_) q = -pivmin_;
            if (q < 0) ++count;
        }
        return count;
    }

    /// Sturm counts at up to `batch` shifts in one sweep over the matrix;
    /// the independent pivot chains overlap in the pipeline.
    static constexpr std::size_t batch = 8;

    void sturm_count_batch(std::span<const double> xs, std::span<std::size_t> counts) const {
        for (std::size_t start = 0; start < xs.size(); start += batch) {
            const std::size_t m = std::min(batch, xs.size() - start);
            std::array<double, batch> x{}, q{};
            std::array<std::size_t, batch> c{};
            for (std::size_t j = 0; j < m; ++j) x[j] = xs[start + j];
            for (std::size_t j = 0; j < batch; ++j) {
                q[j] = diag_[0] - x[j];
                if (std::abs(q[j]) < pivmin_) q[j] = -pivmin_;
                c[j] = q[j] < 0 ? 1 : 0;
            }
            for (std::size_t i = 1; i < diag_.size(); ++i) {
                const double d = diag_[i], e2 = off_sq_[i - 1];
                for (std::size_t j = 0; j < batch; ++j) {
                    double v = d - x[j] - e2 / q[j];
                    if (std::abs(v) < pivmin_) v = -pivmin_;
                    q[j] = v;
                    c[j] += v < 0 ? 1 : 0;
                }
            }
            for (std::size_t j = 0; j < m; ++j) counts[start + j] = c[j];
        }
    }

    /// Eigenvalues with indices [first, last) (ascending), each bracketed to
    /// width <= tol by Sturm bisection.
    std::vector<double> eigenvalues(double tol, std::size_t first, std::size_t last) const {
        detail::require(tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
        last = std::min(last, size());
        auto [glo, ghi] = gershgorin();
        glo -= tol;
        ghi += tol;
        const std::size_t n = last > first ? last - first : 0;
        std::vector<double> lo(n, glo), hi(n, ghi), mid(n);
        std::vector<std::size_t> counts(n);
        const int iters = static_cast<int>(std::ceil(std::log2(std::max(ghi - glo, tol) / tol))) + 2;
        for (int it = 0; it < iters; ++it) {
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
            sturm_count_batch(mid, counts);
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] <= first + i)
                    lo[i] = mid[i];
                else
                    hi[i] = mid[i];
            }
        }
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (lo[i] + hi[i]);
        return out;
    }

    std::vector<double> eigenvalues(double tol) const { return eigenvalues(tol, 0, size()); }

    /// Solves (T - shift) x = rhs by Gaussian elimination with partial pivoting.
    std::vector<double> solve_shifted(double shift, std::vector<double> rhs) const {
        const std::size_t n = size();
        std::vector<double> d(n), du(off_), dl(off_), du2(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) d[i] = diag_[i] - shift;
        const double tiny = pivmin_ + std::numeric_limits<double>::epsilon() * (std::abs(shift) + 1.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] == 0.0) d[i] = tiny;
                const double fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                rhs[i + 1] -= fact * rhs[i];
                du2[i] = 0.0;
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                const double temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                const double tb = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = tb - fact * rhs[i + 1];
            }
        }
        if (d[n - 1] == 0.0) d[n - 1] = tiny;
        rhs[n - 1] /= d[n - 1];
        if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
        for (std::size_t i = n > 2 ? n - 2 : 0; i-- > 0;)
            rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
        return rhs;
    }

    /// Unit eigenvector for a computed eigenvalue by inverse iteration.
    std::vector<double> eigenvector(double lambda, int iterations = 3) const {
        const std::size_t n = size();
        std::vector<double> v(n);
        // Deterministic, non-symmetric start vector.
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + 0.7 * static_cast<double>(i));
        const double shift = lambda + 1e-13 * (std::abs(lambda) + 1.0);
        for (int it = 0; it < iterations; ++it) {
            v = solve_shifted(shift, std::move(v));
            double nrm = 0.0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (double& x : v) x /= nrm;
        }
        return v;
    }

private:
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> off_sq_;
    double pivmin_ = std::numeric_limits<double>::min();
};

/// Fraction of |v|^2 carried by the first and last `fraction` of the sites.
inline double outer_weight(std::span<const double> v, double fraction = 0.1) {
    const std::size_t n = v.size();
    const auto edge = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    double outer = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = v[i] * v[i];
        total += w;
        if (i < edge || i + edge >= n) outer += w;
    }
    return total > 0.0 ? outer / total : 0.0;
}

} // namespace fibspec
