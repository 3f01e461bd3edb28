#pragma once

// Band sets sigma_k = {E : |x_k(E)| <= 1}, the nested covers
// sigma_k u sigma_{k+1} of the spectrum, and escape-time approximations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fibspec/error.hpp"
#include "fibspec/parallel.hpp"
#include "fibspec/tracemap.hpp"
#include "fibspec/tridiagonal.hpp"
#include "fibspec/words.hpp"

namespace fibspec {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class BandKind { SigmaK, Cover, Escape, Window, Synthetic };

inline const char* to_string(BandKind k) {
    switch (k) {
    case BandKind::SigmaK: return "sigma_k";
    case BandKind::Cover: return "cover";
    case BandKind::Escape: return "escape";
    case BandKind::Window: return "window";
    case BandKind::Synthetic: return "synthetic";
    }
    return "unknown";
}

/// Sorted, pairwise disjoint closed intervals.
struct BandSet {
    std::vector<Interval> bands;
    BandKind kind = BandKind::Synthetic;
    int level = 0;
    std::optional<HoppingPair> params;
    double tol = 0.0;
    /// Band edges closer than the merge tolerance that were fused (closed gaps).
    std::size_t touching = 0;

    std::size_t size() const { return bands.size(); }
    bool empty() const { return bands.empty(); }
    double lo() const { return bands.front().lo; }
    double hi() const { return bands.back().hi; }

    /// Distance from x to the set (0 inside).
    double distance(double x) const {
        detail::require(!bands.empty(), ErrorKind::EmptySet, "distance to an empty band set");
        auto it = std::upper_bound(bands.begin(), bands.end(), x,
                                   [](double v, const Interval& b) { return v < b.lo; });
        double best = std::numeric_limits<double>::infinity();
        if (it != bands.end()) best = std::min(best, it->lo - x);
        if (it != bands.begin()) {
            const Interval& prev = *std::prev(it);
            best = std::min(best, x <= prev.hi ? 0.0 : x - prev.hi);
        }
        return std::max(best, 0.0);
    }

    bool contains(double x, double slack = 0.0) const { return !bands.empty() && distance(x) <= slack; }

    /// Intersection with [lo, hi].
    BandSet clipped(double lo, double hi) const {
        BandSet out = *this;
        out.bands.clear();
        out.kind = BandKind::Window;
        for (const Interval& b : bands) {
            const double l = std::max(b.lo, lo), h = std::min(b.hi, hi);
            if (l <= h) out.bands.push_back({l, h});
        }
        return out;
    }
};

/// Sorts and fuses intervals whose separation is <= merge_tol; returns the
/// number of fusions between intervals that did not overlap.
inline std::size_t normalize_bands(std::vector<Interval>& bands, double merge_tol) {
    std::sort(bands.begin(), bands.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    std::vector<Interval> out;
    std::size_t touching = 0;
    for (const Interval& b : bands) {
        if (!out.empty() && b.lo - out.back().hi <= merge_tol) {
            if (b.lo >= out.back().hi) ++touching;
            out.back().hi = std::max(out.back().hi, b.hi);
        } else {
            out.push_back(b);
        }
    }
    bands = std::move(out);
    return touching;
}

inline double lebesgue_measure(const BandSet& bs) {
    double m = 0.0;
    for (const Interval& b : bs.bands) m += b.length();
    return m;
}

/// Energy range containing every spectrum considered: +-(max(2a,2b) + margin).
struct EnergyWindow {
    double lo = 0.0;
    double hi = 0.0;

    static constexpr double margin = 1e-6;

    static EnergyWindow for_pair(const HoppingPair& p) {
        const double r = p.norm_bound() + margin;
        return {-r, r};
    }
    double width() const { return hi - lo; }
};

namespace detail {

/// Boundary between a point with |d| <= 1 and a point with |d| > 1.
template <typename Disc>
double bisect_edge(const Disc& disc, double inside, double outside, double tol) {
    while (std::abs(outside - inside) > tol) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        if (std::abs(disc(mid)) <= 1.0)
            inside = mid;
        else
            outside = mid;
    }
    return 0.5 * (inside + outside);
}

/// Zero of disc in [lo, hi] given a sign change.
template <typename Disc>
double bisect_zero(const Disc& disc, double lo, double hi) {
    const double flo = disc(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = disc(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Maximizer of |disc| on [lo, hi] where |disc| is unimodal. Stops early once
/// a probe is clearly outside the band (|disc| > stop_above).
template <typename Disc>
double locate_gap_point(const Disc& disc, double lo, double hi, double stop_above) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = std::abs(disc(x1)), f2 = std::abs(disc(x2));
    for (int it = 0; it < 200; ++it) {
        if (f1 > stop_above) return x1;
        if (f2 > stop_above) return x2;
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = std::abs(disc(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = std::abs(disc(x1));
        }
        if (!(x1 > lo && x2 < hi && x1 <= x2)) break;
    }
    return f1 >= f2 ? x1 : x2;
}

/// Dirichlet chain on 2N - 1 sites with the N-periodic hoppings w_2 ... w_{2N-1}.
/// Its eigenvalues of odd rank are the N zeros of the half-trace, one inside
/// each band; those of even rank are the N - 1 Dirichlet eigenvalues, one in
/// each closed gap.
inline SymTridiagonal doubled_period_chain(const std::vector<double>& period) {
    const std::size_t n = period.size();
    std::vector<double> off(2 * n - 2);
    for (std::size_t i = 0; i < off.size(); ++i) off[i] = period[(i + 1) % n];
    return SymTridiagonal::zero_diagonal(std::move(off));
}

/// Slightly off-centre so symmetric spectra do not put zeros on split points.
inline double split_point(double lo, double hi) { return lo + 0.4990234375 * (hi - lo); }

/// Subintervals [lo, hi) each containing exactly one odd-rank eigenvalue.
inline std::vector<std::pair<double, double>> isolate_band_zeros(const SymTridiagonal& chain, double lo, double hi) {
    struct Node {
        double lo, hi;
        std::size_t clo, chi;
    };
    auto odd_ranks = [](std::size_t clo, std::size_t chi) {
        // 0-based eigenvalue indices clo..chi-1; odd rank <=> even index.
        auto evens_below = [](std::size_t c) { return (c + 1) / 2; };
        return evens_below(chi) - evens_below(clo);
    };
    std::vector<std::pair<double, double>> found;
    std::vector<Node> frontier{{lo, hi, chain.sturm_count(lo), chain.sturm_count(hi)}};
    if (frontier.front().clo != 0 || frontier.front().chi != chain.size())
        throw Error(ErrorKind::RootIsolation, "energy window does not enclose the periodic chain spectrum");
    std::vector<double> mids;
    std::vector<std::size_t> counts;
    while (!frontier.empty()) {
        std::vector<Node> split;
        for (const Node& nd : frontier) {
            const std::size_t z = odd_ranks(nd.clo, nd.chi);
            if (z == 0) continue;
            if (z == 1) {
                found.emplace_back(nd.lo, nd.hi);
                continue;
            }
            const double mid = split_point(nd.lo, nd.hi);
            if (!(mid > nd.lo && mid < nd.hi))
                throw Error(ErrorKind::RootIsolation, "band zeros not separable near E = " + std::to_string(mid));
            split.push_back(nd);
        }
        mids.resize(split.size());
        counts.resize(split.size());
        for (std::size_t i = 0; i < split.size(); ++i) mids[i] = split_point(split[i].lo, split[i].hi);
        chain.sturm_count_batch(mids, counts);
        frontier.clear();
        for (std::size_t i = 0; i < split.size(); ++i) {
            frontier.push_back({split[i].lo, mids[i], split[i].clo, counts[i]});
            frontier.push_back({mids[i], split[i].hi, counts[i], split[i].chi});
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

struct PeriodicBands {
    std::vector<Interval> bands;   // N bands, ascending, possibly touching
    std::vector<double> zeros;     // zero of the half-trace inside each band
    std::vector<int> closed_gaps;  // indices j where band j touches band j+1
};

/// The N bands {E : |d(E)| <= 1} of an N-periodic zero-diagonal Jacobi
/// operator with half-trace d. Edges are located to absolute accuracy tol.
template <typename Disc>
PeriodicBands periodic_bands(const std::vector<double>& period, const Disc& disc, double tol) {
    const std::size_t n = period.size();
    detail::require(n >= 1, ErrorKind::InvalidArgument, "empty period");
    const double reach = 2.0 * *std::max_element(period.begin(), period.end()) + EnergyWindow::margin;
    const double wlo = -reach, whi = reach;
    if (!(std::abs(disc(wlo)) > 1.0) || !(std::abs(disc(whi)) > 1.0))
        throw Error(ErrorKind::RootIsolation, "half-trace not outside [-1, 1] at the energy window ends");

    const SymTridiagonal chain = doubled_period_chain(period);
    const auto brackets = isolate_band_zeros(chain, wlo, whi);
    if (brackets.size() != n)
        throw Error(ErrorKind::RootIsolation, "isolated " + std::to_string(brackets.size()) + " band zeros, expected " +
                                                  std::to_string(n));
    PeriodicBands out;
    out.zeros.reserve(n);
    for (const auto& [lo, hi] : brackets) {
        const double flo = disc(lo), fhi = disc(hi);
        double z;
        if (flo != 0.0 && fhi != 0.0 && (flo < 0) != (fhi < 0)) {
            z = bisect_zero(disc, lo, hi);
        } else {
            // A zero sits on a bracket end or rounding moved it across one;
            // take the eigenvalue itself (the even 0-based index in [lo, hi)).
            std::size_t rank = chain.sturm_count(lo);
            if (rank % 2 == 1) ++rank;
            z = chain.eigenvalues(std::max(tol, 1e-15), rank, rank + 1).front();
        }
        if (!(std::abs(disc(z)) < 1.0))
            throw Error(ErrorKind::RootIsolation, "band centre estimate outside band near E = " + std::to_string(z));
        out.zeros.push_back(z);
    }

    out.bands.resize(n);
    out.bands.front().lo = bisect_edge(disc, out.zeros.front(), wlo, tol);
    out.bands.back().hi = bisect_edge(disc, out.zeros.back(), whi, tol);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double zl = out.zeros[j], zr = out.zeros[j + 1];
        const double gap = locate_gap_point(disc, zl, zr, 1.0 + 1e-6);
        if (std::abs(disc(gap)) <= escape_guard) {
            out.bands[j].hi = gap;
            out.bands[j + 1].lo = gap;
            out.closed_gaps.push_back(static_cast<int>(j));
        } else {
            out.bands[j].hi = bisect_edge(disc, zl, gap, tol);
            out.bands[j + 1].lo = bisect_edge(disc, zr, gap, tol);
        }
    }
    return out;
}

inline std::vector<double> period_hoppings(const Word& period, const HoppingPair& p) {
    std::vector<double> out;
    out.reserve(period.size());
    for (Letter l : period) out.push_back(p.hop(l));
    return out;
}

inline void require_band_inputs(int k, double tol) {
    detail::require(k >= 1 && k <= 26, ErrorKind::InvalidArgument, "band level must be in [1, 26]");
    detail::require(tol >= 1e-13, ErrorKind::InvalidArgument, "tolerance must be >= 1e-13");
}

} // namespace detail

/// Unmerged bands of sigma_k with the half-trace zeros, for diagnostics.
inline detail::PeriodicBands sigma_k_raw(const HoppingPair& p, int k, double tol) {
    detail::require_band_inputs(k, tol);
    auto disc = [&p, k](double e) { return half_trace<long double>(p, e, k); };
    return detail::periodic_bands(detail::period_hoppings(fib_prefix(k), p), disc, tol);
}

inline BandSet sigma_k(const HoppingPair& p, int k, double tol) {
    detail::PeriodicBands raw = sigma_k_raw(p, k, tol);
    BandSet out;
    out.bands = std::move(raw.bands);
    out.touching = normalize_bands(out.bands, 10.0 * tol);
    out.kind = BandKind::SigmaK;
    out.level = k;
    out.params = p;
    out.tol = tol;
    return out;
}

/// Union of two band sets with fusion at the merge tolerance.
inline BandSet band_union(const BandSet& lhs, const BandSet& rhs, double merge_tol) {
    BandSet out = lhs;
    out.bands.insert(out.bands.end(), rhs.bands.begin(), rhs.bands.end());
    out.touching = normalize_bands(out.bands, merge_tol);
    return out;
}

inline BandSet cover(const HoppingPair& p, int k, double tol) {
    BandSet out = band_union(sigma_k(p, k, tol), sigma_k(p, k + 1, tol), 10.0 * tol);
    out.kind = BandKind::Cover;
    out.level = k;
    return out;
}

/// Grid cells (three probes each) whose probes stay bounded up to K_max.
inline BandSet escape_spectrum(const HoppingPair& p, int k_max, double grid_step, const EnergyWindow& window,
                               unsigned threads = 1) {
    detail::require(window.width() > 0.0, ErrorKind::InvalidArgument, "energy window must have positive width");
    detail::require(grid_step > 0.0 && grid_step <= 1e-3 * window.width() * (1.0 + 1e-12),
                    ErrorKind::InvalidArgument, "grid step must be in (0, 1e-3 * window width]");
    const auto cells = static_cast<std::size_t>(std::ceil(window.width() / grid_step - 1e-9));
    std::vector<char> keep(cells, 0);
    parallel_for(cells, threads, [&](std::size_t i) {
        const double lo = window.lo + static_cast<double>(i) * grid_step;
        const double hi = std::min(window.hi, lo + grid_step);
        for (double e : {lo, 0.5 * (lo + hi), hi}) {
            if (escape_classify(p, e, k_max).bounded()) {
                keep[i] = 1;
                break;
            }
        }
    });
    BandSet out;
    out.kind = BandKind::Escape;
    out.level = k_max;
    out.params = p;
    out.tol = grid_step;
    for (std::size_t i = 0; i < cells; ++i) {
        if (!keep[i]) continue;
        const double lo = window.lo + static_cast<double>(i) * grid_step;
        const double hi = std::min(window.hi, lo + grid_step);
        if (!out.bands.empty() && i > 0 && keep[i - 1])
            out.bands.back().hi = hi;
        else
            out.bands.push_back({lo, hi});
    }
    return out;
}

namespace detail {
/// sup over x in a of dist(x, b).
inline double directed_hausdorff(const BandSet& a, const BandSet& b) {
    double worst = 0.0;
    for (const Interval& iv : a.bands) {
        worst = std::max({worst, b.distance(iv.lo), b.distance(iv.hi)});
        // Inside iv the distance to b peaks at midpoints of b's gaps.
        auto it = std::upper_bound(b.bands.begin(), b.bands.end(), iv.lo,
                                   [](double v, const Interval& band) { return v < band.lo; });
        if (it != b.bands.begin()) --it;
        for (; std::next(it) != b.bands.end() && it->hi < iv.hi; ++it) {
            const double mid = 0.5 * (it->hi + std::next(it)->lo);
            if (mid > iv.lo && mid < iv.hi) worst = std::max(worst, b.distance(mid));
        }
    }
    return worst;
}
} // namespace detail

inline double hausdorff_distance(const BandSet& a, const BandSet& b) {
    detail::require(!a.empty() && !b.empty(), ErrorKind::EmptySet, "Hausdorff distance of an empty set");
    return std::max(detail::directed_hausdorff(a, b), detail::directed_hausdorff(b, a));
}

/// Band set built directly from intervals (normalized).
inline BandSet make_band_set(std::vector<Interval> bands, BandKind kind = BandKind::Synthetic) {
    BandSet out;
    out.bands = std::move(bands);
    out.touching = normalize_bands(out.bands, 0.0);
    out.kind = kind;
    return out;
}

} // namespace fibspec
