#pragma once

// Box-counting and count-length scaling estimates of the spectrum's
// dimension, globally, in energy windows and across parameters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fibspec/bands.hpp"
#include "fibspec/error.hpp"
#include "fibspec/parallel.hpp"
#include "fibspec/tracemap.hpp"

namespace fibspec {

enum class DimensionMethod { BoxFit, BandScaling };

inline const char* to_string(DimensionMethod m) { return m == DimensionMethod::BoxFit ? "box-fit" : "band-scaling"; }

struct ScaleSample {
    double scale = 0.0;   // eps for box counts, k for band scaling
    double count = 0.0;
    double length = 0.0;  // eps, or geometric-mean band length
};

struct DimensionEstimate {
    double value = 0.0;
    DimensionMethod method = DimensionMethod::BoxFit;
    double r_squared = 0.0;
    std::vector<ScaleSample> scales;
    bool clamped = false;
    bool degenerate = false;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double r_squared = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateFit, "regression abscissae coincide");
    LineFit f;
    f.slope = sxy / sxx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline void clamp_unit(DimensionEstimate& d) {
    if (d.value < 0.0 || d.value > 1.0) {
        d.clamped = true;
        d.value = std::clamp(d.value, 0.0, 1.0);
    }
}

inline double mean_band_length(const BandSet& bs) { return lebesgue_measure(bs) / static_cast<double>(bs.size()); }

} // namespace detail

/// Minimal number of closed intervals of length eps covering the band set
/// (greedy from the left, optimal on the line).
inline std::size_t box_count(const BandSet& bs, double eps) {
    detail::require(eps > 0.0, ErrorKind::InvalidArgument, "box size must be positive");
    std::size_t count = 0;
    double reach = -std::numeric_limits<double>::infinity();
    for (const Interval& b : bs.bands) {
        if (b.lo > reach) {
            ++count;
            reach = b.lo + eps;
        }
        if (b.hi > reach) {
            const auto more = static_cast<std::size_t>(std::ceil((b.hi - reach) / eps));
            count += more;
            reach += static_cast<double>(more) * eps;
        }
    }
    return count;
}

/// |A_eps| / eps with A_eps the closed eps/2-neighbourhood of the band set.
/// Within a factor 2 of box_count and smooth in eps, so fits over arbitrary
/// box sizes do not pick up the staircase of the integer counts.
inline double neighbourhood_count(const BandSet& bs, double eps) {
    detail::require(eps > 0.0, ErrorKind::InvalidArgument, "box size must be positive");
    if (bs.empty()) return 0.0;
    double len = eps;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        len += bs.bands[i].length();
        if (i + 1 < bs.size()) len += std::min(eps, bs.bands[i + 1].lo - bs.bands[i].hi);
    }
    return len / eps;
}

/// Smallest box size the cover resolves: twice its mean band length. A
/// single interval is taken as exact and resolves every scale.
inline double resolution_floor(const BandSet& bs) {
    if (bs.size() <= 1) return 0.0;
    return 2.0 * detail::mean_band_length(bs);
}

/// Log-spaced box sizes from the resolution floor of `finest` up to an
/// eighth of its extent.
inline std::vector<double> default_eps_list(const BandSet& finest, std::size_t count = 12) {
    detail::require(!finest.empty(), ErrorKind::EmptySet, "empty band set");
    const double extent = finest.hi() - finest.lo();
    const double top = extent > 0.0 ? extent / 8.0 : 1.0;
    double bottom = resolution_floor(finest);
    if (!(bottom > 0.0)) bottom = top * 1e-3;
    std::vector<double> out;
    if (!(bottom < top)) return out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(bottom * std::pow(top / bottom, static_cast<double>(i) / static_cast<double>(count - 1)));
    return out;
}

/// Slope of log N(eps) against log(1/eps), N from neighbourhood_count, on the
/// finest of `covers` (the one with the smallest mean band length). Box sizes below its resolution
/// floor are dropped; at least 4 must remain, spanning 2 decades.
inline DimensionEstimate box_dimension(const std::vector<BandSet>& covers, const std::vector<double>& eps_list) {
    detail::require(!covers.empty(), ErrorKind::InvalidArgument, "box_dimension needs at least one cover");
    const BandSet* finest = nullptr;
    for (const BandSet& c : covers) {
        detail::require(!c.empty(), ErrorKind::EmptySet, "empty cover");
        if (!finest || detail::mean_band_length(c) <= detail::mean_band_length(*finest)) finest = &c;
    }
    const double floor = resolution_floor(*finest);
    std::vector<double> eps;
    for (double e : eps_list) {
        detail::require(e > 0.0, ErrorKind::InvalidArgument, "box sizes must be positive");
        if (e >= floor) eps.push_back(e);
    }
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    if (eps.size() < 4 || eps.back() / eps.front() < 100.0 * (1.0 - 1e-12))
        throw Error(ErrorKind::InsufficientScales,
                    "need >= 4 box sizes spanning 2 decades above " + std::to_string(floor) + ", have " +
                        std::to_string(eps.size()));

    DimensionEstimate out;
    out.method = DimensionMethod::BoxFit;
    std::vector<double> x, y;
    for (double e : eps) {
        const double n = neighbourhood_count(*finest, e);
        out.scales.push_back({e, n, e});
        x.push_back(std::log(1.0 / e));
        y.push_back(std::log(n));
    }
    const detail::LineFit f = detail::least_squares(x, y);
    out.value = f.slope;
    out.r_squared = f.r_squared;
    detail::clamp_unit(out);
    return out;
}

inline DimensionEstimate box_dimension(const std::vector<BandSet>& covers) {
    detail::require(!covers.empty(), ErrorKind::InvalidArgument, "box_dimension needs at least one cover");
    const BandSet* finest = &covers.front();
    for (const BandSet& c : covers)
        if (!c.empty() && detail::mean_band_length(c) <= detail::mean_band_length(*finest)) finest = &c;
    return box_dimension(covers, default_eps_list(*finest));
}

/// Geometric mean of the band lengths.
inline double geometric_mean_length(const BandSet& bs) {
    detail::require(!bs.empty(), ErrorKind::EmptySet, "empty band set");
    double s = 0.0;
    for (const Interval& b : bs.bands) s += std::log(std::max(b.length(), std::numeric_limits<double>::min()));
    return std::exp(s / static_cast<double>(bs.size()));
}

/// alpha from N_k * l_k^alpha ~ const over cover(k), k_min <= k <= k_max,
/// with l_k the geometric-mean band length.
inline DimensionEstimate band_scaling_dimension(const HoppingPair& p, int k_min, int k_max, double tol,
                                                unsigned threads = 1) {
    detail::require(k_min >= 1 && k_max > k_min, ErrorKind::InvalidArgument, "band scaling needs 1 <= k_min < k_max");
    detail::require(k_max <= 25, ErrorKind::InvalidArgument, "band scaling needs k_max <= 25");
    const auto levels = static_cast<std::size_t>(k_max - k_min + 1);
    std::vector<BandSet> sigmas(levels + 1);
    parallel_for(levels + 1, threads, [&](std::size_t i) { sigmas[i] = sigma_k(p, k_min + static_cast<int>(i), tol); });
    std::vector<BandSet> covers(levels);
    for (std::size_t i = 0; i < levels; ++i) covers[i] = band_union(sigmas[i], sigmas[i + 1], 10.0 * tol);

    DimensionEstimate out;
    out.method = DimensionMethod::BandScaling;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < levels; ++i) {
        const double len = geometric_mean_length(covers[i]);
        const auto n = static_cast<double>(covers[i].size());
        out.scales.push_back({static_cast<double>(k_min) + static_cast<double>(i), n, len});
        x.push_back(-std::log(len));
        y.push_back(std::log(n));
    }
    const bool equal = std::all_of(out.scales.begin(), out.scales.end(), [&](const ScaleSample& s) {
        return std::abs(s.length - out.scales.front().length) <= 1e-12 * out.scales.front().length &&
               s.count == out.scales.front().count;
    });
    if (equal) {
        // A single interval at every level: dimension one by convention.
        out.degenerate = true;
        out.value = 1.0;
        out.r_squared = 1.0;
        return out;
    }
    const detail::LineFit f = detail::least_squares(x, y);
    out.value = f.slope;
    out.r_squared = f.r_squared;
    detail::clamp_unit(out);
    return out;
}

/// Box dimension of cover(k_max) over the whole energy window.
inline DimensionEstimate global_dimension(const HoppingPair& p, int k_max, double tol) {
    return box_dimension({cover(p, k_max, tol)});
}

/// Box dimension of cover(k_max) restricted to (E - delta, E + delta), box
/// sizes from the window's resolution floor to delta / 2.
inline DimensionEstimate local_dimension(const HoppingPair& p, double e_center, double delta, int k_max, double tol) {
    detail::require(delta > 0.0, ErrorKind::InvalidArgument, "delta must be positive");
    const EnergyWindow win = EnergyWindow::for_pair(p);
    if (e_center - delta >= win.hi || e_center + delta <= win.lo)
        throw Error(ErrorKind::EmptySet, "window lies outside the energy window");
    const BandSet local = cover(p, k_max, tol).clipped(e_center - delta, e_center + delta);
    if (local.empty()) throw Error(ErrorKind::EmptySet, "window misses cover(" + std::to_string(k_max) + ")");
    double bottom = resolution_floor(local);
    const double top = delta / 2.0;
    if (!(bottom > 0.0)) bottom = top * 1e-3;
    std::vector<double> eps;
    constexpr int count = 12;
    if (bottom < top)
        for (int i = 0; i < count; ++i) eps.push_back(bottom * std::pow(top / bottom, static_cast<double>(i) / (count - 1)));
    return box_dimension({local}, eps);
}

struct SweepRow {
    double b = 0.0;
    double invariant = 0.0;
    std::optional<DimensionEstimate> box;
    std::optional<DimensionEstimate> scaling;
    bool degenerate = false;
    std::string error;
};

/// Estimates for each b at fixed a, in input order. Errors are recorded per
/// row and the sweep continues.
inline std::vector<SweepRow> dimension_sweep(double a, const std::vector<double>& b_values, int k_min, int k_max,
                                             double tol, unsigned threads = 1) {
    std::vector<SweepRow> rows(b_values.size());
    parallel_for(b_values.size(), threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.b = b_values[i];
        try {
            const HoppingPair p(a, row.b);
            row.invariant = invariant_expected(p);
            row.degenerate = p.degenerate();
            row.scaling = band_scaling_dimension(p, k_min, k_max, tol);
            row.box = global_dimension(p, k_max, tol);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

/// Whether the box estimates never increase along the sweep; rows without
/// an estimate are skipped.
inline bool sweep_nonincreasing(const std::vector<SweepRow>& rows) {
    double prev = 2.0;
    for (const SweepRow& r : rows) {
        if (!r.box) continue;
        if (r.box->value > prev + 1e-12) return false;
        prev = r.box->value;
    }
    return true;
}

} // namespace fibspec
