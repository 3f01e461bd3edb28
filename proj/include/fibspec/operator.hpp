#pragma once

// Finite and periodic Jacobi matrices over hull windows, their spectra by
// Sturm bisection, and cross-checks against the trace-map bands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fibspec/bands.hpp"
#include "fibspec/error.hpp"
#include "fibspec/parallel.hpp"
#include "fibspec/tracemap.hpp"
#include "fibspec/tridiagonal.hpp"
#include "fibspec/words.hpp"

namespace fibspec {

enum class Boundary { Free, Periodic };

inline const char* to_string(Boundary b) { return b == Boundary::Free ? "free" : "periodic"; }

/// Zero-diagonal Jacobi matrix. Free: hoppings.size() + 1 sites with the
/// hoppings on the off-diagonal. Periodic: a ring of hoppings.size() sites,
/// the last hopping closing the ring.
struct JacobiWindow {
    std::vector<double> hoppings;
    Boundary boundary = Boundary::Free;

    std::size_t dimension() const { return boundary == Boundary::Free ? hoppings.size() + 1 : hoppings.size(); }
    double norm_bound() const { return 2.0 * *std::max_element(hoppings.begin(), hoppings.end()); }
};

inline JacobiWindow build_window(const Word& word, const HoppingPair& p, Boundary boundary = Boundary::Free) {
    detail::require(!word.empty(), ErrorKind::InvalidArgument, "empty window");
    return {detail::period_hoppings(word, p), boundary};
}

inline JacobiWindow build_window(const SignedWindow& w, const HoppingPair& p, Boundary boundary = Boundary::Free) {
    return build_window(w.letters, p, boundary);
}

struct EigenvalueList {
    std::vector<double> values;
    double residual_bound = 0.0;
    Boundary boundary = Boundary::Free;

    std::size_t size() const { return values.size(); }
};

inline double default_eigen_tol(const HoppingPair& p) { return 1e-10 * p.norm_bound(); }

/// All eigenvalues of a free window by Sturm bisection; indices are split
/// into contiguous blocks across threads.
inline EigenvalueList eigenvalues_free(const JacobiWindow& j, double tol, unsigned threads = 1) {
    detail::require(j.boundary == Boundary::Free, ErrorKind::InvalidArgument, "eigenvalues_free needs a free window");
    detail::require(!j.hoppings.empty(), ErrorKind::InvalidArgument, "empty window");
    detail::require(tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
    const SymTridiagonal t = SymTridiagonal::zero_diagonal(j.hoppings);
    const std::size_t n = t.size();
    constexpr std::size_t block = 256;
    const std::size_t blocks = (n + block - 1) / block;
    EigenvalueList out;
    out.values.resize(n);
    out.residual_bound = tol;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t first = b * block, last = std::min(n, first + block);
        const auto vals = t.eigenvalues(tol, first, last);
        std::copy(vals.begin(), vals.end(), out.values.begin() + static_cast<std::ptrdiff_t>(first));
    });
    return out;
}

namespace detail {

/// Half-trace of the monodromy T(N) ... T(1), saturating to +inf on overflow.
inline double hopping_half_trace(const std::vector<double>& hops, double energy) {
    long double m11 = 1, m12 = 0, m21 = 0, m22 = 1;
    const long double e = energy;
    constexpr long double huge = 1e2000L;
    for (double hd : hops) {
        const long double h = hd;
        // [[E/h, -1/h], [h, 0]] * M
        const long double n11 = (e * m11 - m21) / h, n12 = (e * m12 - m22) / h;
        m21 = h * m11;
        m22 = h * m12;
        m11 = n11;
        m12 = n12;
        if (!(std::abs(m11) < huge && std::abs(m12) < huge)) return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(0.5L * (m11 + m22));
}

} // namespace detail

/// Eigenvalues of the periodic ring: the energies with monodromy half-trace
/// +1, one edge of every band (a doubled value at a closed gap).
inline EigenvalueList eigenvalues_periodic(const JacobiWindow& j, double tol) {
    detail::require(j.boundary == Boundary::Periodic, ErrorKind::InvalidArgument,
                    "eigenvalues_periodic needs a periodic window");
    detail::require(!j.hoppings.empty(), ErrorKind::InvalidArgument, "empty window");
    detail::require(tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
    const auto& hops = j.hoppings;
    auto disc = [&hops](double e) { return detail::hopping_half_trace(hops, e); };
    const detail::PeriodicBands pb = detail::periodic_bands(hops, disc, tol);
    EigenvalueList out;
    out.boundary = Boundary::Periodic;
    out.residual_bound = tol;
    for (const Interval& b : pb.bands) out.values.push_back(disc(b.lo) > 0 ? b.lo : b.hi);
    std::sort(out.values.begin(), out.values.end());
    return out;
}

inline EigenvalueList eigenvalues(const JacobiWindow& j, double tol, unsigned threads = 1) {
    return j.boundary == Boundary::Free ? eigenvalues_free(j, tol, threads) : eigenvalues_periodic(j, tol);
}

/// max_i |lambda_i + lambda_{n-1-i}|.
inline double symmetry_defect(const EigenvalueList& e) {
    double worst = 0.0;
    const std::size_t n = e.values.size();
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(e.values[i] + e.values[n - 1 - i]));
    return worst;
}

/// Cauchy interlacing of a principal submatrix spectrum (one fewer value).
inline bool interlaces(const EigenvalueList& outer, const EigenvalueList& inner, double slack) {
    if (inner.size() + 1 != outer.size()) return false;
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (inner.values[i] < outer.values[i] - slack || inner.values[i] > outer.values[i + 1] + slack) return false;
    return true;
}

/// Number of bands of sigma_k lying below E, by a Sturm count on the
/// doubled-period chain. Meaningful for E inside a gap of sigma_k.
inline std::size_t bands_below(const HoppingPair& p, int k, double energy) {
    const SymTridiagonal chain = detail::doubled_period_chain(detail::period_hoppings(fib_prefix(k), p));
    return (chain.sturm_count(energy) + 1) / 2;
}

struct BandCountCheck {
    std::size_t bands = 0;        // merged bands of sigma_k
    std::size_t sturm_bands = 0;  // distinct Sturm band counts across the gaps, plus one
    std::size_t total = 0;        // bands_below at the top of the window
    bool agree = false;
};

inline BandCountCheck band_count_check(const HoppingPair& p, int k, double tol) {
    const BandSet s = sigma_k(p, k, tol);
    const SymTridiagonal chain = detail::doubled_period_chain(detail::period_hoppings(fib_prefix(k), p));
    BandCountCheck out;
    out.bands = s.size();
    std::size_t prev = 0;
    out.sturm_bands = 1;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const std::size_t c = (chain.sturm_count(0.5 * (s.bands[i].hi + s.bands[i + 1].lo)) + 1) / 2;
        if (c > prev) ++out.sturm_bands;
        prev = c;
    }
    out.total = (chain.sturm_count(EnergyWindow::for_pair(p).hi) + 1) / 2;
    out.agree = out.sturm_bands == out.bands && out.total == fibonacci(k) && out.bands + s.touching == out.total;
    return out;
}

struct SpectrumDefect {
    double max_defect = 0.0;        // max distance of a bulk eigenvalue to the band set
    double max_trace_excess = 0.0;  // max (|x_k(lambda)| - 1)+ over bulk eigenvalues
    std::size_t eigenvalues = 0;
    std::size_t excluded = 0;       // edge states
};

namespace detail {

inline constexpr double edge_fraction = 0.1;
inline constexpr double edge_weight = 0.5;

/// Distances of free-chain eigenvalues to `bands`, skipping eigenvalues whose
/// eigenvector sits mostly in the outer sites.
inline SpectrumDefect bulk_defect(const JacobiWindow& j, const BandSet& bands, double tol, const HoppingPair& p,
                                  int k, unsigned threads) {
    const EigenvalueList ev = eigenvalues_free(j, tol, threads);
    const SymTridiagonal t = SymTridiagonal::zero_diagonal(j.hoppings);
    SpectrumDefect out;
    out.eigenvalues = ev.size();
    std::vector<double> dist(ev.size()), excess(ev.size());
    std::vector<char> edge(ev.size(), 0);
    parallel_for(ev.size(), threads, [&](std::size_t i) {
        const double lambda = ev.values[i];
        dist[i] = bands.distance(lambda);
        excess[i] = k > 0 ? std::max(0.0, std::abs(half_trace<long double>(p, lambda, k)) - 1.0) : 0.0;
        // Eigenvectors are only needed where the eigenvalue strays.
        if (dist[i] > 10.0 * tol || excess[i] > 1e-9) {
            const auto v = t.eigenvector(lambda);
            edge[i] = outer_weight(v, edge_fraction) > edge_weight;
        }
    });
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (edge[i]) {
            ++out.excluded;
            continue;
        }
        out.max_defect = std::max(out.max_defect, dist[i]);
        out.max_trace_excess = std::max(out.max_trace_excess, excess[i]);
    }
    return out;
}

} // namespace detail

/// Free chain over `periods` copies of s_k compared with sigma_k.
inline SpectrumDefect periodic_band_check(const HoppingPair& p, int k, double tol, int periods = 20,
                                          unsigned threads = 1) {
    detail::require(k >= 1 && k <= 16, ErrorKind::InvalidArgument, "periodic_band_check requires 1 <= k <= 16");
    detail::require(periods >= 1, ErrorKind::InvalidArgument, "periods must be >= 1");
    const Word block = fib_prefix(k);
    Word chain;
    for (int i = 0; i < periods; ++i) chain = chain + block;
    const JacobiWindow j = build_window(chain, p);
    return detail::bulk_defect(j, sigma_k(p, k, tol), default_eigen_tol(p), p, k, threads);
}

/// Free truncation of omega_s to the hoppings at positions 1..L compared
/// with cover(k).
inline SpectrumDefect truncation_spectrum_consistency(const HoppingPair& p, int k, long long L, double tol,
                                                      unsigned threads = 1) {
    detail::require(k >= 1, ErrorKind::InvalidArgument, "level must be >= 1");
    if (L < 2 * static_cast<long long>(fibonacci(k)))
        throw Error(ErrorKind::Precondition, "truncation length must be at least 2 F_k");
    const JacobiWindow j = build_window(omega_s(1, L), p);
    return detail::bulk_defect(j, cover(p, k, tol), default_eigen_tol(p), p, 0, threads);
}

} // namespace fibspec
