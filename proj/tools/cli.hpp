#pragma once

// fibspec command-line front end. run() is the whole program, minus the
// process boundary, so tests can drive it in-process.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fibspec.hpp"

namespace fibspec::cli {

enum Exit : int { ok = 0, check_failed = 1, usage = 2, numerical = 3 };

struct Options {
    std::string command;
    double a = 1.0;
    double b = 2.0;
    double tol = 1e-12;
    std::string out;
    std::string format = "auto";
    unsigned threads = 1;
    std::optional<int> k;
    std::optional<int> kmin;
    std::optional<int> kmax;
    std::optional<double> grid;
    std::optional<double> emin;
    std::optional<double> emax;
    std::optional<double> estep;
    std::optional<long long> n;
    std::string sweep;
    std::optional<double> e_center;
    std::optional<double> delta;
    double perturb = 0.0;
    std::uint64_t seed = VerifyOptions{}.seed;
    std::string boundary = "free";
    int periods = 20;
};

namespace detail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void usage_if(bool bad, const std::string& msg) {
    if (bad) throw UsageError(msg);
}

template <typename T>
T need(const std::optional<T>& v, const char* flag) {
    usage_if(!v, std::string("missing required option --") + flag);
    return *v;
}

inline std::string num(double v) { return format_double(v); }

/// Where documents go: --out PATH, or "-" for standard output.
class Sink {
public:
    Sink(const Options& o, std::ostream& out) : path_(o.out), out_(out) {}

    bool to_stdout() const { return path_ == "-"; }
    bool enabled() const { return !path_.empty(); }

    void write(const std::string& doc) const {
        if (!enabled()) return;
        if (to_stdout()) {
            out_ << doc;
            return;
        }
        std::ofstream f(path_, std::ios::binary);
        usage_if(!f, "cannot write '" + path_ + "'");
        f << doc;
        usage_if(!f.good(), "cannot write '" + path_ + "'");
    }

private:
    std::string path_;
    std::ostream& out_;
};

inline std::string resolve_format(const Options& o, const char* fallback) {
    const std::string f = o.format == "auto" ? fallback : o.format;
    usage_if(f != "json" && f != "csv", "--format must be json or csv");
    return f;
}

inline ConfigRecord base_config(const Options& o) {
    return {{"command", o.command}, {"a", num(o.a)}, {"b", num(o.b)}, {"tol", num(o.tol)}};
}

inline std::string json_doc(Json j, const ConfigRecord& cfg) {
    j["config"] = to_json(cfg);
    return j.dump(2) + "\n";
}

inline std::string table_json(const std::vector<std::string>& columns, const std::vector<std::vector<Json>>& rows,
                              const ConfigRecord& cfg) {
    Json j;
    j["columns"] = columns;
    j["rows"] = Json::array();
    for (const auto& r : rows) j["rows"].push_back(r);
    return json_doc(std::move(j), cfg);
}

/// Emits a table as CSV or JSON depending on the format.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)), csv_(columns_) {}

    Table& row() {
        rows_.emplace_back();
        csv_.row();
        return *this;
    }
    template <typename T>
    Table& add(const T& v) {
        rows_.back().push_back(v);
        csv_.add(v);
        return *this;
    }

    std::string render(const std::string& format, const ConfigRecord& cfg) const {
        return format == "csv" ? csv_.str(cfg) : table_json(columns_, rows_, cfg);
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Json>> rows_;
    CsvWriter csv_;
};

inline void print_bands(const BandSet& bs, std::ostream& out) {
    out << "bands: " << bs.size() << "\n";
    out << "measure: " << num(lebesgue_measure(bs)) << "\n";
    if (bs.touching) out << "touching: " << bs.touching << "\n";
    constexpr std::size_t shown = 16;
    for (std::size_t i = 0; i < std::min(shown, bs.size()); ++i)
        out << "  [" << num(bs.bands[i].lo) << ", " << num(bs.bands[i].hi) << "]\n";
    if (bs.size() > shown) out << "  ... " << bs.size() - shown << " more\n";
}

inline void emit_bands(const BandSet& bs, const Options& o, ConfigRecord cfg, std::ostream& out) {
    const Sink sink(o, out);
    if (!sink.to_stdout()) print_bands(bs, out);
    if (!sink.enabled()) return;
    const std::string fmt = resolve_format(o, "json");
    sink.write(fmt == "csv" ? band_set_csv(bs, cfg) : json_doc(to_json(bs), cfg));
}

inline int cmd_bands(const Options& o, const HoppingPair& p, std::ostream& out, bool as_cover) {
    const int k = need(o.k, "k");
    usage_if(k < 1 || k > (as_cover ? 25 : 26), "--k out of range");
    const BandSet bs = as_cover ? cover(p, k, o.tol) : sigma_k(p, k, o.tol);
    ConfigRecord cfg = base_config(o);
    cfg["k"] = std::to_string(k);
    emit_bands(bs, o, cfg, out);
    return ok;
}

inline EnergyWindow window_of(const Options& o, const HoppingPair& p) {
    EnergyWindow w = EnergyWindow::for_pair(p);
    if (o.emin) w.lo = *o.emin;
    if (o.emax) w.hi = *o.emax;
    usage_if(!(w.hi > w.lo), "energy window must have positive width");
    return w;
}

inline int cmd_spectrum(const Options& o, const HoppingPair& p, std::ostream& out) {
    const int kmax = need(o.kmax, "kmax");
    usage_if(kmax < 2, "--kmax must be >= 2");
    const EnergyWindow w = window_of(o, p);
    const double grid = o.grid.value_or(1e-3 * w.width());
    const BandSet bs = escape_spectrum(p, kmax, grid, w, o.threads);
    ConfigRecord cfg = base_config(o);
    cfg["kmax"] = std::to_string(kmax);
    cfg["grid"] = num(grid);
    cfg["emin"] = num(w.lo);
    cfg["emax"] = num(w.hi);
    emit_bands(bs, o, cfg, out);
    return ok;
}

inline constexpr double gamma_zero = 1e-2;

inline int cmd_lyapunov(const Options& o, const HoppingPair& p, std::ostream& out) {
    const EnergyWindow w = window_of(o, p);
    const double step = o.estep.value_or(w.width() / 800.0);
    usage_if(!(step > 0.0), "--estep must be positive");
    const long long n = o.n.value_or(static_cast<long long>(fibonacci(18)));
    usage_if(n < 2, "--n must be >= 2");
    const auto points = static_cast<std::size_t>(std::floor(w.width() / step + 1e-9)) + 1;
    const SignedWindow word = omega_s(1, n);
    std::vector<LyapunovEstimate> est(points);
    parallel_for(points, o.threads, [&](std::size_t i) {
        est[i] = lyapunov(word, p, w.lo + static_cast<double>(i) * step, n);
    });
    Table t({"E", "gamma", "residual"});
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < points; ++i) {
        t.row().add(w.lo + static_cast<double>(i) * step).add(est[i].gamma).add(est[i].residual);
        if (est[i].gamma <= gamma_zero) ++zeros;
    }
    ConfigRecord cfg = base_config(o);
    cfg["emin"] = num(w.lo);
    cfg["emax"] = num(w.hi);
    cfg["estep"] = num(step);
    cfg["n"] = std::to_string(n);
    const Sink sink(o, out);
    if (!sink.to_stdout()) {
        out << "points: " << points << "\n";
        out << "gamma_zero_fraction: " << num(static_cast<double>(zeros) / static_cast<double>(points)) << "\n";
    }
    sink.write(t.render(resolve_format(o, "csv"), cfg));
    return ok;
}

inline std::vector<double> parse_sweep(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            usage_if(used != item.size(), "bad --sweep '" + s + "'");
        } catch (const std::logic_error&) {
            throw UsageError("bad --sweep '" + s + "', expected lo:hi:step");
        }
    }
    usage_if(parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0], "bad --sweep '" + s + "', expected lo:hi:step");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = parts[0] + i * parts[2];
        if (v > parts[1] + 1e-9 * parts[2]) break;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out.push_back(std::stod(buf));
    }
    return out;
}

inline void add_estimate(Table& t, double b, const DimensionEstimate& d, int kmax, double tol, double inv,
                         const std::string& scope) {
    t.row().add(b).add(d.value).add(to_string(d.method)).add(d.r_squared).add(kmax).add(tol);
    t.add(scope).add(d.degenerate).add(d.clamped).add(inv).add(std::string());
}

inline int cmd_dimension(const Options& o, std::ostream& out, std::ostream& err) {
    const int kmax = o.kmax.value_or(14);
    const int kmin = o.kmin.value_or(6);
    usage_if(kmin < 1 || kmax <= kmin || kmax > 24, "need 1 <= --kmin < --kmax <= 24");
    const Sink sink(o, out);
    std::ostringstream discard;
    std::ostream& info = sink.to_stdout() ? discard : out;
    Table t({"b", "dim_value", "method", "r_squared", "k_max", "tol", "scope", "degenerate", "clamped", "invariant",
             "error"});
    ConfigRecord cfg = base_config(o);
    cfg["kmin"] = std::to_string(kmin);
    cfg["kmax"] = std::to_string(kmax);
    bool all_inside = true;
    if (!o.sweep.empty()) {
        cfg["sweep"] = o.sweep;
        const auto rows = dimension_sweep(o.a, parse_sweep(o.sweep), kmin, kmax, o.tol, o.threads);
        for (const SweepRow& r : rows) {
            if (!r.error.empty()) {
                t.row().add(r.b).add(std::string()).add(std::string()).add(std::string()).add(kmax).add(o.tol);
                t.add("global").add(r.degenerate).add(false).add(r.invariant).add(r.error);
                err << "warning: b = " << num(r.b) << ": " << r.error << "\n";
                all_inside = false;
                continue;
            }
            add_estimate(t, r.b, *r.box, kmax, o.tol, r.invariant, "global");
            add_estimate(t, r.b, *r.scaling, kmax, o.tol, r.invariant, "global");
            if (r.degenerate) err << "warning: b = " << num(r.b) << ": a = b: degenerate hull\n";
            for (const auto* d : {&*r.box, &*r.scaling})
                if (!(d->value > 0.0 && d->value < 1.0)) all_inside = false;
        }
        info << "rows: " << rows.size() << "\n";
        info << "nonincreasing: " << (sweep_nonincreasing(rows) ? "yes" : "no") << "\n";
    } else {
        const HoppingPair p(o.a, o.b);
        const double inv = invariant_expected(p);
        const DimensionEstimate box = global_dimension(p, kmax, o.tol);
        const DimensionEstimate scal = band_scaling_dimension(p, kmin, kmax, o.tol, o.threads);
        add_estimate(t, o.b, box, kmax, o.tol, inv, "global");
        add_estimate(t, o.b, scal, kmax, o.tol, inv, "global");
        info << "box-fit: " << num(box.value) << " (r^2 " << num(box.r_squared) << ")\n";
        info << "band-scaling: " << num(scal.value) << " (r^2 " << num(scal.r_squared) << ")"
            << (scal.degenerate ? " degenerate" : "") << "\n";
        if (o.delta) {
            const double centre = o.e_center.value_or(0.0);
            cfg["e-center"] = num(centre);
            cfg["delta"] = num(*o.delta);
            const DimensionEstimate loc = local_dimension(p, centre, *o.delta, kmax, o.tol);
            add_estimate(t, o.b, loc, kmax, o.tol, inv, "local");
            info << "local: " << num(loc.value) << " (r^2 " << num(loc.r_squared) << ")\n";
        }
        all_inside = box.value > 0.0 && box.value < 1.0;
    }
    if (!all_inside) info << "note: some estimates lie outside (0, 1)\n";
    sink.write(t.render(resolve_format(o, "csv"), cfg));
    return ok;
}

inline int cmd_verify(const Options& o, const HoppingPair& p, std::ostream& out) {
    VerifyOptions vo;
    vo.seed = o.seed;
    vo.perturb_recursion = o.perturb;
    const auto results = run_verification(p, vo);
    const Sink sink(o, out);
    std::ostringstream discard;
    std::ostream& info = sink.to_stdout() ? discard : out;
    bool all = true;
    Table t({"check", "passed", "measured", "threshold"});
    for (const CheckResult& r : results) {
        info << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << num(r.measured) << " <= " << num(r.threshold);
        if (!r.note.empty()) info << " (" << r.note << ")";
        info << "\n";
        t.row().add(r.name).add(r.passed).add(r.measured).add(r.threshold);
        all = all && r.passed;
    }
    ConfigRecord cfg = base_config(o);
    cfg["seed"] = std::to_string(o.seed);
    cfg["perturb-recursion"] = num(o.perturb);
    sink.write(t.render(resolve_format(o, "json"), cfg));
    return all ? ok : check_failed;
}

inline int cmd_words(const Options& o, std::ostream& out) {
    usage_if(!o.k && !o.n, "words needs --k (prefix s_k) or --n (factors of length n)");
    const Sink sink(o, out);
    std::ostringstream discard;
    std::ostream& info = sink.to_stdout() ? discard : out;
    Json j;
    ConfigRecord cfg{{"command", o.command}};
    if (o.k) {
        usage_if(*o.k < 1 || *o.k > 30, "--k must be in [1, 30]");
        const Word w = fib_prefix(*o.k);
        cfg["k"] = std::to_string(*o.k);
        j["k"] = *o.k;
        j["length"] = w.size();
        j["prefix"] = w.str();
        info << "s_" << *o.k << " (length " << w.size() << "): " << (w.size() <= 233 ? w.str() : w.slice(0, 233).str() + "...")
            << "\n";
    }
    if (o.n) {
        usage_if(*o.n < 1 || *o.n > 100000, "--n must be in [1, 100000]");
        const auto factors = subwords(static_cast<std::size_t>(*o.n));
        cfg["n"] = std::to_string(*o.n);
        j["n"] = *o.n;
        j["factors"] = Json::array();
        for (const Word& f : factors) j["factors"].push_back(f.str());
        info << "factors of length " << *o.n << ": " << factors.size() << "\n";
        if (factors.size() <= 64)
            for (const Word& f : factors) info << "  " << f.str() << "\n";
    }
    if (sink.enabled()) {
        usage_if(resolve_format(o, "json") != "json", "words writes json only");
        sink.write(json_doc(j, cfg));
    }
    return ok;
}

inline int cmd_eigs(const Options& o, const HoppingPair& p, std::ostream& out) {
    usage_if(o.boundary != "free" && o.boundary != "periodic", "--boundary must be free or periodic");
    const bool periodic = o.boundary == "periodic";
    usage_if(!o.k && !o.n, "eigs needs --n (dimension) or --k (period s_k)");
    ConfigRecord cfg = base_config(o);
    cfg["boundary"] = o.boundary;
    Word letters;
    if (o.k) {
        usage_if(*o.k < 1 || *o.k > 20, "--k must be in [1, 20]");
        cfg["k"] = std::to_string(*o.k);
        const Word block = fib_prefix(*o.k);
        if (periodic) {
            letters = block;
        } else {
            cfg["periods"] = std::to_string(o.periods);
            usage_if(o.periods < 1, "--periods must be >= 1");
            for (int i = 0; i < o.periods; ++i) letters = letters + block;
        }
    } else {
        usage_if(*o.n < (periodic ? 1 : 2) || *o.n > 200000, "--n out of range");
        cfg["n"] = std::to_string(*o.n);
        letters = omega_s(1, periodic ? *o.n : *o.n - 1).letters;
    }
    const double tol = o.tol;
    const JacobiWindow j = build_window(letters, p, periodic ? Boundary::Periodic : Boundary::Free);
    const EigenvalueList ev = eigenvalues(j, tol, o.threads);
    const Sink sink(o, out);
    if (!sink.to_stdout()) {
        out << "n: " << ev.size() << "\n";
        out << "boundary: " << o.boundary << "\n";
        out << "range: [" << num(ev.values.front()) << ", " << num(ev.values.back()) << "]\n";
    }
    if (sink.enabled()) {
        if (resolve_format(o, "json") == "csv") {
            Table t({"index", "value"});
            for (std::size_t i = 0; i < ev.size(); ++i) t.row().add(i).add(ev.values[i]);
            sink.write(t.render("csv", cfg));
        } else {
            sink.write(json_doc(to_json(ev, tol), cfg));
        }
    }
    return ok;
}

inline void build_app(CLI::App& app, Options& o) {
    app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
    app.add_option("--a", o.a, "hopping a (> 0)")->capture_default_str();
    app.add_option("--b", o.b, "hopping b (> 0)")->capture_default_str();
    app.add_option("--tol", o.tol, "band edge / eigenvalue tolerance (>= 1e-13)")->capture_default_str();
    app.add_option("--out", o.out, "output file, '-' for standard output");
    app.add_option("--format", o.format, "json or csv")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads")->capture_default_str();
    app.add_option("--k", o.k, "level k");
    app.add_option("--kmin", o.kmin, "lowest level of a fit");
    app.add_option("--kmax", o.kmax, "highest level / escape depth");
    app.add_option("--grid", o.grid, "escape-time grid step");
    app.add_option("--emin", o.emin, "energy window lower end");
    app.add_option("--emax", o.emax, "energy window upper end");
    app.add_option("--estep", o.estep, "energy scan step");
    app.add_option("--n", o.n, "length: orbit, factor or matrix dimension");
    app.add_option("--sweep", o.sweep, "b values lo:hi:step");
    app.add_option("--e-center", o.e_center, "local window centre");
    app.add_option("--delta", o.delta, "local window half-width");
    app.add_option("--perturb-recursion", o.perturb, "fault injection for verify");
    app.add_option("--seed", o.seed, "verify sampling seed")->capture_default_str();
    app.add_option("--boundary", o.boundary, "free or periodic")->capture_default_str();
    app.add_option("--periods", o.periods, "copies of s_k in eigs --k --boundary free")->capture_default_str();

    const std::pair<const char*, const char*> commands[] = {
        {"bands", "sigma_k as closed intervals"},
        {"cover", "the cover sigma_k u sigma_k+1"},
        {"spectrum", "escape-time approximation of the spectrum"},
        {"lyapunov", "Lyapunov exponent scan over energy"},
        {"dimension", "box and band-scaling dimension estimates"},
        {"verify", "invariant and identity self-test"},
        {"words", "Fibonacci word prefixes and factors"},
        {"eigs", "eigenvalues of finite or periodic windows"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&o, n = std::string(name)] { o.command = n; });
    }
    app.require_subcommand(1, 1);
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app("Spectral computations for the off-diagonal Fibonacci Jacobi operator", "fibspec");
    detail::build_app(app, o);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        detail::usage_if(o.threads < 1, "--threads must be >= 1");
        detail::usage_if(!(o.tol >= 1e-13) || !std::isfinite(o.tol), "--tol must be >= 1e-13");
        if (o.command == "words") return detail::cmd_words(o, out);
        if (o.command == "dimension") {
            if (o.sweep.empty() && o.a == o.b) err << "warning: a = b: degenerate hull\n";
            return detail::cmd_dimension(o, out, err);
        }
        const HoppingPair p(o.a, o.b);
        if (p.degenerate()) err << "warning: a = b: degenerate hull\n";
        if (o.command == "bands") return detail::cmd_bands(o, p, out, false);
        if (o.command == "cover") return detail::cmd_bands(o, p, out, true);
        if (o.command == "spectrum") return detail::cmd_spectrum(o, p, out);
        if (o.command == "lyapunov") return detail::cmd_lyapunov(o, p, out);
        if (o.command == "verify") return detail::cmd_verify(o, p, out);
        if (o.command == "eigs") return detail::cmd_eigs(o, p, out);
        err << "error: unknown command\n";
        return usage;
    } catch (const detail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.numerical() ? numerical : usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return numerical;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"fibspec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace fibspec::cli
