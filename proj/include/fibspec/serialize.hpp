#pragma once

// JSON and CSV encodings. Doubles are written in shortest round-trip form.

#include <charconv>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibspec/bands.hpp"
#include "fibspec/error.hpp"
#include "fibspec/operator.hpp"

namespace fibspec {

using Json = nlohmann::ordered_json;

/// Flat key -> value record of a run, embedded in every output file.
using ConfigRecord = std::map<std::string, std::string>;

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline Json to_json(const BandSet& bs) {
    Json j;
    if (bs.params) {
        j["a"] = bs.params->a();
        j["b"] = bs.params->b();
    } else {
        j["a"] = nullptr;
        j["b"] = nullptr;
    }
    j["kind"] = to_string(bs.kind);
    j["k"] = bs.level;
    Json bands = Json::array();
    for (const Interval& b : bs.bands) bands.push_back(Json::array({b.lo, b.hi}));
    j["bands"] = std::move(bands);
    j["tol"] = bs.tol;
    return j;
}

inline BandKind band_kind_from_string(const std::string& s) {
    for (BandKind k : {BandKind::SigmaK, BandKind::Cover, BandKind::Escape, BandKind::Window, BandKind::Synthetic})
        if (s == to_string(k)) return k;
    throw Error(ErrorKind::InvalidArgument, "unknown band set kind '" + s + "'");
}

inline BandSet band_set_from_json(const Json& j) {
    try {
        BandSet out;
        if (!j.at("a").is_null()) out.params = HoppingPair(j.at("a").get<double>(), j.at("b").get<double>());
        out.kind = band_kind_from_string(j.at("kind").get<std::string>());
        out.level = j.at("k").get<int>();
        out.tol = j.at("tol").get<double>();
        for (const auto& b : j.at("bands")) out.bands.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed band set JSON: ") + e.what());
    }
}

inline Json to_json(const EigenvalueList& e, double tol) {
    Json j;
    j["n"] = e.size();
    j["boundary"] = to_string(e.boundary);
    j["values"] = e.values;
    j["tol"] = tol;
    return j;
}

inline Json to_json(const ConfigRecord& c) {
    Json j = Json::object();
    for (const auto& [k, v] : c) j[k] = v;
    return j;
}

/// Rows of doubles and strings, with the run configuration as "# key = value"
/// header lines.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    CsvWriter& row() {
        rows_.emplace_back();
        return *this;
    }
    CsvWriter& add(double v) { return add_cell(format_double(v)); }
    CsvWriter& add(long long v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(int v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(std::size_t v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(bool v) { return add_cell(v ? "1" : "0"); }
    CsvWriter& add(const std::string& v) { return add_cell(quote(v)); }
    CsvWriter& add(const char* v) { return add_cell(quote(v)); }

    std::string str(const ConfigRecord& config) const {
        std::string out;
        for (const auto& [k, v] : config) out += "# " + k + " = " + v + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
        out += "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
            out += "\n";
        }
        return out;
    }

private:
    CsvWriter& add_cell(std::string cell) {
        if (rows_.empty()) rows_.emplace_back();
        rows_.back().push_back(std::move(cell));
        return *this;
    }

    static std::string quote(const std::string& v) {
        if (v.find_first_of(",\"\n") == std::string::npos) return v;
        std::string out = "\"";
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string band_set_csv(const BandSet& bs, const ConfigRecord& config) {
    CsvWriter w({"lo", "hi"});
    for (const Interval& b : bs.bands) w.row().add(b.lo).add(b.hi);
    return w.str(config);
}

} // namespace fibspec
