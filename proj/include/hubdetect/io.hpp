#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agreement.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "hubset.hpp"
#include "metrics.hpp"
#include "powerlaw.hpp"
#include "sdg.hpp"
#include "strength.hpp"
#include "threshold.hpp"

namespace hubdetect::io {

/// Shortest text that round-trips the double.
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_fixed3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

// ---- hub sets ---------------------------------------------------------------

inline nlohmann::json to_json(const HubSet& hs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : hs.members) {
        nlohmann::json e = {{"method", hs.method},
                            {"direction", to_string(hs.direction)},
                            {"system", m.system},
                            {"node", m.node}};
        if (auto it = hs.scores.find(m); it != hs.scores.end()) e["score"] = it->second;
        arr.push_back(std::move(e));
    }
    return arr;
}

/// An empty array carries no method id, so `method_hint` names the detector
/// (the file's slug); entries override it.
inline HubSet hubset_from_json(const nlohmann::json& j, std::string_view method_hint) {
    if (!j.is_array()) throw ParseError("hub set must be a JSON array");
    HubSet hs;
    if (!method_hint.empty()) {
        const auto& info = method_info(method_hint);
        hs.method = std::string(info.id);
        hs.direction = info.direction;
    }
    try {
        for (const auto& e : j) {
            hs.method = e.at("method").get<std::string>();
            hs.direction = parse_direction(e.at("direction").get<std::string>());
            NodeKey key{e.at("system").get<std::string>(), e.at("node").get<std::string>()};
            if (e.contains("score")) hs.scores[key] = e.at("score").get<double>();
            hs.members.push_back(std::move(key));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("hub set: ") + e.what());
    }
    if (hs.method.empty()) throw ParseError("hub set has no method id");
    if (const auto* info = find_method(hs.method); info && info->direction != hs.direction) {
        throw ValidationError("hub set " + hs.method + " has direction " +
                              std::string(to_string(hs.direction)) + ", registry says " +
                              std::string(to_string(info->direction)));
    }
    hs.normalize();
    return hs;
}

inline void write_hubset(const HubSet& hs, const std::filesystem::path& path) {
    write_text(path, to_json(hs).dump(2) + "\n");
}

inline HubSet read_hubset(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return hubset_from_json(j, path.stem().string());
}

// ---- metrics ----------------------------------------------------------------

inline std::string metric_dump_header() { return "system\tnode\tmetric_id\tvalue\n"; }

inline std::string metric_dump_rows(const std::string& system, const MetricVector& mv) {
    std::string out;
    for (std::size_t i = 0; i < mv.size(); ++i) {
        out += system + "\t" + mv.nodes[i] + "\t" + std::string(to_string(mv.metric)) + "\t" +
               fmt_double(mv.values[i]) + "\n";
    }
    return out;
}

struct MetricRow {
    std::string system, node;
    MetricId metric;
    double value;
};

inline std::vector<MetricRow> parse_metric_dump(const std::string& text) {
    std::vector<MetricRow> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line, '\t');
        if (f.size() != 4) throw ParseError("metric dump: bad row '" + line + "'");
        rows.push_back({f[0], f[1], parse_metric(f[2]), std::stod(f[3])});
    }
    return rows;
}

// ---- agreement ----------------------------------------------------------------

inline std::string to_csv(const AgreementMatrix& m) {
    std::string out = "method";
    for (const auto& id : m.method_ids) out += "," + csv_field(id);
    out += "\n";
    for (std::size_t i = 0; i < m.method_ids.size(); ++i) {
        out += csv_field(m.method_ids[i]);
        for (double v : m.values[i]) out += "," + fmt_double(v);
        out += "\n";
    }
    return out;
}

inline AgreementMatrix parse_matrix_csv(const std::string& text) {
    AgreementMatrix m;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("matrix csv: empty");
    auto head = split_csv_line(line);
    m.method_ids.assign(head.begin() + 1, head.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != m.method_ids.size() + 1) throw ParseError("matrix csv: ragged row");
        std::vector<double> row;
        for (std::size_t i = 1; i < f.size(); ++i) row.push_back(std::stod(f[i]));
        m.values.push_back(std::move(row));
    }
    return m;
}

// ---- strength / mdl -----------------------------------------------------------

inline std::string scatter_csv(const std::vector<StrengthRecord>& records) {
    std::string out = "system,node,centrality,clustering,strength\n";
    for (const auto& r : records) {
        out += csv_field(r.system) + "," + csv_field(r.node) + "," + fmt_double(r.centrality) + "," +
               fmt_double(r.clustering) + "," + fmt_double(r.strength) + "\n";
    }
    return out;
}

inline std::string dl_curve_csv(const std::vector<std::pair<std::size_t, double>>& curve) {
    std::string out = "h,bits\n";
    for (const auto& [h, bits] : curve) out += std::to_string(h) + "," + fmt_double(bits) + "\n";
    return out;
}

inline nlohmann::json to_json(const ThresholdResult& t) {
    return {{"metric", to_string(t.metric)},
            {"crop_quantile", t.crop_quantile},
            {"threshold_quantile", t.threshold_quantile},
            {"threshold", t.threshold},
            {"cropped_count", t.cropped_count}};
}

// ---- precision ----------------------------------------------------------------

inline std::string precision_column(IhMode m) {
    switch (m) {
    case IhMode::tp: return "ih_tp";
    case IhMode::ignore: return "ih_ignored";
    case IhMode::fp: return "ih_fp";
    }
    return "?";
}

/// Table with one row per method; undefined precision renders as "-".
inline std::string precision_tsv(const std::vector<PrecisionReport>& reports,
                                 const std::vector<IhMode>& modes) {
    std::string out = "method\tn_detected";
    for (auto m : modes) out += "\t" + precision_column(m);
    out += "\n";
    for (const auto& r : reports) {
        out += r.method + "\t" + std::to_string(r.n_detected);
        for (auto m : modes) {
            const auto v = r.get(m);
            out += "\t" + (v ? fmt_fixed3(*v) : std::string("-"));
        }
        out += "\n";
    }
    return out;
}

inline std::vector<PrecisionReport> parse_precision_tsv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("precision tsv: empty");
    const auto head = split(line, '\t');
    std::vector<PrecisionReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, '\t');
        if (f.size() != head.size()) throw ParseError("precision tsv: ragged row");
        PrecisionReport r;
        r.method = f[0];
        r.n_detected = std::stoul(f[1]);
        for (std::size_t i = 2; i < f.size(); ++i) {
            std::optional<double> v;
            if (f[i] != "-") v = std::stod(f[i]);
            if (head[i] == "ih_tp") r.precision_ih_tp = v;
            else if (head[i] == "ih_ignored") r.precision_ih_ignored = v;
            else if (head[i] == "ih_fp") r.precision_ih_fp = v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---- scale-free ---------------------------------------------------------------

inline nlohmann::json fit_report_entry(std::string_view metric, const FitResult& fit,
                                       const GofResult& gof) {
    return {{"metric", metric},
            {"alpha", fit.alpha},
            {"xmin", fit.xmin},
            {"ks", fit.ks_distance},
            {"n_tail", fit.n_tail},
            {"p", gof.p_value},
            {"n_bootstrap", gof.n_bootstrap},
            {"seed", gof.seed},
            {"alpha_level", gof.alpha_level},
            {"verdict", to_string(scale_free_verdict(gof, gof.alpha_level))},
            {"verdict_inverted_reading", to_string(inverted_verdict(gof, gof.alpha_level))}};
}

inline std::string ccdf_csv(const std::vector<CcdfPoint>& pts) {
    std::string out = "x,empirical_ccdf,fitted_ccdf\n";
    for (const auto& p : pts) {
        out += std::to_string(p.x) + "," + fmt_double(p.empirical) + "," +
               (std::isnan(p.fitted) ? std::string() : fmt_double(p.fitted)) + "\n";
    }
    return out;
}

} // namespace hubdetect::io
