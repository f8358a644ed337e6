#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agreement.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "hubset.hpp"
#include "io.hpp"
#include "mdl.hpp"
#include "metrics.hpp"
#include "powerlaw.hpp"
#include "sdg.hpp"
#include "strength.hpp"
#include "threshold.hpp"

namespace hubdetect {

/// Default strength cutoff. Placeholder value: it has not been calibrated
/// against labelled data.
inline constexpr double kDefaultTau = 0.5;
/// Default Arcan low-tail crop level. Placeholder, like kDefaultTau.
inline constexpr double kDefaultArcanCrop = 0.5;

struct RunConfig {
    std::vector<std::string> corpus;  // graph files or directories
    std::vector<std::string> methods; // registry ids or slugs; empty selects all
    std::map<std::string, double> tau; // per strength method id
    double arcan_crop_quantile = kDefaultArcanCrop;
    double arcan_threshold_quantile = 0.75;
    std::size_t n_bootstrap = 1000;
    std::optional<std::uint64_t> seed;
    double alpha_level = 0.01;
    std::vector<IhMode> ih_modes{IhMode::tp, IhMode::ignore, IhMode::fp};
    std::string labels;
    std::string output_dir = "out";
    MetricOptions metrics;

    /// Enabled methods in registry order.
    std::vector<const MethodInfo*> enabled_methods() const {
        std::vector<const MethodInfo*> out;
        if (methods.empty()) {
            for (const auto& m : kMethods) out.push_back(&m);
            return out;
        }
        for (const auto& m : kMethods) {
            for (const auto& id : methods) {
                if (m.id == id || m.slug == id) {
                    out.push_back(&m);
                    break;
                }
            }
        }
        return out;
    }

    double tau_for(std::string_view method_id) const {
        if (auto it = tau.find(std::string(method_id)); it != tau.end()) return it->second;
        return kDefaultTau;
    }

    void validate() const {
        for (const auto& id : methods) method_info(id);
        for (const auto& [id, t] : tau) {
            if (method_info(id).family != Family::strength) {
                throw ValidationError("tau given for non-strength method '" + id + "'");
            }
            if (!(t >= -1.0 && t <= 1.0)) throw ValidationError("tau for '" + id + "' outside [-1, 1]");
        }
        if (!(arcan_crop_quantile >= 0.0 && arcan_crop_quantile < arcan_threshold_quantile &&
              arcan_threshold_quantile <= 1.0)) {
            throw ValidationError("arcan quantiles must satisfy 0 <= crop < threshold <= 1");
        }
        if (ih_modes.empty()) throw ValidationError("at least one ih mode is required");
    }
};

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("corpus")) {
            c.corpus = j.at("corpus").is_string()
                           ? std::vector<std::string>{j.at("corpus").get<std::string>()}
                           : j.at("corpus").get<std::vector<std::string>>();
        }
        if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("tau")) {
            for (const auto& [k, v] : j.at("tau").items()) {
                c.tau[std::string(method_info(k).id)] = v.get<double>();
            }
        }
        if (j.contains("arcan_crop_quantile")) c.arcan_crop_quantile = j.at("arcan_crop_quantile");
        if (j.contains("arcan_threshold_quantile")) {
            c.arcan_threshold_quantile = j.at("arcan_threshold_quantile");
        }
        if (j.contains("n_bootstrap")) c.n_bootstrap = j.at("n_bootstrap");
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("alpha_level")) c.alpha_level = j.at("alpha_level");
        if (j.contains("ih_modes")) {
            c.ih_modes.clear();
            for (const auto& s : j.at("ih_modes")) c.ih_modes.push_back(parse_ih_mode(s.get<std::string>()));
        }
        if (j.contains("labels")) c.labels = j.at("labels");
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir");
        if (j.contains("eigen_tol")) c.metrics.eigen_tol = j.at("eigen_tol");
        if (j.contains("eigen_max_iter")) c.metrics.eigen_max_iter = j.at("eigen_max_iter");
        if (j.contains("pagerank_damping")) c.metrics.pagerank_damping = j.at("pagerank_damping");
        if (j.contains("pagerank_tol")) c.metrics.pagerank_tol = j.at("pagerank_tol");
        if (j.contains("pagerank_max_iter")) c.metrics.pagerank_max_iter = j.at("pagerank_max_iter");
        if (j.contains("hits_tol")) c.metrics.hits_tol = j.at("hits_tol");
        if (j.contains("hits_max_iter")) c.metrics.hits_max_iter = j.at("hits_max_iter");
        if (j.contains("clustering")) {
            const auto mode = j.at("clustering").get<std::string>();
            if (mode == "directed") c.metrics.clustering_mode = ClusteringMode::directed;
            else if (mode == "undirected") c.metrics.clustering_mode = ClusteringMode::undirected;
            else throw ValidationError("clustering must be 'directed' or 'undirected'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline Corpus load_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw ValidationError("no corpus given");
    Corpus out;
    for (const auto& p : cfg.corpus) {
        for (const auto& g : load_corpus(std::filesystem::path(p))) out.add(g);
    }
    return out;
}

struct DetectOutputs {
    std::vector<HubSet> sets; // registry order
    std::optional<ThresholdResult> arcan_abs, arcan_norm;
    std::map<MetricId, std::vector<StrengthRecord>> scatter;
};

/// Runs every enabled detector over the corpus. Errors are rethrown with the
/// method (and system, where known) prefixed.
inline DetectOutputs detect_all(const Corpus& corpus, const RunConfig& cfg) {
    DetectOutputs out;
    for (const MethodInfo* m : cfg.enabled_methods()) {
        auto run = [&]() -> HubSet {
            switch (m->family) {
            case Family::average: return avg_hubs(corpus, m->direction);
            case Family::loubar: return loubar_hubs(corpus, m->direction);
            case Family::mdl_er: return mdl_hubs(corpus, Encoding::ER, m->direction);
            case Family::mdl_cm: return mdl_hubs(corpus, Encoding::CM, m->direction);
            case Family::arcan: {
                const auto mode = m->id == "Arcan_abs" ? ArcanMode::abs : ArcanMode::norm;
                auto th = arcan_threshold(corpus, mode, cfg.arcan_crop_quantile,
                                          cfg.arcan_threshold_quantile);
                (mode == ArcanMode::abs ? out.arcan_abs : out.arcan_norm) = th;
                return arcan_classify(corpus, mode, th);
            }
            case Family::strength: {
                auto records = strength_table(corpus, *m->centrality, cfg.metrics);
                auto hs = strength_classify(records, cfg.tau_for(m->id), *m->centrality);
                out.scatter[*m->centrality] = std::move(records);
                return hs;
            }
            }
            throw ValidationError("unhandled detector family");
        };
        try {
            out.sets.push_back(run());
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(m->id) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(m->id) + ": " + e.what());
        }
    }
    return out;
}

/// Writes hubsets/<slug>.json per method, thresholds, scatter and MDL curve
/// CSVs and the metric dump under `dir`; hubsets/index.json goes last.
inline DetectOutputs cmd_detect(const Corpus& corpus, const RunConfig& cfg,
                                const std::filesystem::path& dir) {
    auto out = detect_all(corpus, cfg);
    namespace fs = std::filesystem;

    std::string dump = io::metric_dump_header();
    for (const auto& g : corpus) {
        for (auto m : kAllMetrics) {
            if (g.size() < 2 && (m == MetricId::degree_c || m == MetricId::in_degree_c ||
                                 m == MetricId::out_degree_c)) {
                continue;
            }
            try {
                dump += io::metric_dump_rows(g.system_id(), compute_metric(g, m, cfg.metrics));
            } catch (const ConvergenceError& e) {
                throw ConvergenceError(g.system_id() + ": " + e.what());
            }
        }
    }
    io::write_text(dir / "metrics.tsv", dump);

    for (const auto& [metric, records] : out.scatter) {
        io::write_text(dir / "scatter" / (std::string(to_string(metric)) + ".csv"),
                       io::scatter_csv(records));
    }
    nlohmann::json th = nlohmann::json::object();
    if (out.arcan_abs) th["Arcan_abs"] = io::to_json(*out.arcan_abs);
    if (out.arcan_norm) th["Arcan_norm"] = io::to_json(*out.arcan_norm);
    if (!th.empty()) io::write_text(dir / "thresholds.json", th.dump(2) + "\n");

    for (const MethodInfo* m : cfg.enabled_methods()) {
        if (m->family != Family::mdl_er && m->family != Family::mdl_cm) continue;
        const auto enc = m->family == Family::mdl_er ? Encoding::ER : Encoding::CM;
        for (const auto& g : corpus) {
            io::write_text(dir / "mdl" / (g.system_id() + "__" + std::string(m->slug) + ".csv"),
                           io::dl_curve_csv(dl_curve(g, enc, m->direction)));
        }
    }

    nlohmann::json index = nlohmann::json::array();
    for (const auto& hs : out.sets) {
        const auto& info = method_info(hs.method);
        const std::string file = std::string(info.slug) + ".json";
        io::write_hubset(hs, dir / "hubsets" / file);
        index.push_back({{"method", hs.method},
                         {"direction", to_string(hs.direction)},
                         {"file", file},
                         {"count", hs.size()}});
    }
    io::write_text(dir / "hubsets" / "index.json", index.dump(2) + "\n");
    return out;
}

/// Reads hub sets listed in index.json, or every *.json in the directory.
inline std::vector<HubSet> read_hubsets(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<HubSet> out;
    if (fs::exists(dir / "index.json")) {
        nlohmann::json index;
        try {
            index = nlohmann::json::parse(read_file(dir / "index.json"));
            for (const auto& e : index) out.push_back(io::read_hubset(dir / e.at("file").get<std::string>()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError((dir / "index.json").string() + ": " + e.what());
        }
    } else {
        if (!fs::is_directory(dir)) throw ValidationError("hub set directory '" + dir.string() + "' missing");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) out.push_back(io::read_hubset(f));
    }
    std::stable_sort(out.begin(), out.end(), [](const HubSet& a, const HubSet& b) {
        return method_rank(a.method) < method_rank(b.method);
    });
    return out;
}

struct DegreeFit {
    std::string metric;
    FitResult fit;
    GofResult gof;
};

inline std::vector<degree_t> pooled_degrees(const Corpus& corpus, Direction d) {
    std::vector<degree_t> out;
    for (const auto& g : corpus) {
        for (node_index v = 0; v < g.size(); ++v) out.push_back(static_cast<degree_t>(g.degree(v, d)));
    }
    return out;
}

/// Power-law fit + bootstrap test of the pooled degree, in-degree and
/// out-degree distributions. Writes fit/report.json and fit/ccdf_<metric>.csv.
inline std::vector<DegreeFit> cmd_fit(const Corpus& corpus, const RunConfig& cfg,
                                      const std::filesystem::path& dir) {
    if (!cfg.seed) throw ValidationError("scale-free analysis needs a seed");
    std::vector<DegreeFit> fits;
    nlohmann::json report = nlohmann::json::array();
    const std::pair<const char*, Direction> kinds[] = {
        {"degree", Direction::all}, {"in_degree", Direction::in}, {"out_degree", Direction::out}};
    for (const auto& [name, d] : kinds) {
        const auto seq = pooled_degrees(corpus, d);
        FitResult fit;
        try {
            fit = fit_powerlaw(seq);
        } catch (const ValidationError& e) {
            throw InsufficientDataError(std::string(name) + ": " + e.what());
        }
        const auto gof = gof_pvalue(seq, fit, cfg.n_bootstrap, *cfg.seed, cfg.alpha_level);
        report.push_back(io::fit_report_entry(name, fit, gof));
        io::write_text(dir / "fit" / (std::string("ccdf_") + name + ".csv"),
                       io::ccdf_csv(ccdf_table(seq, fit)));
        fits.push_back({name, fit, gof});
    }
    io::write_text(dir / "fit" / "report.json", report.dump(2) + "\n");
    return fits;
}

struct AgreementOutputs {
    std::map<Direction, AgreementMatrix> matrices;
    std::map<Direction, KappaResult> group_kappa;
    KappaResult overall;
};

/// Jaccard matrices and Fleiss kappa per connection group plus overall, over
/// every corpus node. A group with a single hub set is an error; an empty
/// group is skipped.
inline AgreementOutputs cmd_agree(const Corpus& corpus, const std::vector<HubSet>& sets,
                                  const std::filesystem::path& dir) {
    const auto universe = corpus_universe(corpus);
    if (universe.empty()) throw ValidationError("empty corpus");
    for (const auto& s : sets) {
        for (const auto& m : s.members) {
            if (!std::binary_search(universe.begin(), universe.end(), m)) {
                throw ValidationError(s.method + " member '" + m.str() + "' is not in the corpus");
            }
        }
    }
    AgreementOutputs out;
    nlohmann::json kappa = nlohmann::json::object();
    for (Direction d : {Direction::in, Direction::out, Direction::all}) {
        std::vector<HubSet> group;
        for (const auto& s : sets) {
            if (s.direction == d) group.push_back(s);
        }
        if (group.empty()) continue;
        if (group.size() < 2) {
            throw ValidationError("group '" + std::string(to_string(d)) + "' has only " + group.front().method);
        }
        out.matrices[d] = jaccard_matrix(group);
        out.group_kappa[d] = fleiss_kappa(group, universe);
        io::write_text(dir / "agree" / ("jaccard_" + std::string(to_string(d)) + ".csv"),
                       io::to_csv(out.matrices[d]));
        kappa[std::string(to_string(d))] = {{"fleiss", out.group_kappa[d].value},
                                            {"band", to_string(out.group_kappa[d].band)},
                                            {"methods", group.size()}};
    }
    if (sets.size() < 2) throw ValidationError("agreement needs at least 2 hub sets");
    out.overall = fleiss_kappa(sets, universe);
    kappa["overall"] = {{"fleiss", out.overall.value},
                        {"band", to_string(out.overall.band)},
                        {"methods", sets.size()}};
    io::write_text(dir / "agree" / "kappa.json", kappa.dump(2) + "\n");
    return out;
}

inline std::vector<PrecisionReport> cmd_eval(const std::vector<HubSet>& sets, const GroundTruth& gt,
                                             const RunConfig& cfg, const std::filesystem::path& dir) {
    auto reports = evaluate_all(sets, gt);
    io::write_text(dir / "eval" / "precision.tsv", io::precision_tsv(reports, cfg.ih_modes));
    return reports;
}

/// detect, then fit (when a seed is set), agree, and eval (when labels are
/// set). manifest.json, listing what ran, is written last.
inline void cmd_report(const RunConfig& cfg) {
    const std::filesystem::path dir = cfg.output_dir;
    const auto corpus = load_corpus(cfg);
    const auto det = cmd_detect(corpus, cfg, dir);
    nlohmann::json manifest = {{"systems", corpus.size()},
                               {"services", corpus.total_nodes()},
                               {"methods", det.sets.size()}};
    if (cfg.seed) {
        cmd_fit(corpus, cfg, dir);
        manifest["fit"] = true;
    }
    std::map<Direction, std::size_t> per_group;
    for (const auto& s : det.sets) ++per_group[s.direction];
    const bool groups_ok = std::all_of(per_group.begin(), per_group.end(),
                                       [](const auto& kv) { return kv.second >= 2; });
    if (det.sets.size() >= 2 && groups_ok) {
        cmd_agree(corpus, det.sets, dir);
        manifest["agree"] = true;
    }
    if (!cfg.labels.empty()) {
        cmd_eval(det.sets, load_labels(cfg.labels), cfg, dir);
        manifest["eval"] = true;
    }
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace hubdetect
