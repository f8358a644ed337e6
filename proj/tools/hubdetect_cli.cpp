// hubdetect: hub-like service detection over service dependency graphs.
//
//   hubdetect detect --corpus graphs/ --out out/
//   hubdetect fit    --corpus graphs/ --seed 42 --out out/
//   hubdetect agree  --corpus graphs/ --hubsets out/hubsets --out out/
//   hubdetect eval   --hubsets out/hubsets --labels labels.json --out out/
//   hubdetect gen    --kind planted_hubs --n 30 --hubs 2 --seed 7 --out g.json
//   hubdetect report --config run.json
//
// Exit codes: 0 success, 1 validation or configuration error, 2 numerical
// non-convergence.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hubdetect/hubdetect.hpp"

namespace fs = std::filesystem;
using namespace hubdetect;

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> corpus;
    std::vector<std::string> methods;
    std::vector<std::string> tau; // METHOD=VALUE
    double arcan_crop = kDefaultArcanCrop;
    double arcan_q = 0.75;
    std::size_t bootstrap = 1000;
    std::uint64_t seed = 0;
    double alpha_level = 0.01;
    std::vector<std::string> ih_modes;
    std::string labels;
    std::string out;
    std::string hubsets;
    std::string clustering;
};

struct Bound {
    CLI::Option* arcan_crop = nullptr;
    CLI::Option* arcan_q = nullptr;
    CLI::Option* bootstrap = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* alpha_level = nullptr;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--corpus", f.corpus, "graph files or directories");
    app->add_option("--out", f.out, "output directory");
}

// Config file first, then every flag that was given on the command line.
RunConfig resolve(const Flags& f, const Bound& b) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (!f.corpus.empty()) cfg.corpus = f.corpus;
    if (!f.methods.empty()) cfg.methods = f.methods;
    for (const auto& kv : f.tau) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--tau expects METHOD=VALUE, got '" + kv + "'");
        cfg.tau[std::string(method_info(kv.substr(0, eq)).id)] = std::stod(kv.substr(eq + 1));
    }
    if (b.arcan_crop && b.arcan_crop->count()) cfg.arcan_crop_quantile = f.arcan_crop;
    if (b.arcan_q && b.arcan_q->count()) cfg.arcan_threshold_quantile = f.arcan_q;
    if (b.bootstrap && b.bootstrap->count()) cfg.n_bootstrap = f.bootstrap;
    if (b.seed && b.seed->count()) cfg.seed = f.seed;
    if (b.alpha_level && b.alpha_level->count()) cfg.alpha_level = f.alpha_level;
    if (!f.ih_modes.empty()) {
        cfg.ih_modes.clear();
        for (const auto& m : f.ih_modes) cfg.ih_modes.push_back(parse_ih_mode(m));
    }
    if (!f.labels.empty()) cfg.labels = f.labels;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (f.clustering == "undirected") cfg.metrics.clustering_mode = ClusteringMode::undirected;
    else if (f.clustering == "directed") cfg.metrics.clustering_mode = ClusteringMode::directed;
    else if (!f.clustering.empty()) throw ValidationError("--clustering must be directed or undirected");
    cfg.validate();
    return cfg;
}

struct GenFlags {
    std::string kind;
    std::size_t n = 30;
    std::size_t leaves = 4;
    double p = 0.1;
    std::size_t hubs = 1;
    double mean = 2.0;
    std::size_t hub_degree = 0;
    std::string direction = "out";
    double alpha = 2.5;
    std::int64_t xmin = 1;
    std::uint64_t seed = 0;
    std::string system;
    std::string format = "json";
    std::string out;
    std::string labels_out;
};

int run_gen(const GenFlags& g, bool seed_given) {
    const bool stochastic = g.kind == "er_random" || g.kind == "planted_hubs" ||
                            g.kind == "powerlaw_sequence";
    if (stochastic && !seed_given) throw ValidationError(g.kind + " needs --seed");
    const std::string system = g.system.empty() ? g.kind : g.system;
    auto emit = [&](const Sdg& graph) {
        const auto fmt = g.format == "edgelist" ? SdgFormat::edgelist : SdgFormat::json;
        if (g.out.empty()) {
            std::cout << (fmt == SdgFormat::json ? to_json(graph).dump(2) + "\n" : to_edgelist(graph));
        } else {
            save_sdg(graph, g.out, fmt);
        }
    };
    if (g.kind == "star") {
        emit(gen::star(g.leaves, g.direction == "in", system));
    } else if (g.kind == "cycle") {
        emit(gen::cycle(g.n, system));
    } else if (g.kind == "er_random") {
        emit(gen::er_random(g.n, g.p, g.seed, system));
    } else if (g.kind == "planted_hubs") {
        gen::PlantedParams prm;
        prm.n = g.n;
        prm.n_hubs = g.hubs;
        prm.background_mean = g.mean;
        prm.hub_degree = g.hub_degree;
        prm.direction = parse_direction(g.direction);
        auto planted = gen::planted_hubs(prm, g.seed, system);
        emit(planted.graph);
        if (!g.labels_out.empty()) {
            GroundTruth gt;
            for (const auto& id : planted.graph.node_ids()) {
                const bool hub = std::binary_search(planted.hubs.begin(), planted.hubs.end(), id);
                gt.add({system, id}, hub ? Label::hub : Label::none);
            }
            io::write_text(g.labels_out, labels_to_json(gt).dump(2) + "\n");
        }
    } else if (g.kind == "powerlaw_sequence") {
        const auto seq = powerlaw_sequence(g.alpha, g.xmin, g.n, g.seed);
        std::string text;
        for (auto x : seq) text += std::to_string(x) + "\n";
        if (g.out.empty()) std::cout << text;
        else io::write_text(g.out, text);
    } else {
        throw ValidationError("unknown generator kind '" + g.kind + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hub-like service detection for service dependency graphs"};
    app.require_subcommand(1);

    Flags f;
    Bound b;

    auto* detect = app.add_subcommand("detect", "run hub detectors, one hub-set file per method");
    add_common(detect, f);
    detect->add_option("--methods", f.methods, "method ids to run (default: all 19)");
    detect->add_option("--tau", f.tau, "strength cutoff per method, METHOD=VALUE");
    b.arcan_crop = detect->add_option("--arcan-crop", f.arcan_crop, "Arcan low-tail crop quantile");
    b.arcan_q = detect->add_option("--arcan-quantile", f.arcan_q, "Arcan threshold quantile");
    detect->add_option("--clustering", f.clustering, "directed (default) or undirected");

    auto* fit = app.add_subcommand("fit", "power-law fit and bootstrap test of pooled degrees");
    add_common(fit, f);
    auto* fit_boot = fit->add_option("--bootstrap", f.bootstrap, "bootstrap replicates");
    auto* fit_seed = fit->add_option("--seed", f.seed, "bootstrap seed (required)");
    auto* fit_alpha = fit->add_option("--alpha-level", f.alpha_level, "significance level");

    auto* agree = app.add_subcommand("agree", "Jaccard matrices and Fleiss kappa per group");
    add_common(agree, f);
    agree->add_option("--hubsets", f.hubsets, "directory of hub-set files")->required();

    auto* eval = app.add_subcommand("eval", "precision of hub sets against labels");
    add_common(eval, f);
    eval->add_option("--hubsets", f.hubsets, "directory of hub-set files")->required();
    eval->add_option("--labels", f.labels, "label file");
    eval->add_option("--ih-mode", f.ih_modes, "tp, ignore, fp (default: all)");

    auto* report = app.add_subcommand("report", "detect + fit + agree + eval into one tree");
    add_common(report, f);
    report->add_option("--methods", f.methods, "method ids to run (default: all 19)");
    report->add_option("--tau", f.tau, "strength cutoff per method, METHOD=VALUE");
    auto* rep_crop = report->add_option("--arcan-crop", f.arcan_crop, "Arcan low-tail crop quantile");
    auto* rep_q = report->add_option("--arcan-quantile", f.arcan_q, "Arcan threshold quantile");
    auto* rep_boot = report->add_option("--bootstrap", f.bootstrap, "bootstrap replicates");
    auto* rep_seed = report->add_option("--seed", f.seed, "bootstrap seed; enables fit");
    report->add_option("--labels", f.labels, "label file; enables eval");
    report->add_option("--ih-mode", f.ih_modes, "tp, ignore, fp (default: all)");
    report->add_option("--clustering", f.clustering, "directed (default) or undirected");

    GenFlags gf;
    auto* gen_cmd = app.add_subcommand("gen", "synthetic graphs and degree sequences");
    gen_cmd->add_option("--kind", gf.kind, "star, cycle, er_random, planted_hubs, powerlaw_sequence")
        ->required();
    gen_cmd->add_option("--n", gf.n, "node count / sample size");
    gen_cmd->add_option("--leaves", gf.leaves, "star leaves");
    gen_cmd->add_option("--p", gf.p, "er_random edge probability");
    gen_cmd->add_option("--hubs", gf.hubs, "planted hub count");
    gen_cmd->add_option("--mean", gf.mean, "planted background mean degree");
    gen_cmd->add_option("--hub-degree", gf.hub_degree, "planted hub degree (0: automatic)");
    gen_cmd->add_option("--direction", gf.direction, "in or out");
    gen_cmd->add_option("--alpha", gf.alpha, "power-law exponent");
    gen_cmd->add_option("--xmin", gf.xmin, "power-law cutoff");
    auto* gen_seed = gen_cmd->add_option("--seed", gf.seed, "random seed");
    gen_cmd->add_option("--system", gf.system, "system id");
    gen_cmd->add_option("--format", gf.format, "json or edgelist");
    gen_cmd->add_option("--out", gf.out, "output file (default: stdout)");
    gen_cmd->add_option("--labels-out", gf.labels_out, "planted_hubs: write ground-truth labels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen_cmd) return run_gen(gf, gen_seed->count() > 0);

        if (*fit) {
            b.bootstrap = fit_boot;
            b.seed = fit_seed;
            b.alpha_level = fit_alpha;
        }
        if (*report) {
            b.arcan_crop = rep_crop;
            b.arcan_q = rep_q;
            b.bootstrap = rep_boot;
            b.seed = rep_seed;
        }
        const RunConfig cfg = resolve(f, b);
        const fs::path out = cfg.output_dir;

        if (*detect) {
            const auto res = cmd_detect(load_corpus(cfg), cfg, out);
            for (const auto& hs : res.sets) std::cout << hs.method << '\t' << hs.size() << '\n';
        } else if (*fit) {
            for (const auto& r : cmd_fit(load_corpus(cfg), cfg, out)) {
                std::cout << r.metric << "\talpha=" << r.fit.alpha << "\txmin=" << r.fit.xmin
                          << "\tks=" << r.fit.ks_distance << "\tp=" << r.gof.p_value << '\t'
                          << to_string(scale_free_verdict(r.gof, cfg.alpha_level)) << '\n';
            }
        } else if (*agree) {
            const auto res = cmd_agree(load_corpus(cfg), read_hubsets(f.hubsets), out);
            for (const auto& [d, k] : res.group_kappa) {
                std::cout << to_string(d) << "\tfleiss=" << k.value << '\t' << to_string(k.band) << '\n';
            }
            std::cout << "overall\tfleiss=" << res.overall.value << '\t' << to_string(res.overall.band)
                      << '\n';
        } else if (*eval) {
            if (cfg.labels.empty()) throw ValidationError("eval needs --labels");
            const auto reports = cmd_eval(read_hubsets(f.hubsets), load_labels(cfg.labels), cfg, out);
            std::cout << io::precision_tsv(reports, cfg.ih_modes);
        } else if (*report) {
            cmd_report(cfg);
            std::cout << "report written to " << out.string() << '\n';
        }
        return 0;
    } catch (const ConvergenceError& e) {
        std::cerr << "hubdetect: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "hubdetect: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "hubdetect: " << e.what() << '\n';
        return 1;
    }
}
