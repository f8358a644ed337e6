#include <cstdlib>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "hubdetect/generators.hpp"
#include "hubdetect/pipeline.hpp"
#include "test_util.hpp"

using namespace hubdetect;
namespace fs = std::filesystem;

namespace {

Corpus small_corpus() {
    Corpus c;
    c.add(gen::planted_hubs({.n = 30, .n_hubs = 2, .background_mean = 1.5}, 1, "alpha").graph);
    c.add(gen::planted_hubs({.n = 25, .n_hubs = 1, .background_mean = 1.5, .direction = Direction::in}, 2,
                            "beta")
              .graph);
    c.add(gen::star(8, false, "gamma"));
    return c;
}

void write_corpus(const Corpus& c, const fs::path& dir) {
    for (const auto& g : c) save_sdg(g, dir / (g.system_id() + ".json"), SdgFormat::json);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HUBDETECT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Detect, FullRunWritesEveryMethod) {
    testutil::TempDir tmp("detect");
    RunConfig cfg;
    const auto out = cmd_detect(small_corpus(), cfg, tmp.path());
    ASSERT_EQ(out.sets.size(), 19u);
    std::map<Direction, int> per_group;
    for (const auto& s : out.sets) ++per_group[s.direction];
    EXPECT_EQ(per_group[Direction::in], 7);
    EXPECT_EQ(per_group[Direction::out], 6);
    EXPECT_EQ(per_group[Direction::all], 6);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(tmp / "hubsets")) files += e.path().filename() != "index.json";
    EXPECT_EQ(files, 19u);
    for (const char* f : {"metrics.tsv", "thresholds.json", "hubsets/index.json", "scatter/pagerank.csv",
                          "mdl/alpha__ER_out.csv"}) {
        EXPECT_TRUE(fs::exists(tmp / f)) << f;
    }
}

TEST(Detect, SingleMethodConfig) {
    testutil::TempDir tmp("single");
    RunConfig cfg;
    cfg.methods = {"Cl_PageRank"};
    const auto out = cmd_detect(small_corpus(), cfg, tmp.path());
    ASSERT_EQ(out.sets.size(), 1u);
    EXPECT_EQ(out.sets[0].method, "Cl.&PageRank");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(tmp / "hubsets")) files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    EXPECT_EQ(files, (std::vector<std::string>{"Cl_PageRank.json", "index.json"}));
    EXPECT_FALSE(fs::exists(tmp / "thresholds.json"));
}

TEST(Detect, RerunIsByteIdentical) {
    testutil::TempDir a("rerun_a"), b("rerun_b");
    cmd_detect(small_corpus(), RunConfig{}, a.path());
    cmd_detect(small_corpus(), RunConfig{}, b.path());
    const auto sa = testutil::snapshot(a.path());
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, testutil::snapshot(b.path()));
}

TEST(Detect, EmittedFilesRoundTrip) {
    testutil::TempDir tmp("roundtrip");
    const auto corpus = small_corpus();
    const auto out = cmd_detect(corpus, RunConfig{}, tmp.path());
    const auto back = read_hubsets(tmp / "hubsets");
    ASSERT_EQ(back.size(), out.sets.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].method, out.sets[i].method);
        EXPECT_EQ(back[i].direction, out.sets[i].direction);
        EXPECT_EQ(back[i].members, out.sets[i].members);
        EXPECT_EQ(io::to_json(back[i]), io::to_json(out.sets[i]));
    }
    // also without the index: every *.json in the directory
    fs::remove(tmp / "hubsets" / "index.json");
    const auto scanned = read_hubsets(tmp / "hubsets");
    ASSERT_EQ(scanned.size(), out.sets.size());
    for (std::size_t i = 0; i < scanned.size(); ++i) EXPECT_EQ(scanned[i].method, out.sets[i].method);

    const auto rows = io::parse_metric_dump(testutil::slurp(tmp / "metrics.tsv"));
    EXPECT_EQ(io::metric_dump_header() + [&] {
        std::string s;
        for (const auto& g : corpus) {
            for (auto m : kAllMetrics) s += io::metric_dump_rows(g.system_id(), compute_metric(g, m));
        }
        return s;
    }(), testutil::slurp(tmp / "metrics.tsv"));
    EXPECT_FALSE(rows.empty());
}

TEST(Detect, EmptyHubSetFileKeepsItsMethod) {
    testutil::TempDir tmp("empty");
    Corpus c;
    c.add(gen::cycle(6, "ring"));
    RunConfig cfg;
    cfg.methods = {"Avg_in", "ER_in"};
    cmd_detect(c, cfg, tmp.path());
    const auto back = read_hubsets(tmp / "hubsets");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].method, "Avg_in");
    EXPECT_TRUE(back[0].members.empty());
    EXPECT_EQ(back[1].method, "ER_in");
}

TEST(Agree, MatricesAndKappa) {
    testutil::TempDir tmp("agree");
    const auto corpus = small_corpus();
    const auto det = cmd_detect(corpus, RunConfig{}, tmp.path());
    const auto res = cmd_agree(corpus, det.sets, tmp.path());
    EXPECT_EQ(res.matrices.size(), 3u);
    EXPECT_EQ(res.matrices.at(Direction::in).method_ids.size(), 7u);
    for (const char* f : {"agree/jaccard_in.csv", "agree/jaccard_out.csv", "agree/jaccard_all.csv", "agree/kappa.json"}) {
        EXPECT_TRUE(fs::exists(tmp / f)) << f;
    }
    const auto parsed = io::parse_matrix_csv(testutil::slurp(tmp / "agree/jaccard_out.csv"));
    EXPECT_EQ(parsed.method_ids, res.matrices.at(Direction::out).method_ids);
    for (std::size_t i = 0; i < parsed.values.size(); ++i) {
        for (std::size_t j = 0; j < parsed.values.size(); ++j) {
            EXPECT_NEAR(parsed.values[i][j], res.matrices.at(Direction::out).values[i][j], 1e-12);
        }
    }
    const auto kappa = nlohmann::json::parse(testutil::slurp(tmp / "agree/kappa.json"));
    EXPECT_DOUBLE_EQ(kappa.at("overall").at("fleiss").get<double>(), res.overall.value);
}

TEST(Agree, IdenticalSetsGiveJaccardOne) {
    testutil::TempDir tmp("agree_same");
    const auto corpus = small_corpus();
    HubSet a = make_hubset("Avg_in"), b = make_hubset("ER_in");
    a.members = b.members = {{"alpha", corpus.graphs()[0].node_id(0)}};
    const auto res = cmd_agree(corpus, {a, b}, tmp.path());
    EXPECT_EQ(res.matrices.at(Direction::in).values[0][1], 1.0);
    EXPECT_EQ(res.overall.value, 1.0);
}

TEST(Agree, SingleMethodGroupAndForeignMembers) {
    testutil::TempDir tmp("agree_bad");
    const auto corpus = small_corpus();
    EXPECT_THROW(cmd_agree(corpus, {make_hubset("Avg_in"), make_hubset("Avg_out"), make_hubset("ER_out")},
                           tmp.path()),
                 ValidationError);
    HubSet a = make_hubset("Avg_in"), b = make_hubset("ER_in");
    a.members = {{"nowhere", "x"}};
    EXPECT_THROW(cmd_agree(corpus, {a, b}, tmp.path()), ValidationError);
}

TEST(Fit, TinyCorpusHasInsufficientData) {
    testutil::TempDir tmp("fit_tiny");
    Corpus c;
    c.add(Sdg("two", {"a", "b"}, {{"a", "b"}}));
    RunConfig cfg;
    cfg.seed = 1;
    cfg.n_bootstrap = 100;
    EXPECT_THROW(cmd_fit(c, cfg, tmp.path()), InsufficientDataError);
}

TEST(Fit, SeedIsRequired) {
    testutil::TempDir tmp("fit_seed");
    EXPECT_THROW(cmd_fit(small_corpus(), RunConfig{}, tmp.path()), ValidationError);
}

TEST(Fit, ReportAndCcdfFiles) {
    testutil::TempDir tmp("fit");
    Corpus c;
    for (std::uint64_t s = 0; s < 4; ++s) c.add(gen::er_random(60, 0.05, s, "sys" + std::to_string(s)));
    RunConfig cfg;
    cfg.seed = 3;
    cfg.n_bootstrap = 100;
    const auto fits = cmd_fit(c, cfg, tmp.path());
    ASSERT_EQ(fits.size(), 3u);
    EXPECT_EQ(fits[0].metric, "degree");
    const auto report = nlohmann::json::parse(testutil::slurp(tmp / "fit/report.json"));
    ASSERT_EQ(report.size(), 3u);
    EXPECT_EQ(report[1].at("metric"), "in_degree");
    EXPECT_EQ(report[2].at("seed"), 3);
    for (const char* f : {"fit/ccdf_degree.csv", "fit/ccdf_in_degree.csv", "fit/ccdf_out_degree.csv"}) {
        EXPECT_TRUE(fs::exists(tmp / f)) << f;
    }
    testutil::TempDir again("fit_again");
    cmd_fit(c, cfg, again.path());
    EXPECT_EQ(testutil::snapshot(tmp.path()), testutil::snapshot(again.path()));
}

TEST(Eval, WritesPrecisionTable) {
    testutil::TempDir tmp("eval");
    HubSet a = make_hubset("Avg_in");
    a.members = {{"s", "A"}, {"s", "C"}};
    const auto gt = parse_labels(R"({"s/A": "hub", "s/C": "none"})");
    RunConfig cfg;
    cfg.ih_modes = {IhMode::fp};
    const auto reports = cmd_eval({a}, gt, cfg, tmp.path());
    EXPECT_EQ(reports[0].precision_ih_fp, 0.5);
    EXPECT_EQ(testutil::slurp(tmp / "eval/precision.tsv"), "method\tn_detected\tih_fp\nAvg_in\t2\t0.500\n");
}

TEST(Config, ParsingAndValidation) {
    const auto cfg = config_from_json(nlohmann::json::parse(R"({
        "corpus": "graphs", "methods": ["ER_in", "Cl_Hub"], "tau": {"Cl_Hub": 0.2},
        "arcan_crop_quantile": 0.0, "n_bootstrap": 200, "seed": 9, "ih_modes": ["tp", "ignored"],
        "clustering": "undirected", "hits_max_iter": 5000})"));
    EXPECT_EQ(cfg.corpus, std::vector<std::string>{"graphs"});
    EXPECT_EQ(cfg.tau_for("Cl.&Hub"), 0.2);
    EXPECT_EQ(cfg.tau_for("Cl.&PageRank"), kDefaultTau);
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.n_bootstrap, 200u);
    EXPECT_EQ(cfg.metrics.clustering_mode, ClusteringMode::undirected);
    EXPECT_EQ(cfg.metrics.hits_max_iter, 5000u);
    EXPECT_EQ(cfg.ih_modes, (std::vector<IhMode>{IhMode::tp, IhMode::ignore}));
    ASSERT_EQ(cfg.enabled_methods().size(), 2u);
    EXPECT_EQ(cfg.enabled_methods()[0]->id, "ER_in");

    const char* bad[] = {R"({"methods": ["Nope"]})",
                         R"({"tau": {"ER_in": 0.1}})",
                         R"({"tau": {"Cl_Hub": 1.5}})",
                         R"({"arcan_crop_quantile": 0.8})",
                         R"({"ih_modes": []})",
                         R"({"clustering": "sideways"})",
                         R"({"n_bootstrap": "many"})"};
    for (const char* b : bad) EXPECT_THROW(config_from_json(nlohmann::json::parse(b)), ValidationError) << b;
    EXPECT_THROW(load_corpus(RunConfig{}), ValidationError);
}

TEST(Report, FullTreeWithManifest) {
    testutil::TempDir tmp("report");
    write_corpus(small_corpus(), tmp / "graphs");
    RunConfig cfg;
    cfg.corpus = {(tmp / "graphs").string()};
    cfg.output_dir = (tmp / "out").string();
    cmd_report(cfg);
    const auto manifest = nlohmann::json::parse(testutil::slurp(tmp / "out/manifest.json"));
    EXPECT_EQ(manifest.at("systems"), 3);
    EXPECT_EQ(manifest.at("methods"), 19);
    EXPECT_TRUE(manifest.at("agree").get<bool>());
    EXPECT_FALSE(manifest.contains("fit"));
    EXPECT_FALSE(manifest.contains("eval"));
}

TEST(Cli, ExitCodes) {
    testutil::TempDir tmp("cli");
    write_corpus(small_corpus(), tmp / "graphs");
    const std::string corpus = (tmp / "graphs").string();
    const std::string out = (tmp / "out").string();
    EXPECT_EQ(run_cli("detect --corpus " + corpus + " --out " + out), 0);
    EXPECT_TRUE(fs::exists(tmp / "out/hubsets/index.json"));
    EXPECT_EQ(run_cli("agree --corpus " + corpus + " --hubsets " + out + "/hubsets --out " + out), 0);
    EXPECT_EQ(run_cli("gen --kind er_random --n 10 --seed 1 --out " + (tmp / "g.json").string()), 0);

    EXPECT_EQ(run_cli("detect --corpus " + (tmp / "missing").string() + " --out " + out), 1);
    EXPECT_EQ(run_cli("detect --corpus " + corpus + " --methods Nope --out " + out), 1);
    EXPECT_EQ(run_cli("fit --corpus " + corpus + " --out " + out), 1); // no seed
    EXPECT_EQ(run_cli("gen --kind er_random --n 10"), 1);               // no seed
    EXPECT_EQ(run_cli("frobnicate"), 1);

    // slow HITS convergence on this graph at the default iteration cap
    save_sdg(gen::er_random(15, 0.12, 25, "slow"), tmp / "slow/slow.json", SdgFormat::json);
    EXPECT_EQ(run_cli("detect --corpus " + (tmp / "slow").string() + " --methods Cl_Hub --out " + out), 2);
    testutil::write(tmp / "slow.cfg.json", R"({"hits_max_iter": 10000})");
    EXPECT_EQ(run_cli("detect --config " + (tmp / "slow.cfg.json").string() + " --corpus " +
                      (tmp / "slow").string() + " --methods Cl_Hub --out " + out),
              0);
}

TEST(Sample, BundledSampleRunsEndToEnd) {
    const fs::path root = HUBDETECT_SOURCE_DIR;
    auto cfg = load_config(root / "data/sample/run.json");
    testutil::TempDir tmp("sample");
    cfg.corpus = {(root / "data/sample/graphs").string()};
    cfg.labels = (root / "data/sample/labels.json").string();
    cfg.output_dir = tmp.path().string();
    cfg.n_bootstrap = 100;
    cmd_report(cfg);
    const auto manifest = nlohmann::json::parse(testutil::slurp(tmp / "manifest.json"));
    EXPECT_EQ(manifest.at("systems"), 3);
    EXPECT_TRUE(manifest.at("eval").get<bool>());
    EXPECT_TRUE(manifest.at("fit").get<bool>());
}
