#include <gtest/gtest.h>

#include "hubdetect/evaluation.hpp"
#include "hubdetect/io.hpp"
#include "hubdetect/rng.hpp"

using namespace hubdetect;

namespace {

const char* kLabels = R"({"s/A": "hub", "s/B": "infrastructural", "s/C": "none", "s/D": "unlabeled"})";

HubSet hs(const std::string& method, std::initializer_list<const char*> nodes) {
    HubSet h = make_hubset(method);
    for (const char* n : nodes) h.members.push_back({"s", n});
    h.normalize();
    return h;
}

} // namespace

TEST(Labels, ObjectFormat) {
    const auto gt = parse_labels(kLabels);
    EXPECT_EQ(gt.size(), 4u);
    EXPECT_EQ(gt.find({"s", "A"}), Label::hub);
    EXPECT_EQ(gt.find({"s", "B"}), Label::infrastructural);
    EXPECT_EQ(gt.find({"s", "Z"}), std::nullopt);
    EXPECT_EQ(gt.count(Label::none), 1u);
    EXPECT_EQ(parse_labels(R"({"s/a": "hub"})").find({"s", "a"}), Label::hub);
}

TEST(Labels, ServiceNamesMayContainSlashes) {
    const auto gt = parse_labels(R"({"shop/api/v2": "hub"})");
    EXPECT_EQ(gt.find({"shop", "api/v2"}), Label::hub);
}

TEST(Labels, ArrayFormatAndJsonRoundTrip) {
    const auto gt = parse_labels(
        R"([{"system": "s", "service": "A", "label": "hub"}, {"system": "t", "service": "A", "label": "none"}])");
    EXPECT_EQ(gt.find({"s", "A"}), Label::hub);
    EXPECT_EQ(gt.find({"t", "A"}), Label::none);
    const auto again = parse_labels(labels_to_json(gt).dump());
    EXPECT_EQ(again.labels(), gt.labels());
}

TEST(Labels, Errors) {
    EXPECT_THROW(parse_labels(R"({"s/a": "hub", "s/a": "none"})"), ValidationError);
    EXPECT_THROW(parse_labels(
                     R"([{"system": "s", "service": "a", "label": "hub"}, {"system": "s", "service": "a", "label": "hub"}])"),
                 ValidationError);
    EXPECT_THROW(parse_labels(R"({"s/a": "maybe"})"), ValidationError);
    EXPECT_THROW(parse_labels(R"({"nosystem": "hub"})"), ParseError);
    EXPECT_THROW(parse_labels(R"("hub")"), ParseError);
    EXPECT_THROW(parse_labels("{"), ParseError);
    EXPECT_THROW(parse_labels(R"([{"system": "s", "label": "hub"}])"), ParseError);
}

TEST(Precision, ThreeWayExample) {
    const auto gt = parse_labels(kLabels);
    const auto set = hs("Avg_in", {"A", "B", "C"});
    EXPECT_DOUBLE_EQ(*precision(set, gt, IhMode::tp), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*precision(set, gt, IhMode::ignore), 1.0 / 2.0);
    EXPECT_DOUBLE_EQ(*precision(set, gt, IhMode::fp), 1.0 / 3.0);
    const auto r = evaluate(set, gt);
    EXPECT_EQ(r.method, "Avg_in");
    EXPECT_EQ(r.n_detected, 3u);
    EXPECT_EQ(r.get(IhMode::ignore), 0.5);
}

TEST(Precision, OnlyInfrastructuralSelected) {
    const auto gt = parse_labels(kLabels);
    const auto set = hs("CM_in", {"B"});
    EXPECT_EQ(precision(set, gt, IhMode::ignore), std::nullopt);
    EXPECT_EQ(precision(set, gt, IhMode::tp), 1.0);
    EXPECT_EQ(precision(set, gt, IhMode::fp), 0.0);
}

TEST(Precision, EmptySetUndefinedEverywhere) {
    const auto gt = parse_labels(kLabels);
    for (auto m : kIhModes) EXPECT_EQ(precision(hs("ER_in", {}), gt, m), std::nullopt);
}

TEST(Precision, UnlabeledMemberIsAnError) {
    const auto gt = parse_labels(kLabels);
    EXPECT_THROW(precision(hs("ER_in", {"A", "D"}), gt, IhMode::tp), ValidationError);
    EXPECT_THROW(precision(hs("ER_in", {"Q"}), gt, IhMode::fp), ValidationError);
}

TEST(Precision, IhModeOrderingOnRandomLabelings) {
    Rng rng(4);
    for (int t = 0; t < 300; ++t) {
        GroundTruth gt;
        HubSet set = make_hubset("Avg_out");
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            const NodeKey k{"s", "n" + std::to_string(i)};
            gt.add(k, static_cast<Label>(rng.below(3)));
            if (rng.bernoulli(0.5)) set.members.push_back(k);
        }
        set.normalize();
        const auto fp = precision(set, gt, IhMode::fp);
        const auto ig = precision(set, gt, IhMode::ignore);
        const auto tp = precision(set, gt, IhMode::tp);
        if (!fp) {
            EXPECT_TRUE(set.members.empty());
            continue;
        }
        EXPECT_LE(*fp, *tp);
        EXPECT_GE(*fp, 0.0);
        EXPECT_LE(*tp, 1.0);
        if (ig) {
            EXPECT_LE(*fp, *ig);
            EXPECT_LE(*ig, *tp);
        }
    }
}

TEST(Evaluate, RegistryOrder) {
    const auto gt = parse_labels(kLabels);
    const std::vector<HubSet> sets{hs("Arcan_abs", {"A"}), hs("Avg_in", {"C"}), hs("Cl.&Hub", {}),
                                   hs("ER_in", {"B"})};
    const auto reports = evaluate_all(sets, gt);
    ASSERT_EQ(reports.size(), 4u);
    EXPECT_EQ(reports[0].method, "Avg_in");
    EXPECT_EQ(reports[1].method, "ER_in");
    EXPECT_EQ(reports[2].method, "Cl.&Hub");
    EXPECT_EQ(reports[3].method, "Arcan_abs");
}

TEST(PrecisionTable, DashesForUndefinedAndRoundTrip) {
    const auto gt = parse_labels(kLabels);
    const auto reports = evaluate_all({hs("Avg_in", {"A", "B", "C"}), hs("CM_in", {"B"}), hs("ER_in", {})}, gt);
    const std::vector<IhMode> modes(std::begin(kIhModes), std::end(kIhModes));
    const auto tsv = io::precision_tsv(reports, modes);
    EXPECT_EQ(tsv, "method\tn_detected\tih_tp\tih_ignored\tih_fp\n"
                   "Avg_in\t3\t0.667\t0.500\t0.333\n"
                   "CM_in\t1\t1.000\t-\t0.000\n"
                   "ER_in\t0\t-\t-\t-\n");
    const auto back = io::parse_precision_tsv(tsv);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(io::precision_tsv(back, modes), tsv);
    EXPECT_EQ(back[1].precision_ih_ignored, std::nullopt);
    EXPECT_NEAR(*back[0].precision_ih_tp, 2.0 / 3.0, 5e-4);
}

TEST(PrecisionTable, ColumnSubset) {
    const auto gt = parse_labels(kLabels);
    const auto reports = evaluate_all({hs("Avg_in", {"A", "C"})}, gt);
    const auto tsv = io::precision_tsv(reports, {IhMode::tp});
    EXPECT_EQ(tsv, "method\tn_detected\tih_tp\nAvg_in\t2\t0.500\n");
    const auto back = io::parse_precision_tsv(tsv);
    EXPECT_EQ(back[0].precision_ih_fp, std::nullopt);
    EXPECT_THROW(io::parse_precision_tsv(""), ParseError);
    EXPECT_THROW(io::parse_precision_tsv("method\tn_detected\tih_tp\nX\t1\n"), ParseError);
}

TEST(IhModes, Names) {
    EXPECT_EQ(parse_ih_mode("tp"), IhMode::tp);
    EXPECT_EQ(parse_ih_mode("ignored"), IhMode::ignore);
    EXPECT_EQ(parse_ih_mode("fp"), IhMode::fp);
    EXPECT_THROW(parse_ih_mode("maybe"), ValidationError);
}
