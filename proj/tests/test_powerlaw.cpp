#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "hubdetect/io.hpp"
#include "hubdetect/powerlaw.hpp"
#include "oracles.hpp"

using namespace hubdetect;

namespace {

std::vector<degree_t> geometric_sample(double p, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<degree_t> out(n);
    for (auto& x : out) {
        x = 1;
        while (!rng.bernoulli(p)) ++x;
    }
    return out;
}

// KS distance of the tail against the fitted law, using the oracle zeta.
double oracle_ks(std::vector<degree_t> data, const FitResult& fit) {
    std::sort(data.begin(), data.end());
    data.erase(data.begin(), std::lower_bound(data.begin(), data.end(), fit.xmin));
    const double n = static_cast<double>(data.size());
    const double z = oracle::hurwitz_zeta(fit.alpha, static_cast<double>(fit.xmin));
    double d = 0.0;
    for (std::size_t i = 0; i < data.size();) {
        std::size_t j = i;
        while (j < data.size() && data[j] == data[i]) ++j;
        const double at = oracle::hurwitz_zeta(fit.alpha, static_cast<double>(data[i])) / z;
        const double after = oracle::hurwitz_zeta(fit.alpha, static_cast<double>(data[i] + 1)) / z;
        d = std::max({d, std::abs((n - static_cast<double>(i)) / n - at),
                      std::abs((n - static_cast<double>(j)) / n - after)});
        i = j;
    }
    return d;
}

} // namespace

TEST(PowerLaw, ZetaMatchesDirectSummation) {
    for (double s : {1.5, 2.0, 2.5, 3.7}) {
        for (double q : {1.0, 2.0, 7.0, 50.0}) {
            EXPECT_NEAR(hurwitz_zeta(s, q), oracle::hurwitz_zeta(s, q), 1e-9 * hurwitz_zeta(s, q));
        }
    }
}

TEST(PowerLaw, RecoversExponentOfSyntheticSample) {
    const auto seq = powerlaw_sequence(2.5, 1, 10000, 1);
    const auto fit = fit_powerlaw(seq);
    EXPECT_GE(fit.alpha, 2.4);
    EXPECT_LE(fit.alpha, 2.6);
    EXPECT_GE(fit.xmin, 1);
    EXPECT_GT(fit.alpha, 1.0);
}

TEST(PowerLaw, MleMatchesGridSearchAndKsMatchesOracle) {
    const auto seq = powerlaw_sequence(2.2, 2, 2000, 5);
    const auto fit = fit_powerlaw(seq);
    std::vector<std::int64_t> tail;
    for (auto x : seq) {
        if (x >= fit.xmin) tail.push_back(x);
    }
    EXPECT_EQ(tail.size(), fit.n_tail);
    EXPECT_NEAR(fit.alpha, oracle::mle_alpha_grid(tail, fit.xmin), 2e-4);
    EXPECT_NEAR(fit.ks_distance, oracle_ks(seq, fit), 1e-9);
}

TEST(PowerLaw, XminMinimisesKsOverCandidates) {
    const auto seq = powerlaw_sequence(2.5, 3, 1500, 8);
    const auto fit = fit_powerlaw(seq);
    std::vector<degree_t> sorted(seq.begin(), seq.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    sorted.pop_back();
    for (auto xmin : sorted) {
        std::vector<degree_t> tail;
        for (auto x : seq) {
            if (x >= xmin) tail.push_back(x);
        }
        const double a = detail::mle_alpha(tail, xmin);
        EXPECT_LE(fit.ks_distance, ks_distance(tail, DiscretePowerLaw(a, xmin)) + 1e-15);
    }
}

TEST(PowerLaw, GeometricSampleFitsWorse) {
    const auto pl = fit_powerlaw(powerlaw_sequence(2.5, 1, 10000, 1));
    const auto geo = fit_powerlaw(geometric_sample(0.3, 10000, 1));
    EXPECT_GT(geo.ks_distance, pl.ks_distance);
    EXPECT_GT(geo.ks_distance, 2 * pl.ks_distance);
}

TEST(PowerLaw, DegenerateInputs) {
    EXPECT_THROW(fit_powerlaw(std::vector<degree_t>(50, 3)), InsufficientDataError);
    EXPECT_THROW(fit_powerlaw(std::vector<degree_t>{1, 2, 3, 4, 5, 6, 7, 8, 9}), InsufficientDataError);
    // zeros do not count toward the minimum
    std::vector<degree_t> v{0, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8};
    EXPECT_THROW(fit_powerlaw(v), InsufficientDataError);
    v.push_back(9);
    v.push_back(10);
    EXPECT_NO_THROW(fit_powerlaw(v));
}

TEST(PowerLaw, DuplicatingSamplesKeepsAlphaAndDoublesTail) {
    const auto seq = powerlaw_sequence(2.3, 1, 800, 4);
    auto twice = seq;
    twice.insert(twice.end(), seq.begin(), seq.end());
    const auto a = fit_powerlaw(seq);
    const auto b = fit_powerlaw(twice);
    EXPECT_EQ(a.xmin, b.xmin);
    EXPECT_NEAR(a.alpha, b.alpha, 1e-6);
    EXPECT_EQ(b.n_tail, 2 * a.n_tail);
    EXPECT_NEAR(a.ks_distance, b.ks_distance, 1e-9);
}

TEST(PowerLaw, KsDistanceInUnitInterval) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto fit = fit_powerlaw(geometric_sample(0.1 + 0.02 * static_cast<double>(seed), 200, seed));
        EXPECT_GE(fit.ks_distance, 0.0);
        EXPECT_LE(fit.ks_distance, 1.0);
    }
}

TEST(Gof, PValueIsCountingFractionAndDeterministic) {
    const auto seq = powerlaw_sequence(2.5, 1, 300, 2);
    const auto fit = fit_powerlaw(seq);
    const auto a = gof_pvalue(seq, fit, 100, 42);
    const auto b = gof_pvalue(seq, fit, 100, 42);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.n_bootstrap, 100u);
    EXPECT_EQ(a.seed, 42u);
    EXPECT_EQ(a.observed_ks, fit.ks_distance);
    const double scaled = a.p_value * 100.0;
    EXPECT_EQ(scaled, std::round(scaled));
    EXPECT_GE(a.p_value, 0.0);
    EXPECT_LE(a.p_value, 1.0);
}

TEST(Gof, GeometricDataIsRejected) {
    const auto seq = geometric_sample(0.1, 2000, 3);
    const auto gof = gof_pvalue(seq, fit_powerlaw(seq), 100, 1);
    EXPECT_EQ(scale_free_verdict(gof), ScaleFreeVerdict::rejected);
}

TEST(Gof, TooFewReplicates) {
    const auto seq = powerlaw_sequence(2.5, 1, 100, 2);
    EXPECT_THROW(gof_pvalue(seq, fit_powerlaw(seq), 99, 1), ValidationError);
}

TEST(Verdict, StandardAndInvertedReadings) {
    GofResult g;
    g.p_value = 0.5;
    EXPECT_EQ(scale_free_verdict(g, 0.01), ScaleFreeVerdict::consistent);
    g.p_value = 0.005;
    EXPECT_EQ(scale_free_verdict(g, 0.01), ScaleFreeVerdict::rejected);
    g.p_value = 0.035;
    EXPECT_EQ(scale_free_verdict(g, 0.01), ScaleFreeVerdict::consistent);
    EXPECT_EQ(inverted_verdict(g, 0.01), ScaleFreeVerdict::rejected);
}

TEST(Ccdf, EmpiricalAndFittedColumns) {
    const auto seq = powerlaw_sequence(2.5, 2, 500, 6);
    const auto fit = fit_powerlaw(seq);
    const auto pts = ccdf_table(seq, fit);
    ASSERT_FALSE(pts.empty());
    EXPECT_DOUBLE_EQ(pts.front().empirical, 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LT(pts[i].empirical, pts[i - 1].empirical);
        EXPECT_GT(pts[i].x, pts[i - 1].x);
    }
    for (const auto& p : pts) {
        if (p.x < fit.xmin) EXPECT_TRUE(std::isnan(p.fitted));
        else EXPECT_LE(p.fitted, 1.0);
    }
    const auto csv = io::ccdf_csv(pts);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,empirical_ccdf,fitted_ccdf");
}

TEST(FitReport, CarriesBothVerdicts) {
    const auto seq = powerlaw_sequence(2.5, 1, 200, 2);
    const auto fit = fit_powerlaw(seq);
    const auto gof = gof_pvalue(seq, fit, 100, 9);
    const auto j = io::fit_report_entry("degree", fit, gof);
    for (const char* k : {"metric", "alpha", "xmin", "ks", "p", "n_bootstrap", "seed", "verdict",
                          "verdict_inverted_reading"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j.at("seed"), 9);
    EXPECT_NE(j.at("verdict"), j.at("verdict_inverted_reading"));
}
