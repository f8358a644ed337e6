#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "errors.hpp"
#include "rng.hpp"

namespace hubdetect {

using degree_t = std::int64_t;

/// Hurwitz zeta sum_{k>=0} (k + q)^-s, for s > 1 and q > 0.
inline double hurwitz_zeta(double s, double q) {
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result r;
    if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS) {
        throw ValidationError("hurwitz zeta undefined for s=" + std::to_string(s) +
                              ", q=" + std::to_string(q));
    }
    return r.val;
}

/// Discrete power law p(x) = x^-alpha / zeta(alpha, xmin) on x >= xmin.
class DiscretePowerLaw {
public:
    DiscretePowerLaw(double alpha, degree_t xmin)
        : alpha_(alpha), xmin_(xmin), norm_(hurwitz_zeta(alpha, static_cast<double>(xmin))) {
        if (!(alpha > 1.0)) throw ValidationError("power-law exponent must exceed 1");
        if (xmin < 1) throw ValidationError("power-law xmin must be >= 1");
        // Dense CCDF table for the bulk of the mass; the far tail is searched
        // on demand.
        table_.reserve(kTable + 1);
        for (std::size_t i = 0; i <= kTable; ++i) table_.push_back(ccdf_exact(xmin_ + static_cast<degree_t>(i)));
    }

    double alpha() const { return alpha_; }
    degree_t xmin() const { return xmin_; }

    /// P(X >= x).
    double ccdf(degree_t x) const {
        if (x <= xmin_) return 1.0;
        const auto off = static_cast<std::size_t>(x - xmin_);
        if (off < table_.size()) return table_[off];
        return ccdf_exact(x);
    }

    /// P(X <= x).
    double cdf(degree_t x) const { return x < xmin_ ? 0.0 : 1.0 - ccdf(x + 1); }

    /// Inverse-CDF draw: the x with P(X > x) < r <= P(X >= x), r in (0, 1].
    degree_t sample(Rng& rng) const {
        const double r = 1.0 - rng.uniform();
        // table_ is decreasing; find the last x with ccdf(x) >= r
        if (table_.back() < r) {
            auto it = std::partition_point(table_.begin(), table_.end(),
                                           [r](double c) { return c >= r; });
            return xmin_ + static_cast<degree_t>(it - table_.begin()) - 1;
        }
        degree_t lo = xmin_ + static_cast<degree_t>(kTable); // ccdf(lo) >= r
        degree_t hi = lo * 2;
        constexpr degree_t cap = degree_t{1} << 52;
        while (hi < cap && ccdf_exact(hi) >= r) {
            lo = hi;
            hi *= 2;
        }
        if (hi >= cap) return lo;
        while (hi - lo > 1) {
            const degree_t mid = lo + (hi - lo) / 2;
            if (ccdf_exact(mid) >= r) lo = mid;
            else hi = mid;
        }
        return lo;
    }

private:
    static constexpr std::size_t kTable = 4096;

    double ccdf_exact(degree_t x) const {
        return hurwitz_zeta(alpha_, static_cast<double>(x)) / norm_;
    }

    double alpha_;
    degree_t xmin_;
    double norm_;
    std::vector<double> table_;
};

/// Discrete power-law sample of size n (the `powerlaw_sequence` generator).
inline std::vector<degree_t> powerlaw_sequence(double alpha, degree_t xmin, std::size_t n,
                                               std::uint64_t seed) {
    DiscretePowerLaw law(alpha, xmin);
    Rng rng(seed);
    std::vector<degree_t> out(n);
    for (auto& x : out) x = law.sample(rng);
    return out;
}

struct FitResult {
    double alpha = 0.0;
    degree_t xmin = 1;
    double ks_distance = 1.0;
    std::size_t n_tail = 0;
};

/// Largest gap between the tail's empirical CDF and the fitted law's CDF.
/// `tail` must be sorted ascending with every value >= law.xmin().
inline double ks_distance(std::span<const degree_t> tail, const DiscretePowerLaw& law) {
    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < tail.size()) {
        const degree_t x = tail[i];
        std::size_t j = i;
        while (j < tail.size() && tail[j] == x) ++j;
        const double emp = static_cast<double>(j) / n;
        // Between this value and the next observed one the empirical CDF is
        // flat while the model CDF rises, so both integer endpoints are checked.
        d = std::max(d, std::abs(emp - law.cdf(x)));
        if (j < tail.size() && tail[j] - 1 > x) {
            d = std::max(d, std::abs(emp - law.cdf(tail[j] - 1)));
        }
        i = j;
    }
    return d;
}

namespace detail {

inline double mle_alpha(std::span<const degree_t> tail, degree_t xmin) {
    double sum_log = 0.0;
    for (auto x : tail) sum_log += std::log(static_cast<double>(x));
    const double n = static_cast<double>(tail.size());
    const double q = static_cast<double>(xmin);
    auto neg_loglik = [&](double a) { return n * std::log(hurwitz_zeta(a, q)) + a * sum_log; };
    auto [a, f] = boost::math::tools::brent_find_minima(neg_loglik, 1.0 + 1e-9, 50.0, 48);
    (void)f;
    return a;
}

inline std::vector<degree_t> positive_sorted(std::span<const degree_t> degseq) {
    std::vector<degree_t> v;
    v.reserve(degseq.size());
    for (auto x : degseq) {
        if (x < 0) throw ValidationError("degree sequence contains a negative value");
        if (x > 0) v.push_back(x);
    }
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace detail

/// Discrete maximum-likelihood power-law fit. Every distinct positive value
/// except the largest is tried as xmin; the one minimising the KS distance
/// wins (ties go to the smaller xmin). Zeros are ignored.
inline FitResult fit_powerlaw(std::span<const degree_t> degseq) {
    const auto data = detail::positive_sorted(degseq);
    if (data.size() < 10) {
        throw InsufficientDataError("power-law fit needs at least 10 positive values, got " +
                                    std::to_string(data.size()));
    }
    if (data.front() == data.back()) {
        throw InsufficientDataError("power-law fit undefined for a constant sequence");
    }
    std::vector<degree_t> candidates(data.begin(), data.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.pop_back();

    FitResult best;
    best.ks_distance = std::numeric_limits<double>::infinity();
    for (degree_t xmin : candidates) {
        auto first = std::lower_bound(data.begin(), data.end(), xmin);
        std::span<const degree_t> tail(&*first, static_cast<std::size_t>(data.end() - first));
        const double alpha = detail::mle_alpha(tail, xmin);
        const double d = ks_distance(tail, DiscretePowerLaw(alpha, xmin));
        if (d < best.ks_distance) best = FitResult{alpha, xmin, d, tail.size()};
    }
    return best;
}

struct GofResult {
    double p_value = 0.0;
    double observed_ks = 0.0;
    std::size_t n_bootstrap = 0;
    std::uint64_t seed = 0;
    double alpha_level = 0.01;
};

/// Semi-parametric bootstrap goodness-of-fit test. Each replicate draws every
/// sample from the fitted law with probability n_tail / n and otherwise
/// resamples the observed values below xmin, then refits. p is the share of
/// replicates whose KS distance is at least the observed one. Replicate i uses
/// the stream Rng::stream(seed, i), so the result does not depend on
/// evaluation order. A replicate that cannot be refit (constant draw) counts
/// as a perfect fit.
inline GofResult gof_pvalue(std::span<const degree_t> degseq, const FitResult& fit,
                            std::size_t n_bootstrap, std::uint64_t seed,
                            double alpha_level = 0.01) {
    if (n_bootstrap < 100) throw ValidationError("n_bootstrap must be >= 100");
    const auto data = detail::positive_sorted(degseq);
    std::vector<degree_t> below;
    for (auto x : data) {
        if (x < fit.xmin) below.push_back(x);
    }
    const std::size_t n = data.size();
    const double p_tail = static_cast<double>(n - below.size()) / static_cast<double>(n);
    const DiscretePowerLaw law(fit.alpha, fit.xmin);

    std::size_t at_least = 0;
    std::vector<degree_t> synth(n);
    for (std::size_t rep = 0; rep < n_bootstrap; ++rep) {
        Rng rng = Rng::stream(seed, rep);
        for (auto& x : synth) {
            if (below.empty() || rng.uniform() < p_tail) {
                x = law.sample(rng);
            } else {
                x = below[rng.below(below.size())];
            }
        }
        double ks = 0.0;
        try {
            ks = fit_powerlaw(synth).ks_distance;
        } catch (const InsufficientDataError&) {
            ks = 0.0;
        }
        if (ks >= fit.ks_distance) ++at_least;
    }
    GofResult r;
    r.p_value = static_cast<double>(at_least) / static_cast<double>(n_bootstrap);
    r.observed_ks = fit.ks_distance;
    r.n_bootstrap = n_bootstrap;
    r.seed = seed;
    r.alpha_level = alpha_level;
    return r;
}

enum class ScaleFreeVerdict { consistent, rejected };

inline std::string_view to_string(ScaleFreeVerdict v) {
    return v == ScaleFreeVerdict::consistent ? "consistent" : "rejected";
}

/// Standard reading: p below the significance level rejects the power law.
inline ScaleFreeVerdict scale_free_verdict(const GofResult& gof, double alpha_level = 0.01) {
    return gof.p_value < alpha_level ? ScaleFreeVerdict::rejected : ScaleFreeVerdict::consistent;
}

/// Opposite reading, where p above the level is taken as "not scale-free".
/// Reported next to the standard verdict; never used for decisions.
inline ScaleFreeVerdict inverted_verdict(const GofResult& gof, double alpha_level = 0.01) {
    return gof.p_value > alpha_level ? ScaleFreeVerdict::rejected : ScaleFreeVerdict::consistent;
}

struct CcdfPoint {
    degree_t x;
    double empirical; // P(X >= x) over all positive values
    double fitted;    // fitted tail CCDF scaled by n_tail / n; NaN below xmin
};

inline std::vector<CcdfPoint> ccdf_table(std::span<const degree_t> degseq, const FitResult& fit) {
    const auto data = detail::positive_sorted(degseq);
    std::vector<CcdfPoint> out;
    if (data.empty()) return out;
    const double n = static_cast<double>(data.size());
    const DiscretePowerLaw law(fit.alpha, fit.xmin);
    const double tail_share = static_cast<double>(fit.n_tail) / n;
    for (std::size_t i = 0; i < data.size();) {
        std::size_t j = i;
        while (j < data.size() && data[j] == data[i]) ++j;
        const double fitted = data[i] >= fit.xmin ? tail_share * law.ccdf(data[i])
                                                  : std::numeric_limits<double>::quiet_NaN();
        out.push_back({data[i], static_cast<double>(data.size() - i) / n, fitted});
        i = j;
    }
    return out;
}

} // namespace hubdetect
