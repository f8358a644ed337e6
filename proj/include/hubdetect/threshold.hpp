#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hubset.hpp"
#include "metrics.hpp"
#include "sdg.hpp"

namespace hubdetect {

/// q-quantile by linear interpolation between order statistics at the
/// zero-based position q * (n - 1). `sorted` must be ascending and non-empty.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of an empty sequence");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

namespace detail {

inline std::string method_name(std::string_view family, Direction d) {
    return std::string(family) + (d == Direction::in ? "_in" : "_out");
}

inline void require_in_or_out(Direction d) {
    if (d == Direction::all) throw ValidationError("detector direction must be in or out");
}

} // namespace detail

/// Nodes whose direction-degree strictly exceeds E / N.
inline HubSet avg_hubs(const Sdg& g, Direction d) {
    detail::require_in_or_out(d);
    HubSet hs = make_hubset(detail::method_name("Avg", d));
    const double mean = summarize(g).avg_degree;
    for (node_index v = 0; v < g.size(); ++v) {
        const auto k = static_cast<double>(g.degree(v, d));
        if (k > mean) {
            NodeKey key{g.system_id(), g.node_id(v)};
            hs.scores[key] = k;
            hs.members.push_back(std::move(key));
        }
    }
    hs.normalize();
    return hs;
}

/// Loubar level q = 1 - <k> / max(k).
inline double loubar_level(const Sdg& g, Direction d) {
    std::size_t max_k = 0;
    for (node_index v = 0; v < g.size(); ++v) max_k = std::max(max_k, g.degree(v, d));
    if (max_k == 0) {
        throw ValidationError("Loubar undefined on '" + g.system_id() +
                              "': all " + std::string(to_string(d)) + "-degrees are zero");
    }
    return 1.0 - summarize(g).avg_degree / static_cast<double>(max_k);
}

/// Nodes whose direction-degree strictly exceeds the Loubar-level quantile
/// of the graph's direction-degree sequence.
inline HubSet loubar_hubs(const Sdg& g, Direction d) {
    detail::require_in_or_out(d);
    const double q = loubar_level(g, d);
    std::vector<double> ks(g.size());
    for (node_index v = 0; v < g.size(); ++v) ks[v] = static_cast<double>(g.degree(v, d));
    const double cut = quantile(ks, q);
    HubSet hs = make_hubset(detail::method_name("Loubar", d));
    for (node_index v = 0; v < g.size(); ++v) {
        if (ks[v] > cut) {
            NodeKey key{g.system_id(), g.node_id(v)};
            hs.scores[key] = ks[v];
            hs.members.push_back(std::move(key));
        }
    }
    hs.normalize();
    return hs;
}

namespace detail {

inline void pool_into(HubSet& into, HubSet part) {
    into.members.insert(into.members.end(), part.members.begin(), part.members.end());
    into.scores.insert(part.scores.begin(), part.scores.end());
}

inline bool has_degree(const Sdg& g, Direction d) {
    for (node_index v = 0; v < g.size(); ++v) {
        if (g.degree(v, d) > 0) return true;
    }
    return false;
}

} // namespace detail

/// Per-system Avg detection pooled over the corpus.
inline HubSet avg_hubs(const Corpus& corpus, Direction d) {
    HubSet hs = make_hubset(detail::method_name("Avg", d));
    for (const auto& g : corpus) detail::pool_into(hs, avg_hubs(g, d));
    hs.normalize();
    return hs;
}

/// Per-system Loubar detection pooled over the corpus. Systems without any
/// edge in the direction cannot hold a hub and are skipped.
inline HubSet loubar_hubs(const Corpus& corpus, Direction d) {
    HubSet hs = make_hubset(detail::method_name("Loubar", d));
    for (const auto& g : corpus) {
        if (detail::has_degree(g, d)) detail::pool_into(hs, loubar_hubs(g, d));
    }
    hs.normalize();
    return hs;
}

struct ThresholdResult {
    MetricId metric = MetricId::degree;
    double crop_quantile = 0.5;
    double threshold_quantile = 0.75;
    double threshold = 0.0;
    std::size_t cropped_count = 0; // values discarded as low tail
};

/// Quartile threshold on a low-tail-cropped distribution. Values at or below
/// the crop_quantile quantile are discarded (crop_quantile = 0 keeps
/// everything), then the threshold is the threshold_quantile quantile of what
/// remains.
inline ThresholdResult arcan_threshold(std::vector<double> values, double crop_quantile,
                                       double threshold_quantile = 0.75,
                                       MetricId metric = MetricId::degree) {
    if (values.empty()) throw ValidationError("arcan_threshold needs values");
    if (!(crop_quantile >= 0.0 && crop_quantile < threshold_quantile && threshold_quantile <= 1.0)) {
        throw ValidationError("arcan_threshold needs 0 <= crop < threshold quantile <= 1");
    }
    std::sort(values.begin(), values.end());
    std::vector<double> kept;
    if (crop_quantile == 0.0) {
        kept = values;
    } else {
        const double cut = quantile_sorted(values, crop_quantile);
        kept.assign(std::upper_bound(values.begin(), values.end(), cut), values.end());
    }
    if (kept.empty()) throw ValidationError("arcan_threshold: nothing left after cropping");
    ThresholdResult r;
    r.metric = metric;
    r.crop_quantile = crop_quantile;
    r.threshold_quantile = threshold_quantile;
    r.threshold = quantile_sorted(kept, threshold_quantile);
    r.cropped_count = values.size() - kept.size();
    return r;
}

enum class ArcanMode { abs, norm };

inline MetricId arcan_metric(ArcanMode mode) {
    return mode == ArcanMode::abs ? MetricId::degree : MetricId::degree_c;
}

/// Total degree (abs) or total degree centrality (norm) of every corpus node.
inline std::vector<double> arcan_pooled_values(const Corpus& corpus, ArcanMode mode) {
    std::vector<double> out;
    out.reserve(corpus.total_nodes());
    for (const auto& g : corpus) {
        if (mode == ArcanMode::norm && g.size() < 2) {
            out.push_back(0.0); // isolated single-service system
            continue;
        }
        const auto mv = compute_metric(g, arcan_metric(mode));
        out.insert(out.end(), mv.values.begin(), mv.values.end());
    }
    return out;
}

inline ThresholdResult arcan_threshold(const Corpus& corpus, ArcanMode mode, double crop_quantile,
                                       double threshold_quantile = 0.75) {
    return arcan_threshold(arcan_pooled_values(corpus, mode), crop_quantile, threshold_quantile,
                           arcan_metric(mode));
}

/// Nodes whose metric lies strictly above the threshold.
inline HubSet arcan_classify(const Corpus& corpus, ArcanMode mode, const ThresholdResult& th) {
    if (th.metric != arcan_metric(mode)) {
        throw ValidationError("threshold was derived from '" + std::string(to_string(th.metric)) +
                              "' but mode needs '" + std::string(to_string(arcan_metric(mode))) + "'");
    }
    HubSet hs = make_hubset(mode == ArcanMode::abs ? "Arcan_abs" : "Arcan_norm");
    for (const auto& g : corpus) {
        if (mode == ArcanMode::norm && g.size() < 2) continue;
        const auto mv = compute_metric(g, th.metric);
        for (node_index v = 0; v < g.size(); ++v) {
            if (mv[v] > th.threshold) {
                NodeKey key{g.system_id(), g.node_id(v)};
                hs.scores[key] = mv[v];
                hs.members.push_back(std::move(key));
            }
        }
    }
    hs.normalize();
    return hs;
}

} // namespace hubdetect
