#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hubset.hpp"
#include "metrics.hpp"
#include "sdg.hpp"

namespace hubdetect {

/// Hub strength of one service: centrality - clustering.
struct StrengthRecord {
    std::string system;
    std::string node;
    MetricId centrality_metric = MetricId::degree_c;
    double centrality = 0.0; // clamped to [0, 1]
    double clustering = 0.0;
    double strength = 0.0;
};

inline bool is_strength_centrality(MetricId m) {
    switch (m) {
    case MetricId::degree_c:
    case MetricId::in_degree_c:
    case MetricId::out_degree_c:
    case MetricId::betweenness:
    case MetricId::closeness:
    case MetricId::eigenvector:
    case MetricId::pagerank:
    case MetricId::hub_score:
    case MetricId::authority_score: return true;
    default: return false;
    }
}

/// One record per corpus node, sorted by strength descending, then (system, node).
///
/// Total degree centrality reaches 2 on reciprocal edges; it is clamped to 1
/// here so strength stays within [-1, 1].
inline std::vector<StrengthRecord> strength_table(const Corpus& corpus, MetricId centrality,
                                                  const MetricOptions& opt = {}) {
    if (!is_strength_centrality(centrality)) {
        throw ValidationError("'" + std::string(to_string(centrality)) +
                              "' is not a centrality usable for hub strength");
    }
    std::vector<StrengthRecord> out;
    out.reserve(corpus.total_nodes());
    for (const auto& g : corpus) {
        // a single-service system has no possible connections: centrality 0
        std::vector<double> cent = g.size() < 2 ? std::vector<double>(g.size(), 0.0)
                                                : compute_metric(g, centrality, opt).values;
        const auto clus = clustering(g, opt.clustering_mode);
        for (node_index v = 0; v < g.size(); ++v) {
            StrengthRecord r;
            r.system = g.system_id();
            r.node = g.node_id(v);
            r.centrality_metric = centrality;
            r.centrality = std::clamp(cent[v], 0.0, 1.0);
            r.clustering = clus[v];
            r.strength = r.centrality - r.clustering;
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const StrengthRecord& a, const StrengthRecord& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        if (a.system != b.system) return a.system < b.system;
        return a.node < b.node;
    });
    return out;
}

/// Records with strength >= tau.
inline HubSet strength_classify(const std::vector<StrengthRecord>& records, double tau,
                                MetricId centrality) {
    if (!(tau >= -1.0 && tau <= 1.0)) throw ValidationError("tau must lie in [-1, 1]");
    HubSet hs = make_hubset(strength_method_for(centrality).id);
    for (const auto& r : records) {
        if (r.centrality_metric != centrality) {
            throw ValidationError("strength record for '" + r.system + "/" + r.node +
                                  "' uses a different centrality");
        }
        if (r.strength >= tau) {
            NodeKey key{r.system, r.node};
            hs.scores[key] = r.strength;
            hs.members.push_back(std::move(key));
        }
    }
    hs.normalize();
    return hs;
}

inline HubSet strength_classify(const std::vector<StrengthRecord>& records, double tau) {
    if (records.empty()) throw ValidationError("no strength records to classify");
    return strength_classify(records, tau, records.front().centrality_metric);
}

} // namespace hubdetect
