#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "sdg.hpp"

namespace hubdetect {

/// Corpus-wide node identity.
struct NodeKey {
    std::string system;
    std::string node;

    auto operator<=>(const NodeKey&) const = default;
    bool operator==(const NodeKey&) const = default;

    std::string str() const { return system + "/" + node; }
};

enum class Family { average, loubar, mdl_cm, mdl_er, strength, arcan };

struct MethodInfo {
    std::string_view id;   // display id, e.g. "Cl.&Eigenvector"
    std::string_view slug; // file-name-safe id
    Direction direction;
    Family family;
    std::optional<MetricId> centrality; // strength methods only
};

/// The 19 detectors, grouped by the connections they consider (incoming,
/// outgoing, all) in reporting order.
inline constexpr MethodInfo kMethods[] = {
    {"Avg_in", "Avg_in", Direction::in, Family::average, std::nullopt},
    {"Loubar_in", "Loubar_in", Direction::in, Family::loubar, std::nullopt},
    {"CM_in", "CM_in", Direction::in, Family::mdl_cm, std::nullopt},
    {"ER_in", "ER_in", Direction::in, Family::mdl_er, std::nullopt},
    {"Cl.&In-degree", "Cl_In-degree", Direction::in, Family::strength, MetricId::in_degree_c},
    {"Cl.&Eigenvector", "Cl_Eigenvector", Direction::in, Family::strength, MetricId::eigenvector},
    {"Cl.&Authority", "Cl_Authority", Direction::in, Family::strength, MetricId::authority_score},
    {"Avg_out", "Avg_out", Direction::out, Family::average, std::nullopt},
    {"Loubar_out", "Loubar_out", Direction::out, Family::loubar, std::nullopt},
    {"CM_out", "CM_out", Direction::out, Family::mdl_cm, std::nullopt},
    {"ER_out", "ER_out", Direction::out, Family::mdl_er, std::nullopt},
    {"Cl.&Out-degree", "Cl_Out-degree", Direction::out, Family::strength, MetricId::out_degree_c},
    {"Cl.&Hub", "Cl_Hub", Direction::out, Family::strength, MetricId::hub_score},
    {"Arcan_abs", "Arcan_abs", Direction::all, Family::arcan, std::nullopt},
    {"Arcan_norm", "Arcan_norm", Direction::all, Family::arcan, std::nullopt},
    {"Cl.&Degree", "Cl_Degree", Direction::all, Family::strength, MetricId::degree_c},
    {"Cl.&Betweenness", "Cl_Betweenness", Direction::all, Family::strength, MetricId::betweenness},
    {"Cl.&Closeness", "Cl_Closeness", Direction::all, Family::strength, MetricId::closeness},
    {"Cl.&PageRank", "Cl_PageRank", Direction::all, Family::strength, MetricId::pagerank},
};

inline const MethodInfo* find_method(std::string_view id_or_slug) {
    for (const auto& m : kMethods) {
        if (m.id == id_or_slug || m.slug == id_or_slug) return &m;
    }
    return nullptr;
}

inline const MethodInfo& method_info(std::string_view id_or_slug) {
    if (const auto* m = find_method(id_or_slug)) return *m;
    throw ValidationError("unknown method id '" + std::string(id_or_slug) + "'");
}

inline std::size_t method_rank(std::string_view id) {
    for (std::size_t i = 0; i < std::size(kMethods); ++i) {
        if (kMethods[i].id == id) return i;
    }
    return std::size(kMethods);
}

inline const MethodInfo& strength_method_for(MetricId centrality) {
    for (const auto& m : kMethods) {
        if (m.centrality == centrality) return m;
    }
    throw ValidationError("metric '" + std::string(to_string(centrality)) +
                          "' is not a strength centrality");
}

/// Output of one detector over a corpus.
struct HubSet {
    std::string method;
    Direction direction = Direction::all;
    std::vector<NodeKey> members; // sorted, unique
    std::map<NodeKey, double> scores;

    bool contains(const NodeKey& k) const {
        return std::binary_search(members.begin(), members.end(), k);
    }
    std::size_t size() const { return members.size(); }

    void normalize() {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
};

/// Empty hub set tagged with a registry method; the direction comes from
/// the registry.
inline HubSet make_hubset(std::string_view method_id) {
    const auto& info = method_info(method_id);
    return HubSet{std::string(info.id), info.direction, {}, {}};
}

/// Every (system, node) pair of the corpus, sorted.
inline std::vector<NodeKey> corpus_universe(const Corpus& corpus) {
    std::vector<NodeKey> u;
    u.reserve(corpus.total_nodes());
    for (const auto& g : corpus) {
        for (const auto& id : g.node_ids()) u.push_back({g.system_id(), id});
    }
    std::sort(u.begin(), u.end());
    return u;
}

} // namespace hubdetect
