#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "powerlaw.hpp"
#include "rng.hpp"
#include "sdg.hpp"

namespace hubdetect::gen {

/// Node ids "v00", "v01", ... zero-padded so lexicographic order is numeric order.
inline std::vector<std::string> numbered_nodes(std::size_t n, std::string_view prefix = "v") {
    const std::size_t width = std::to_string(n == 0 ? 0 : n - 1).size();
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string num = std::to_string(i);
        ids.push_back(std::string(prefix) + std::string(width - num.size(), '0') + num);
    }
    return ids;
}

/// Star with node "center" and leaves "leaf*". Edges point center -> leaf
/// unless `inward`.
inline Sdg star(std::size_t n_leaves, bool inward = false, std::string system_id = "star") {
    auto nodes = numbered_nodes(n_leaves, "leaf");
    nodes.push_back("center");
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < n_leaves; ++i) {
        if (inward) edges.emplace_back(nodes[i], "center");
        else edges.emplace_back("center", nodes[i]);
    }
    return Sdg(std::move(system_id), std::move(nodes), edges);
}

/// Directed cycle v0 -> v1 -> ... -> v(n-1) -> v0.
inline Sdg cycle(std::size_t n, std::string system_id = "cycle") {
    if (n < 2) throw ValidationError("cycle needs n >= 2");
    std::vector<Sdg::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Sdg::from_indices(std::move(system_id), numbered_nodes(n), std::move(edges));
}

/// Complete directed graph (both directions between every pair).
inline Sdg complete(std::size_t n, std::string system_id = "complete") {
    std::vector<Sdg::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) edges.emplace_back(i, j);
        }
    }
    return Sdg::from_indices(std::move(system_id), numbered_nodes(n), std::move(edges));
}

/// Directed G(n, p): each ordered pair (i, j), i != j, independently with probability p.
inline Sdg er_random(std::size_t n, double p, std::uint64_t seed,
                     std::string system_id = "er") {
    if (n < 2) throw ValidationError("er_random needs n >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("er_random needs 0 <= p <= 1");
    Rng rng(seed);
    std::vector<Sdg::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && rng.bernoulli(p)) edges.emplace_back(i, j);
        }
    }
    return Sdg::from_indices(std::move(system_id), numbered_nodes(n), std::move(edges));
}

struct PlantedHubs {
    Sdg graph;
    std::vector<std::string> hubs; // sorted ids of the planted nodes
};

struct PlantedParams {
    std::size_t n = 30;
    std::size_t n_hubs = 1;
    double background_mean = 2.0; // expected direction-degree of ordinary nodes
    std::size_t hub_degree = 0;   // 0 selects max(5 * background_mean, (n - 1) / 2)
    Direction direction = Direction::out;
};

/// Background directed ER graph whose first `n_hubs` nodes (after a seeded
/// shuffle of ids) get `hub_degree` edges in `direction`, to uniformly chosen
/// partners. Hubs carry no background edges in that direction.
inline PlantedHubs planted_hubs(const PlantedParams& prm, std::uint64_t seed,
                                std::string system_id = "planted") {
    if (prm.n < 3) throw ValidationError("planted_hubs needs n >= 3");
    if (prm.n_hubs >= prm.n) throw ValidationError("planted_hubs needs n_hubs < n");
    if (prm.direction == Direction::all) throw ValidationError("planted_hubs direction must be in or out");
    if (prm.background_mean < 0.0 || prm.background_mean > static_cast<double>(prm.n - 1)) {
        throw ValidationError("planted_hubs background_mean out of range");
    }
    const std::size_t n = prm.n;
    std::size_t hub_degree = prm.hub_degree;
    if (hub_degree == 0) {
        hub_degree = static_cast<std::size_t>(
            std::max(std::ceil(5.0 * prm.background_mean), std::floor((n - 1) / 2.0)));
    }
    if (hub_degree > n - 1) throw ValidationError("planted_hubs hub_degree exceeds n - 1");

    Rng rng(seed);
    std::vector<node_index> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<bool> is_hub(n, false);
    for (std::size_t i = 0; i < prm.n_hubs; ++i) is_hub[order[i]] = true;

    const bool out = prm.direction == Direction::out;
    const double p = prm.background_mean / static_cast<double>(n - 1);
    std::vector<Sdg::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_hub[i]) {
            // partial Fisher-Yates over the other nodes
            std::vector<node_index> others;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) others.push_back(j);
            }
            for (std::size_t k = 0; k < hub_degree; ++k) {
                std::swap(others[k], others[k + rng.below(others.size() - k)]);
                edges.push_back(out ? Sdg::Edge{i, others[k]} : Sdg::Edge{others[k], i});
            }
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || is_hub[j]) continue;
            if (rng.bernoulli(p)) edges.push_back(out ? Sdg::Edge{i, j} : Sdg::Edge{j, i});
        }
    }
    auto ids = numbered_nodes(n);
    std::vector<std::string> hubs;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_hub[i]) hubs.push_back(ids[i]);
    }
    return {Sdg::from_indices(std::move(system_id), std::move(ids), std::move(edges)),
            std::move(hubs)};
}

} // namespace hubdetect::gen
