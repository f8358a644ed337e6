#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "sdg.hpp"

namespace hubdetect {

enum class MetricId {
    degree,
    in_degree,
    out_degree,
    degree_c,
    in_degree_c,
    out_degree_c,
    betweenness,
    closeness,
    eigenvector,
    pagerank,
    hub_score,
    authority_score,
    clustering,
};

inline constexpr MetricId kAllMetrics[] = {
    MetricId::degree,      MetricId::in_degree,       MetricId::out_degree,
    MetricId::degree_c,    MetricId::in_degree_c,     MetricId::out_degree_c,
    MetricId::betweenness, MetricId::closeness,       MetricId::eigenvector,
    MetricId::pagerank,    MetricId::hub_score,       MetricId::authority_score,
    MetricId::clustering,
};

inline std::string_view to_string(MetricId m) {
    switch (m) {
    case MetricId::degree: return "degree";
    case MetricId::in_degree: return "in_degree";
    case MetricId::out_degree: return "out_degree";
    case MetricId::degree_c: return "degree_c";
    case MetricId::in_degree_c: return "in_degree_c";
    case MetricId::out_degree_c: return "out_degree_c";
    case MetricId::betweenness: return "betweenness";
    case MetricId::closeness: return "closeness";
    case MetricId::eigenvector: return "eigenvector";
    case MetricId::pagerank: return "pagerank";
    case MetricId::hub_score: return "hub_score";
    case MetricId::authority_score: return "authority_score";
    case MetricId::clustering: return "clustering";
    }
    return "?";
}

inline MetricId parse_metric(std::string_view s) {
    for (auto m : kAllMetrics) {
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown metric '" + std::string(s) + "'");
}

/// One value per node of the source graph, in the graph's node order.
struct MetricVector {
    MetricId metric;
    std::vector<std::string> nodes;
    std::vector<double> values;

    double at(std::string_view node) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
        if (it == nodes.end() || *it != node) {
            throw ValidationError("metric " + std::string(to_string(metric)) +
                                  " has no value for node '" + std::string(node) + "'");
        }
        return values[static_cast<std::size_t>(it - nodes.begin())];
    }
    double operator[](node_index i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

namespace detail {

inline MetricVector make_vector(const Sdg& g, MetricId m, std::vector<double> values) {
    return MetricVector{m, g.node_ids(), std::move(values)};
}

inline MetricId degree_metric(Direction d, bool normalized) {
    switch (d) {
    case Direction::in: return normalized ? MetricId::in_degree_c : MetricId::in_degree;
    case Direction::out: return normalized ? MetricId::out_degree_c : MetricId::out_degree;
    case Direction::all: return normalized ? MetricId::degree_c : MetricId::degree;
    }
    return MetricId::degree;
}

} // namespace detail

inline MetricVector degrees(const Sdg& g, Direction d) {
    std::vector<double> v(g.size());
    for (node_index i = 0; i < g.size(); ++i) v[i] = static_cast<double>(g.degree(i, d));
    return detail::make_vector(g, detail::degree_metric(d, false), std::move(v));
}

/// Degree divided by N - 1. The total-direction value can exceed 1 when
/// edges are reciprocal.
inline MetricVector degree_centrality(const Sdg& g, Direction d) {
    if (g.size() < 2) {
        throw ValidationError("degree centrality undefined for single-node graph '" +
                              g.system_id() + "'");
    }
    const double possible = static_cast<double>(g.size() - 1);
    std::vector<double> v(g.size());
    for (node_index i = 0; i < g.size(); ++i) v[i] = static_cast<double>(g.degree(i, d)) / possible;
    return detail::make_vector(g, detail::degree_metric(d, true), std::move(v));
}

/// Directed shortest-path betweenness (Brandes), normalised by (N-1)(N-2).
inline MetricVector betweenness(const Sdg& g) {
    const std::size_t n = g.size();
    std::vector<double> cb(n, 0.0);
    std::vector<double> sigma(n), delta(n);
    std::vector<long> dist(n);
    std::vector<std::vector<node_index>> pred(n);
    std::vector<node_index> stack;
    stack.reserve(n);
    for (node_index s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        for (auto& p : pred) p.clear();
        stack.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        std::queue<node_index> q;
        q.push(s);
        while (!q.empty()) {
            const node_index v = q.front();
            q.pop();
            stack.push_back(v);
            for (node_index w : g.successors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const node_index w = *it;
            for (node_index v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) cb[w] += delta[w];
        }
    }
    if (n > 2) {
        const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
        for (auto& x : cb) x *= scale;
    } else {
        std::fill(cb.begin(), cb.end(), 0.0);
    }
    return detail::make_vector(g, MetricId::betweenness, std::move(cb));
}

/// Closeness over incoming distances with component scaling:
/// (r / (N-1)) * (r / sum_d), where r nodes reach v at total distance sum_d.
inline MetricVector closeness(const Sdg& g) {
    const std::size_t n = g.size();
    std::vector<double> c(n, 0.0);
    std::vector<long> dist(n);
    for (node_index v = 0; v < n; ++v) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[v] = 0;
        std::queue<node_index> q;
        q.push(v);
        long total = 0;
        std::size_t reached = 0;
        while (!q.empty()) {
            const node_index u = q.front();
            q.pop();
            for (node_index w : g.predecessors(u)) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    total += dist[w];
                    ++reached;
                    q.push(w);
                }
            }
        }
        if (reached > 0 && n > 1) {
            const double r = static_cast<double>(reached);
            c[v] = (r / static_cast<double>(n - 1)) * (r / static_cast<double>(total));
        }
    }
    return detail::make_vector(g, MetricId::closeness, std::move(c));
}

/// Eigenvector centrality fed by in-neighbours. Power iteration on A^T + I
/// (the shift keeps periodic graphs from oscillating) with Euclidean
/// normalisation; stops once the L1 change drops below N * tol.
inline MetricVector eigenvector(const Sdg& g, double tol = 1e-6, std::size_t max_iter = 10000) {
    if (!(tol > 0.0)) throw ValidationError("eigenvector tol must be > 0");
    const std::size_t n = g.size();
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), last(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        last = x;
        for (auto [s, t] : g.edges()) x[t] += last[s];
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        double change = 0.0;
        for (node_index i = 0; i < n; ++i) {
            x[i] /= norm;
            change += std::abs(x[i] - last[i]);
        }
        if (change < static_cast<double>(n) * tol) {
            return detail::make_vector(g, MetricId::eigenvector, std::move(x));
        }
    }
    throw ConvergenceError("eigenvector centrality did not converge on '" + g.system_id() +
                           "' within " + std::to_string(max_iter) + " iterations");
}

/// PageRank with uniform teleport and uniform redistribution of dangling mass.
inline MetricVector pagerank(const Sdg& g, double damping = 0.85, double tol = 1e-8,
                             std::size_t max_iter = 1000) {
    if (!(damping > 0.0 && damping < 1.0)) throw ValidationError("damping must lie in (0, 1)");
    const std::size_t n = g.size();
    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, uniform), last(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        last = x;
        double dangling = 0.0;
        for (node_index v = 0; v < n; ++v) {
            if (g.out_degree(v) == 0) dangling += last[v];
        }
        const double base = (damping * dangling + (1.0 - damping)) * uniform;
        std::fill(x.begin(), x.end(), base);
        for (node_index v = 0; v < n; ++v) {
            const auto succ = g.successors(v);
            if (succ.empty()) continue;
            const double share = damping * last[v] / static_cast<double>(succ.size());
            for (node_index w : succ) x[w] += share;
        }
        double err = 0.0;
        for (node_index v = 0; v < n; ++v) err += std::abs(x[v] - last[v]);
        if (err < static_cast<double>(n) * tol) {
            return detail::make_vector(g, MetricId::pagerank, std::move(x));
        }
    }
    throw ConvergenceError("pagerank did not converge on '" + g.system_id() + "' within " +
                           std::to_string(max_iter) + " iterations");
}

struct HitsScores {
    MetricVector hub;
    MetricVector authority;
};

/// HITS by alternating updates a = A^T h, h = A a, each renormalised to sum 1.
/// Converged once the L1 change of the hub vector falls below tol.
inline HitsScores hits(const Sdg& g, double tol = 1e-8, std::size_t max_iter = 1000) {
    if (g.num_edges() == 0) {
        throw ValidationError("HITS undefined on edgeless graph '" + g.system_id() + "'");
    }
    const std::size_t n = g.size();
    std::vector<double> h(n, 1.0 / static_cast<double>(n)), a(n), last(n);
    auto normalize = [](std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        if (s > 0.0) {
            for (double& x : v) x /= s;
        }
    };
    for (std::size_t it = 0; it < max_iter; ++it) {
        last = h;
        std::fill(a.begin(), a.end(), 0.0);
        for (auto [s, t] : g.edges()) a[t] += last[s];
        std::fill(h.begin(), h.end(), 0.0);
        for (auto [s, t] : g.edges()) h[s] += a[t];
        normalize(a);
        normalize(h);
        double err = 0.0;
        for (node_index v = 0; v < n; ++v) err += std::abs(h[v] - last[v]);
        if (err < tol) {
            return {detail::make_vector(g, MetricId::hub_score, h),
                    detail::make_vector(g, MetricId::authority_score, a)};
        }
    }
    throw ConvergenceError("HITS did not converge on '" + g.system_id() + "' within " +
                           std::to_string(max_iter) + " iterations");
}

enum class ClusteringMode { directed, undirected };

/// Clustering coefficient. Directed mode counts every directed triangle
/// through v against the maximum possible given v's total and reciprocal
/// degree: T / (2 * (d_tot (d_tot - 1) - 2 d_recip)). Undirected mode works on
/// the symmetrised graph. Nodes without a triangle get 0.
inline MetricVector clustering(const Sdg& g, ClusteringMode mode = ClusteringMode::directed) {
    const std::size_t n = g.size();
    std::vector<double> c(n, 0.0);
    auto intersect = [](std::span<const node_index> a, std::span<const node_index> b) {
        std::size_t k = 0;
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i < *j) ++i;
            else if (*j < *i) ++j;
            else {
                ++k;
                ++i;
                ++j;
            }
        }
        return k;
    };

    if (mode == ClusteringMode::undirected) {
        std::vector<std::vector<node_index>> nbr(n);
        for (node_index v = 0; v < n; ++v) {
            auto& s = nbr[v];
            s.assign(g.successors(v).begin(), g.successors(v).end());
            s.insert(s.end(), g.predecessors(v).begin(), g.predecessors(v).end());
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        for (node_index v = 0; v < n; ++v) {
            const std::size_t d = nbr[v].size();
            if (d < 2) continue;
            std::size_t links = 0;
            for (node_index u : nbr[v]) links += intersect(nbr[v], nbr[u]);
            // each neighbour pair was counted from both ends
            c[v] = static_cast<double>(links) / static_cast<double>(d * (d - 1));
        }
        return detail::make_vector(g, MetricId::clustering, std::move(c));
    }

    for (node_index i = 0; i < n; ++i) {
        const auto ip = g.predecessors(i);
        const auto is = g.successors(i);
        std::size_t triangles = 0;
        auto count_via = [&](node_index j) {
            const auto jp = g.predecessors(j);
            const auto js = g.successors(j);
            triangles += intersect(ip, jp) + intersect(ip, js) + intersect(is, jp) +
                         intersect(is, js);
        };
        for (node_index j : ip) count_via(j);
        for (node_index j : is) count_via(j);
        if (triangles == 0) continue;
        const double dtot = static_cast<double>(ip.size() + is.size());
        const double drecip = static_cast<double>(intersect(ip, is));
        c[i] = static_cast<double>(triangles) / (2.0 * (dtot * (dtot - 1.0) - 2.0 * drecip));
    }
    return detail::make_vector(g, MetricId::clustering, std::move(c));
}

struct MetricOptions {
    double eigen_tol = 1e-6;
    std::size_t eigen_max_iter = 10000;
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-8;
    std::size_t pagerank_max_iter = 1000;
    double hits_tol = 1e-8;
    std::size_t hits_max_iter = 1000;
    ClusteringMode clustering_mode = ClusteringMode::directed;
};

/// Dispatch by id. HITS on an edgeless graph yields zeros here rather than
/// throwing, so a corpus containing an isolated-node system can still be
/// tabulated.
inline MetricVector compute_metric(const Sdg& g, MetricId m, const MetricOptions& opt = {}) {
    switch (m) {
    case MetricId::degree: return degrees(g, Direction::all);
    case MetricId::in_degree: return degrees(g, Direction::in);
    case MetricId::out_degree: return degrees(g, Direction::out);
    case MetricId::degree_c: return degree_centrality(g, Direction::all);
    case MetricId::in_degree_c: return degree_centrality(g, Direction::in);
    case MetricId::out_degree_c: return degree_centrality(g, Direction::out);
    case MetricId::betweenness: return betweenness(g);
    case MetricId::closeness: return closeness(g);
    case MetricId::eigenvector: return eigenvector(g, opt.eigen_tol, opt.eigen_max_iter);
    case MetricId::pagerank:
        return pagerank(g, opt.pagerank_damping, opt.pagerank_tol, opt.pagerank_max_iter);
    case MetricId::hub_score:
    case MetricId::authority_score: {
        if (g.num_edges() == 0) {
            return detail::make_vector(g, m, std::vector<double>(g.size(), 0.0));
        }
        auto s = hits(g, opt.hits_tol, opt.hits_max_iter);
        return m == MetricId::hub_score ? std::move(s.hub) : std::move(s.authority);
    }
    case MetricId::clustering: return clustering(g, opt.clustering_mode);
    }
    throw ValidationError("unhandled metric");
}

} // namespace hubdetect
