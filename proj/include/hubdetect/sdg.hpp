#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace hubdetect {

using node_index = std::size_t;

/// Which connections of a node are considered. `all` is in + out.
enum class Direction { in, out, all };

inline std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::in: return "in";
    case Direction::out: return "out";
    case Direction::all: return "all";
    }
    return "?";
}

inline Direction parse_direction(std::string_view s) {
    if (s == "in") return Direction::in;
    if (s == "out") return Direction::out;
    if (s == "all" || s == "total") return Direction::all;
    throw ValidationError("unknown direction '" + std::string(s) + "'");
}

/// Service dependency graph: a simple directed graph over named services.
///
/// Nodes are kept in lexicographic order of their ids, so node indices are a
/// canonical function of the node set. Parallel edges collapse; self-loops,
/// dangling endpoints and empty node sets are rejected at construction.
/// Immutable once built.
class Sdg {
public:
    using Edge = std::pair<node_index, node_index>;

    Sdg(std::string system_id, std::vector<std::string> nodes,
        const std::vector<std::pair<std::string, std::string>>& edges)
        : system_id_(std::move(system_id)), nodes_(std::move(nodes)) {
        std::sort(nodes_.begin(), nodes_.end());
        nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
        if (nodes_.empty()) {
            throw ValidationError("graph '" + system_id_ + "' has no nodes");
        }
        std::vector<Edge> idx;
        idx.reserve(edges.size());
        for (const auto& [s, t] : edges) {
            if (s == t) {
                throw ValidationError("graph '" + system_id_ + "': self-loop on '" + s + "'");
            }
            const auto si = index_of(s);
            const auto ti = index_of(t);
            if (!si || !ti) {
                throw ValidationError("graph '" + system_id_ + "': edge (" + s + ", " + t +
                                      ") references an undeclared node");
            }
            idx.emplace_back(*si, *ti);
        }
        build(std::move(idx));
    }

    /// Builds from node ids and index pairs; used by the generators.
    static Sdg from_indices(std::string system_id, std::vector<std::string> nodes,
                            std::vector<Edge> edges) {
        std::vector<std::pair<std::string, std::string>> named;
        named.reserve(edges.size());
        for (auto [s, t] : edges) {
            named.emplace_back(nodes.at(s), nodes.at(t));
        }
        return Sdg(std::move(system_id), std::move(nodes), named);
    }

    const std::string& system_id() const { return system_id_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<std::string>& node_ids() const { return nodes_; }
    const std::string& node_id(node_index i) const { return nodes_.at(i); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const node_index> successors(node_index v) const {
        return {out_adj_.data() + out_off_[v], out_adj_.data() + out_off_[v + 1]};
    }
    std::span<const node_index> predecessors(node_index v) const {
        return {in_adj_.data() + in_off_[v], in_adj_.data() + in_off_[v + 1]};
    }
    std::size_t out_degree(node_index v) const { return out_off_[v + 1] - out_off_[v]; }
    std::size_t in_degree(node_index v) const { return in_off_[v + 1] - in_off_[v]; }
    std::size_t degree(node_index v, Direction d) const {
        switch (d) {
        case Direction::in: return in_degree(v);
        case Direction::out: return out_degree(v);
        case Direction::all: return in_degree(v) + out_degree(v);
        }
        return 0;
    }

    bool has_edge(node_index s, node_index t) const {
        auto succ = successors(s);
        return std::binary_search(succ.begin(), succ.end(), t);
    }

    std::optional<node_index> index_of(std::string_view id) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
        if (it == nodes_.end() || *it != id) return std::nullopt;
        return static_cast<node_index>(it - nodes_.begin());
    }

    /// Same graph with every edge reversed.
    Sdg reversed() const {
        std::vector<Edge> rev;
        rev.reserve(edges_.size());
        for (auto [s, t] : edges_) rev.emplace_back(t, s);
        return from_indices(system_id_, nodes_, std::move(rev));
    }

    bool operator==(const Sdg& o) const {
        return system_id_ == o.system_id_ && nodes_ == o.nodes_ && edges_ == o.edges_;
    }

private:
    void build(std::vector<Edge> idx) {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        edges_ = std::move(idx);

        const std::size_t n = nodes_.size();
        out_off_.assign(n + 1, 0);
        in_off_.assign(n + 1, 0);
        for (auto [s, t] : edges_) {
            ++out_off_[s + 1];
            ++in_off_[t + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            out_off_[i + 1] += out_off_[i];
            in_off_[i + 1] += in_off_[i];
        }
        out_adj_.resize(edges_.size());
        in_adj_.resize(edges_.size());
        std::vector<std::size_t> out_fill(out_off_.begin(), out_off_.end() - 1);
        std::vector<std::size_t> in_fill(in_off_.begin(), in_off_.end() - 1);
        // edges_ is sorted by (source, target), so successor lists come out sorted
        for (auto [s, t] : edges_) {
            out_adj_[out_fill[s]++] = t;
            in_adj_[in_fill[t]++] = s;
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::sort(in_adj_.begin() + in_off_[v], in_adj_.begin() + in_off_[v + 1]);
        }
    }

    std::string system_id_;
    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_off_, in_off_;
    std::vector<node_index> out_adj_, in_adj_;
};

struct GraphSummary {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    double avg_degree = 0.0; // E / N
    std::size_t max_in_degree = 0;
    std::size_t max_out_degree = 0;
    std::size_t max_total_degree = 0;
};

inline GraphSummary summarize(const Sdg& g) {
    GraphSummary s;
    s.n_nodes = g.size();
    s.n_edges = g.num_edges();
    s.avg_degree = static_cast<double>(s.n_edges) / static_cast<double>(s.n_nodes);
    for (node_index v = 0; v < g.size(); ++v) {
        s.max_in_degree = std::max(s.max_in_degree, g.in_degree(v));
        s.max_out_degree = std::max(s.max_out_degree, g.out_degree(v));
        s.max_total_degree = std::max(s.max_total_degree, g.degree(v, Direction::all));
    }
    return s;
}

/// Ordered collection of graphs with unique system ids.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Sdg> graphs) {
        for (auto& g : graphs) add(std::move(g));
    }

    void add(Sdg g) {
        for (const auto& existing : graphs_) {
            if (existing.system_id() == g.system_id()) {
                throw ValidationError("duplicate system id '" + g.system_id() + "' in corpus");
            }
        }
        graphs_.push_back(std::move(g));
    }

    const std::vector<Sdg>& graphs() const { return graphs_; }
    std::size_t size() const { return graphs_.size(); }
    bool empty() const { return graphs_.empty(); }
    auto begin() const { return graphs_.begin(); }
    auto end() const { return graphs_.end(); }

    std::size_t total_nodes() const {
        std::size_t n = 0;
        for (const auto& g : graphs_) n += g.size();
        return n;
    }

    const Sdg* find(std::string_view system_id) const {
        for (const auto& g : graphs_) {
            if (g.system_id() == system_id) return &g;
        }
        return nullptr;
    }

private:
    std::vector<Sdg> graphs_;
};

enum class SdgFormat { json, edgelist };

inline SdgFormat format_from_path(const std::filesystem::path& p) {
    return p.extension() == ".json" ? SdgFormat::json : SdgFormat::edgelist;
}

inline Sdg parse_sdg_json(std::string_view text, const std::string& origin = "<json>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("system") || !j.contains("nodes") ||
            !j.contains("edges")) {
            throw ParseError(origin + ": expected object with system, nodes, edges");
        }
        auto nodes = j.at("nodes").get<std::vector<std::string>>();
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError(origin + ": edge must be a [source, target] pair");
            }
            edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
        return Sdg(j.at("system").get<std::string>(), std::move(nodes), edges);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

/// Edge list: "source target" per line, '#' starts a comment. A line with a
/// single token declares an isolated node.
inline Sdg parse_sdg_edgelist(std::string_view text, std::string system_id) {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(std::move(t));
        if (tok.empty()) continue;
        if (tok.size() > 2) {
            throw ParseError(system_id + ":" + std::to_string(lineno) +
                             ": expected 'source target'");
        }
        nodes.push_back(tok[0]);
        if (tok.size() == 2) {
            nodes.push_back(tok[1]);
            edges.emplace_back(tok[0], tok[1]);
        }
    }
    return Sdg(std::move(system_id), std::move(nodes), edges);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Sdg load_sdg(const std::filesystem::path& path, SdgFormat format) {
    const std::string text = read_file(path);
    if (format == SdgFormat::json) return parse_sdg_json(text, path.string());
    return parse_sdg_edgelist(text, path.stem().string());
}

inline Sdg load_sdg(const std::filesystem::path& path) {
    return load_sdg(path, format_from_path(path));
}

inline nlohmann::json to_json(const Sdg& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [s, t] : g.edges()) edges.push_back({g.node_id(s), g.node_id(t)});
    return {{"system", g.system_id()}, {"nodes", g.node_ids()}, {"edges", std::move(edges)}};
}

inline std::string to_edgelist(const Sdg& g) {
    std::ostringstream out;
    std::vector<bool> touched(g.size(), false);
    for (auto [s, t] : g.edges()) {
        out << g.node_id(s) << ' ' << g.node_id(t) << '\n';
        touched[s] = touched[t] = true;
    }
    for (node_index v = 0; v < g.size(); ++v) {
        if (!touched[v]) out << g.node_id(v) << '\n';
    }
    return out.str();
}

inline void save_sdg(const Sdg& g, const std::filesystem::path& path, SdgFormat format) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    if (format == SdgFormat::json) {
        out << to_json(g).dump(2) << '\n';
    } else {
        out << to_edgelist(g);
    }
}

/// Loads every *.json / *.txt / *.edges / *.el file of a directory, in
/// filename order, or a single file.
inline Corpus load_corpus(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    Corpus corpus;
    if (fs::is_regular_file(path)) {
        corpus.add(load_sdg(path));
        return corpus;
    }
    if (!fs::is_directory(path)) throw ParseError("corpus path '" + path.string() + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".json" || ext == ".txt" || ext == ".edges" || ext == ".el") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) corpus.add(load_sdg(f));
    if (corpus.empty()) throw ValidationError("no graph files in '" + path.string() + "'");
    return corpus;
}

} // namespace hubdetect
