#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hubset.hpp"
#include "sdg.hpp"

namespace hubdetect {

/// Minimum-description-length hub detection.
///
/// A sender transmits one side (out or in) of every node's adjacency. With
/// the direction-degrees sorted so that k_1 >= ... >= k_N, M = sum k_i,
/// S = N - 1 possible partners per node and a hub set H made of the h
/// highest-degree nodes (M_H = sum of their degrees, M_R = M - M_H), the
/// message is, in bits:
///
///   h                          log2(N + 1)
///   which nodes are hubs       log2 C(N, h)
///   each hub i in H            log2 N + log2 C(S, k_i)      (degree, partners)
///   non-hub edge count         log2((N - h) S + 1)
///
/// followed by the non-hub adjacency, which depends on the encoding:
///
///   ER   one uniform block     log2 C((N - h) S, M_R)
///   CM   degree composition    log2 C(M_R + N - h - 1, N - h - 1)
///        plus partners         sum_{i not in H} log2 C(S, k_i)
///
/// h* is the smallest h attaining the minimum over h = 0..N. Nothing in the
/// model is tunable. Moving a node into H pays for its identity and degree
/// explicitly; under ER this buys a cheaper (denser-is-rarer) block for the
/// rest, under CM only a shorter degree composition, so CM is the more
/// conservative of the two.
enum class Encoding { ER, CM };

inline std::string_view to_string(Encoding e) { return e == Encoding::ER ? "ER" : "CM"; }

inline Encoding parse_encoding(std::string_view s) {
    if (s == "ER" || s == "er") return Encoding::ER;
    if (s == "CM" || s == "cm") return Encoding::CM;
    throw ValidationError("unknown encoding '" + std::string(s) + "'");
}

namespace detail {

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

/// log2 of the binomial coefficient; 0 for the empty choice C(n, 0).
inline double log2_choose(double n, double k) {
    if (k < 0.0 || k > n) return std::numeric_limits<double>::infinity();
    if (k == 0.0 || k == n) return 0.0;
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / kLn2;
}

/// Weak compositions of m into p parts: C(m + p - 1, p - 1); one way to split 0 into 0 parts.
inline double log2_compositions(double m, double p) {
    if (p == 0.0) return m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return log2_choose(m + p - 1.0, p - 1.0);
}

} // namespace detail

/// Description length for h = 0..N given direction-degrees sorted descending.
inline std::vector<double> description_lengths(std::span<const std::size_t> sorted_desc,
                                               Encoding enc) {
    using detail::log2_choose;
    const std::size_t n = sorted_desc.size();
    const double N = static_cast<double>(n);
    const double S = N - 1.0;
    const double M = static_cast<double>(
        std::accumulate(sorted_desc.begin(), sorted_desc.end(), std::size_t{0}));

    // suffix sums of per-node partner costs, for CM
    std::vector<double> partners(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        partners[i] = partners[i + 1] + log2_choose(S, static_cast<double>(sorted_desc[i]));
    }

    std::vector<double> dl(n + 1);
    double hub_cost = 0.0;
    double m_hub = 0.0;
    for (std::size_t h = 0; h <= n; ++h) {
        if (h > 0) {
            const double k = static_cast<double>(sorted_desc[h - 1]);
            hub_cost += std::log2(N) + log2_choose(S, k);
            m_hub += k;
        }
        const double rest = N - static_cast<double>(h);
        const double m_rest = M - m_hub;
        double bits = std::log2(N + 1.0) + log2_choose(N, static_cast<double>(h)) + hub_cost +
                      std::log2(rest * S + 1.0);
        if (enc == Encoding::ER) {
            bits += log2_choose(rest * S, m_rest);
        } else {
            bits += detail::log2_compositions(m_rest, rest) + partners[h];
        }
        dl[h] = bits;
    }
    return dl;
}

namespace detail {

/// Node indices ordered by direction-degree descending, then node id ascending.
inline std::vector<node_index> degree_order(const Sdg& g, Direction d) {
    std::vector<node_index> order(g.size());
    std::iota(order.begin(), order.end(), node_index{0});
    // node indices already follow node-id order
    std::stable_sort(order.begin(), order.end(), [&](node_index a, node_index b) {
        return g.degree(a, d) > g.degree(b, d);
    });
    return order;
}

} // namespace detail

/// (h, bits) for h = 0..N.
inline std::vector<std::pair<std::size_t, double>> dl_curve(const Sdg& g, Encoding enc,
                                                             Direction d) {
    if (d == Direction::all) throw ValidationError("MDL direction must be in or out");
    const auto order = detail::degree_order(g, d);
    std::vector<std::size_t> ks(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) ks[i] = g.degree(order[i], d);
    const auto dl = description_lengths(ks, enc);
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(dl.size());
    for (std::size_t h = 0; h < dl.size(); ++h) out.emplace_back(h, dl[h]);
    return out;
}

struct MdlResult {
    Encoding encoding = Encoding::ER;
    Direction direction = Direction::in;
    std::size_t h_star = 0;
    std::vector<std::pair<std::size_t, double>> dl_curve;
    std::vector<std::string> members; // node ids, in degree order
};

inline MdlResult mdl_hubs(const Sdg& g, Encoding enc, Direction d) {
    MdlResult r;
    r.encoding = enc;
    r.direction = d;
    r.dl_curve = dl_curve(g, enc, d);
    for (const auto& [h, bits] : r.dl_curve) {
        if (bits < r.dl_curve[r.h_star].second) r.h_star = h;
    }
    const auto order = detail::degree_order(g, d);
    for (std::size_t i = 0; i < r.h_star; ++i) r.members.push_back(g.node_id(order[i]));
    return r;
}

inline std::string mdl_method_id(Encoding enc, Direction d) {
    return std::string(to_string(enc)) + (d == Direction::in ? "_in" : "_out");
}

/// Per-system MDL detection pooled over the corpus; scores are direction-degrees.
inline HubSet mdl_hubs(const Corpus& corpus, Encoding enc, Direction d) {
    HubSet hs = make_hubset(mdl_method_id(enc, d));
    for (const auto& g : corpus) {
        const auto r = mdl_hubs(g, enc, d);
        for (const auto& id : r.members) {
            NodeKey key{g.system_id(), id};
            hs.scores[key] = static_cast<double>(g.degree(*g.index_of(id), d));
            hs.members.push_back(std::move(key));
        }
    }
    hs.normalize();
    return hs;
}

} // namespace hubdetect
