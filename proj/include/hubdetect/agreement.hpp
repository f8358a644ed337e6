#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "hubset.hpp"

namespace hubdetect {

/// |a ∩ b| / |a ∪ b|; two empty sets agree fully.
inline double jaccard(const HubSet& a, const HubSet& b) {
    if (a.members.empty() && b.members.empty()) return 1.0;
    std::size_t common = 0;
    auto i = a.members.begin();
    auto j = b.members.begin();
    while (i != a.members.end() && j != b.members.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else {
            ++common;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.members.size() + b.members.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

struct AgreementMatrix {
    std::vector<std::string> method_ids;
    std::vector<std::vector<double>> values;
};

inline AgreementMatrix jaccard_matrix(const std::vector<HubSet>& sets) {
    AgreementMatrix m;
    const std::size_t n = sets.size();
    m.values.assign(n, std::vector<double>(n, 1.0));
    for (const auto& s : sets) m.method_ids.push_back(s.method);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            m.values[i][j] = m.values[j][i] = jaccard(sets[i], sets[j]);
        }
    }
    return m;
}

enum class KappaBand { None, Poor, Discrete, Good, Excellent };

inline std::string_view to_string(KappaBand b) {
    switch (b) {
    case KappaBand::None: return "None";
    case KappaBand::Poor: return "Poor";
    case KappaBand::Discrete: return "Discrete";
    case KappaBand::Good: return "Good";
    case KappaBand::Excellent: return "Excellent";
    }
    return "?";
}

/// Agreement bands: <0 None, [0,0.4) Poor, [0.4,0.6) Discrete, [0.6,0.8) Good, [0.8,1] Excellent.
inline KappaBand interpret_kappa(double kappa) {
    if (std::isnan(kappa) || kappa > 1.0) {
        throw ValidationError("kappa must be a number <= 1, got " + std::to_string(kappa));
    }
    if (kappa < 0.0) return KappaBand::None;
    if (kappa < 0.4) return KappaBand::Poor;
    if (kappa < 0.6) return KappaBand::Discrete;
    if (kappa < 0.8) return KappaBand::Good;
    return KappaBand::Excellent;
}

enum class KappaKind { fleiss, cohen };

struct KappaResult {
    KappaKind kind = KappaKind::fleiss;
    double value = 0.0;
    KappaBand band = KappaBand::None;
};

/// Fleiss' kappa over two categories (hub / not hub).
/// `assignments[r][i]` is rater r's verdict on subject i. When chance
/// agreement is already perfect (everyone puts everything in one category)
/// the statistic is 0/0 and is reported as 1.
inline KappaResult fleiss_kappa(const std::vector<std::vector<bool>>& assignments) {
    if (assignments.size() < 2) throw ValidationError("Fleiss kappa needs at least 2 raters");
    const std::size_t subjects = assignments.front().size();
    if (subjects == 0) throw ValidationError("Fleiss kappa needs at least one subject");
    for (const auto& r : assignments) {
        if (r.size() != subjects) throw ValidationError("raters cover different subject counts");
    }
    const double n = static_cast<double>(assignments.size());
    double sum_p = 0.0;
    double hub_total = 0.0;
    for (std::size_t i = 0; i < subjects; ++i) {
        double yes = 0.0;
        for (const auto& r : assignments) yes += r[i] ? 1.0 : 0.0;
        const double no = n - yes;
        sum_p += (yes * yes + no * no - n) / (n * (n - 1.0));
        hub_total += yes;
    }
    const double p_bar = sum_p / static_cast<double>(subjects);
    const double p1 = hub_total / (static_cast<double>(subjects) * n);
    const double pe = p1 * p1 + (1.0 - p1) * (1.0 - p1);
    KappaResult k;
    k.kind = KappaKind::fleiss;
    k.value = pe >= 1.0 ? 1.0 : (p_bar - pe) / (1.0 - pe);
    k.band = interpret_kappa(k.value);
    return k;
}

/// Fleiss' kappa of hub sets over a fixed universe of subjects.
inline KappaResult fleiss_kappa(const std::vector<HubSet>& sets, const std::vector<NodeKey>& universe) {
    std::vector<std::vector<bool>> a;
    a.reserve(sets.size());
    for (const auto& s : sets) {
        std::vector<bool> row(universe.size());
        for (std::size_t i = 0; i < universe.size(); ++i) row[i] = s.contains(universe[i]);
        a.push_back(std::move(row));
    }
    return fleiss_kappa(a);
}

/// Cohen's kappa for two label vectors over any ordered label type.
template <typename Label>
KappaResult cohen_kappa(const std::vector<Label>& r1, const std::vector<Label>& r2) {
    if (r1.size() != r2.size()) throw ValidationError("Cohen kappa: rating vectors differ in length");
    if (r1.empty()) throw ValidationError("Cohen kappa: no items");
    std::map<Label, double> c1, c2;
    double agree = 0.0;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        c1[r1[i]] += 1.0;
        c2[r2[i]] += 1.0;
        if (r1[i] == r2[i]) agree += 1.0;
    }
    const double n = static_cast<double>(r1.size());
    double pe = 0.0;
    for (const auto& [label, count] : c1) {
        if (auto it = c2.find(label); it != c2.end()) pe += (count / n) * (it->second / n);
    }
    const double po = agree / n;
    KappaResult k;
    k.kind = KappaKind::cohen;
    k.value = pe >= 1.0 ? 1.0 : (po - pe) / (1.0 - pe);
    k.band = interpret_kappa(k.value);
    return k;
}

} // namespace hubdetect
