#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "hubset.hpp"
#include "sdg.hpp"

namespace hubdetect {

/// Manual-validation verdict. `unlabeled` marks services nobody inspected;
/// they are legal in a label file but cannot be scored.
enum class Label { hub, infrastructural, none, unlabeled };

inline std::string_view to_string(Label l) {
    switch (l) {
    case Label::hub: return "hub";
    case Label::infrastructural: return "infrastructural";
    case Label::none: return "none";
    case Label::unlabeled: return "unlabeled";
    }
    return "?";
}

inline Label parse_label(std::string_view s) {
    if (s == "hub") return Label::hub;
    if (s == "infrastructural") return Label::infrastructural;
    if (s == "none") return Label::none;
    if (s == "unlabeled") return Label::unlabeled;
    throw ValidationError("unknown label '" + std::string(s) + "'");
}

class GroundTruth {
public:
    void add(NodeKey key, Label label) {
        const std::string shown = key.str();
        if (!labels_.emplace(std::move(key), label).second) {
            throw ValidationError("duplicate label for '" + shown + "'");
        }
    }

    std::optional<Label> find(const NodeKey& key) const {
        auto it = labels_.find(key);
        if (it == labels_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t count(Label l) const {
        return static_cast<std::size_t>(std::count_if(
            labels_.begin(), labels_.end(), [l](const auto& kv) { return kv.second == l; }));
    }

    std::size_t size() const { return labels_.size(); }
    const std::map<NodeKey, Label>& labels() const { return labels_; }

private:
    std::map<NodeKey, Label> labels_;
};

/// Accepts either an array of {system, service, label} objects or an object
/// mapping "system/service" to a label.
inline GroundTruth parse_labels(std::string_view text, const std::string& origin = "<labels>") {
    // nlohmann keeps the last of duplicate object keys; catch them while parsing
    std::set<std::string> top_keys;
    std::string duplicate;
    nlohmann::json::parser_callback_t cb = [&](int depth, nlohmann::json::parse_event_t ev,
                                               nlohmann::json& parsed) {
        if (ev == nlohmann::json::parse_event_t::key && depth == 1 && parsed.is_string()) {
            if (!top_keys.insert(parsed.get<std::string>()).second && duplicate.empty()) {
                duplicate = parsed.get<std::string>();
            }
        }
        return true;
    };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text, cb);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!duplicate.empty()) throw ValidationError(origin + ": duplicate label for '" + duplicate + "'");

    GroundTruth gt;
    try {
        if (j.is_array()) {
            for (const auto& e : j) {
                gt.add({e.at("system").get<std::string>(), e.at("service").get<std::string>()},
                       parse_label(e.at("label").get<std::string>()));
            }
        } else if (j.is_object()) {
            for (const auto& [k, v] : j.items()) {
                const auto slash = k.find('/');
                if (slash == std::string::npos) {
                    throw ParseError(origin + ": key '" + k + "' is not 'system/service'");
                }
                gt.add({k.substr(0, slash), k.substr(slash + 1)}, parse_label(v.get<std::string>()));
            }
        } else {
            throw ParseError(origin + ": expected an array or object of labels");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return gt;
}

inline GroundTruth load_labels(const std::filesystem::path& path) {
    return parse_labels(read_file(path), path.string());
}

inline nlohmann::json labels_to_json(const GroundTruth& gt) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, l] : gt.labels()) {
        out.push_back({{"system", k.system}, {"service", k.node}, {"label", to_string(l)}});
    }
    return out;
}

/// How infrastructural hubs count when scoring a detection.
enum class IhMode { tp, ignore, fp };

inline constexpr IhMode kIhModes[] = {IhMode::tp, IhMode::ignore, IhMode::fp};

inline std::string_view to_string(IhMode m) {
    switch (m) {
    case IhMode::tp: return "tp";
    case IhMode::ignore: return "ignore";
    case IhMode::fp: return "fp";
    }
    return "?";
}

inline IhMode parse_ih_mode(std::string_view s) {
    if (s == "tp") return IhMode::tp;
    if (s == "ignore" || s == "ignored") return IhMode::ignore;
    if (s == "fp") return IhMode::fp;
    throw ValidationError("unknown ih mode '" + std::string(s) + "'");
}

/// Precision of a hub set, or nullopt when the denominator is zero.
inline std::optional<double> precision(const HubSet& hs, const GroundTruth& gt, IhMode mode) {
    std::size_t hubs = 0, infra = 0;
    for (const auto& m : hs.members) {
        const auto l = gt.find(m);
        if (!l || *l == Label::unlabeled) {
            throw ValidationError(hs.method + " selected unlabeled service '" + m.str() + "'");
        }
        if (*l == Label::hub) ++hubs;
        else if (*l == Label::infrastructural) ++infra;
    }
    const std::size_t n = hs.members.size();
    switch (mode) {
    case IhMode::tp:
        if (n == 0) return std::nullopt;
        return static_cast<double>(hubs + infra) / static_cast<double>(n);
    case IhMode::ignore:
        if (n == infra) return std::nullopt;
        return static_cast<double>(hubs) / static_cast<double>(n - infra);
    case IhMode::fp:
        if (n == 0) return std::nullopt;
        return static_cast<double>(hubs) / static_cast<double>(n);
    }
    return std::nullopt;
}

struct PrecisionReport {
    std::string method;
    std::size_t n_detected = 0;
    std::optional<double> precision_ih_tp;
    std::optional<double> precision_ih_ignored;
    std::optional<double> precision_ih_fp;

    std::optional<double> get(IhMode m) const {
        switch (m) {
        case IhMode::tp: return precision_ih_tp;
        case IhMode::ignore: return precision_ih_ignored;
        case IhMode::fp: return precision_ih_fp;
        }
        return std::nullopt;
    }
};

inline PrecisionReport evaluate(const HubSet& hs, const GroundTruth& gt) {
    return {hs.method, hs.size(), precision(hs, gt, IhMode::tp), precision(hs, gt, IhMode::ignore),
            precision(hs, gt, IhMode::fp)};
}

/// One report per hub set, in registry order (unknown methods last, stable).
inline std::vector<PrecisionReport> evaluate_all(const std::vector<HubSet>& sets, const GroundTruth& gt) {
    std::vector<const HubSet*> ordered;
    for (const auto& s : sets) ordered.push_back(&s);
    std::stable_sort(ordered.begin(), ordered.end(), [](const HubSet* a, const HubSet* b) {
        return method_rank(a->method) < method_rank(b->method);
    });
    std::vector<PrecisionReport> out;
    for (const auto* s : ordered) out.push_back(evaluate(*s, gt));
    return out;
}

} // namespace hubdetect
