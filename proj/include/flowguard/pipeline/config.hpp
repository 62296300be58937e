#pragma once

// RunConfig: everything that determines a pipeline run. Stored as JSON:
//
//   {
//     "dataset": "flows.csv",            // required; relative to the config file
//     "schema": "schema.json",           // optional; default NetFlow columns
//     "features": ["L4_DST_PORT", ...],  // optional override of schema features
//     "target": "binary_label",          // or "attack_category"
//     "seed": 7,
//     "split": {"test_fraction": 0.2, "seed": 7},   // split seed defaults to seed
//     "smote": {"enabled": true, "k": 5},
//     "eda": {"enabled": true, "bins": 30},
//     "drop_correlated": true, "correlation_threshold": 0.9,
//     "scale": false,
//     "policy": "strict",                // CSV parsing and unseen categories
//     "models": ["nb", "ada", "rf", "knn"],
//     "hyperparameters": {"knn_k": 5, "forest": {...}, "boost": {...}, "tree": {...}},
//     "workspace": "workspace"           // output stage root
//   }

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowguard/eda.hpp"
#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/hash.hpp"
#include "flowguard/learners/model.hpp"
#include "flowguard/sampling.hpp"

namespace flowguard::pipeline {

struct RunConfig {
    std::filesystem::path dataset;
    std::optional<std::filesystem::path> schema_path;
    std::vector<std::string> features;  // empty = schema's own list
    LabelSemantics target = LabelSemantics::binary_label;
    std::uint64_t seed = 7;
    double test_fraction = default_test_fraction;
    std::optional<std::uint64_t> split_seed;
    bool smote = true;
    std::size_t smote_k = default_smote_k;
    bool eda = true;
    std::size_t bins = default_histogram_bins;
    bool drop_correlated = true;
    double correlation_threshold = default_correlation_threshold;
    bool scale = false;
    Policy policy = Policy::strict;
    std::vector<Algorithm> models = table_algorithms();
    Hyperparameters hyperparameters;
    std::filesystem::path workspace = "workspace";

    std::uint64_t effective_split_seed() const { return split_seed.value_or(seed); }

    FlowSchema schema() const {
        FlowSchema s = schema_path ? load_schema(*schema_path) : default_schema();
        if (!features.empty()) {
            s.feature_columns = features;
            std::vector<std::string> enc;
            for (const auto& f : features)
                if (s.is_encoded(f) || (s.find(f) && s.column(f).kind == ColumnKind::text) || !schema_path)
                    enc.push_back(f);
            s.encoded_columns = enc;
        }
        s.validate();
        return s;
    }

    void validate() const {
        if (models.empty()) throw ConfigError("no models enabled");
        if (!(test_fraction >= 0 && test_fraction < 1)) throw ConfigError("split.test_fraction must lie in [0, 1)");
        if (!(correlation_threshold > 0 && correlation_threshold <= 1))
            throw ConfigError("correlation_threshold must lie in (0, 1]");
        if (smote_k == 0) throw ConfigError("smote.k must be positive");
        if (bins == 0) throw ConfigError("eda.bins must be positive");
        if (dataset.empty()) throw ConfigError("no dataset given");
    }
};

/// Parameters that identify a run. Paths are reduced to file names so the
/// same data and settings hash identically from any directory.
inline nlohmann::json canonical_config(const RunConfig& c) {
    std::vector<std::string> models;
    for (auto a : c.models) models.push_back(short_name(a));
    return {{"dataset", c.dataset.filename().string()},
            {"schema", c.schema_path ? schema_to_json(load_schema(*c.schema_path)) : schema_to_json(default_schema())},
            {"features", c.features},
            {"target", to_string(c.target)},
            {"seed", c.seed},
            {"split", {{"test_fraction", c.test_fraction}, {"seed", c.effective_split_seed()}}},
            {"smote", {{"enabled", c.smote}, {"k", c.smote_k}}},
            {"eda", {{"enabled", c.eda}, {"bins", c.bins}}},
            {"drop_correlated", c.drop_correlated},
            {"correlation_threshold", c.correlation_threshold},
            {"scale", c.scale},
            {"policy", to_string(c.policy)},
            {"models", models},
            {"hyperparameters", hyperparameters_to_json(c.hyperparameters)}};
}

inline std::string config_hash(const RunConfig& c, const std::string& input_hash) {
    return sha256_hex(canonical_config(c).dump() + "\n" + input_hash);
}

inline std::vector<Algorithm> parse_model_list(const std::vector<std::string>& names) {
    std::vector<Algorithm> out;
    for (const auto& n : names) {
        if (n == "all") {
            for (auto a : table_algorithms())
                if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
            continue;
        }
        auto a = algorithm_from_string(n);
        if (!a) throw ConfigError("unknown model '" + n + "' (expected nb, knn, rf, ada, tree or all)");
        if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
    }
    return out;
}

/// Relative paths resolve against `base` (the config file's directory).
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base.empty() ? path : base / path;
    };
    try {
        RunConfig c;
        if (j.contains("dataset")) c.dataset = resolve(j["dataset"].get<std::string>());
        if (j.contains("schema") && !j["schema"].is_null()) c.schema_path = resolve(j["schema"].get<std::string>());
        c.features = j.value("features", std::vector<std::string>{});
        if (j.contains("target")) c.target = label_semantics_from_string(j["target"].get<std::string>());
        c.seed = j.value("seed", c.seed);
        if (j.contains("split")) {
            const auto& s = j["split"];
            c.test_fraction = s.value("test_fraction", c.test_fraction);
            if (s.contains("seed")) c.split_seed = s["seed"].get<std::uint64_t>();
        }
        if (j.contains("smote")) {
            const auto& s = j["smote"];
            if (s.is_boolean()) {
                c.smote = s.get<bool>();
            } else {
                c.smote = s.value("enabled", c.smote);
                c.smote_k = s.value("k", c.smote_k);
            }
        }
        if (j.contains("eda")) {
            const auto& e = j["eda"];
            if (e.is_boolean()) {
                c.eda = e.get<bool>();
            } else {
                c.eda = e.value("enabled", c.eda);
                c.bins = e.value("bins", c.bins);
            }
        }
        c.drop_correlated = j.value("drop_correlated", c.drop_correlated);
        c.correlation_threshold = j.value("correlation_threshold", c.correlation_threshold);
        c.scale = j.value("scale", c.scale);
        if (j.contains("policy")) c.policy = j["policy"].get<std::string>() == "lenient" ? Policy::lenient : Policy::strict;
        if (j.contains("models")) {
            const auto& m = j["models"];
            if (m.is_object()) {
                std::vector<std::string> on;
                for (auto it = m.begin(); it != m.end(); ++it)
                    if (it.value().get<bool>()) on.push_back(it.key());
                // Object form lists flags; keep table order regardless of key order.
                auto parsed = parse_model_list(on);
                c.models.clear();
                for (auto a : table_algorithms())
                    if (std::find(parsed.begin(), parsed.end(), a) != parsed.end()) c.models.push_back(a);
                for (auto a : parsed)
                    if (std::find(c.models.begin(), c.models.end(), a) == c.models.end()) c.models.push_back(a);
            } else {
                c.models = parse_model_list(m.get<std::vector<std::string>>());
            }
        }
        if (j.contains("hyperparameters")) c.hyperparameters = hyperparameters_from_json(j["hyperparameters"]);
        if (j.contains("workspace")) c.workspace = resolve(j["workspace"].get<std::string>());
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run config: ") + e.what());
    }
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

}  // namespace flowguard::pipeline
