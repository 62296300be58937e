#pragma once

// TrainedModel: one fitted classifier of any family plus the metadata needed
// to score raw records with it, and its versioned JSON file format:
//
//   {"version": 1, "algorithm": "...", "classes": [...], "feature_names": [...],
//    "target": "binary_label" | "attack_category", "class_names": [...],
//    "meta": {"seed", "rows", "features", "hyperparameters"},
//    "scaler": null | {"mean", "scale"}, "encoders": [...], "params": {...}}
//
// Trees are nested objects: a leaf is {"leaf", "counts", "samples"}, a split
// is {"feature", "threshold", "counts", "samples", "left", "right"}.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "flowguard/flowdata.hpp"
#include "flowguard/learners/adaboost.hpp"
#include "flowguard/learners/forest.hpp"
#include "flowguard/learners/knn.hpp"
#include "flowguard/learners/naive_bayes.hpp"
#include "flowguard/learners/tree.hpp"

namespace flowguard {

inline constexpr int model_format_version = 1;

enum class Algorithm { naive_bayes, knn, decision_tree, random_forest, adaboost };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::naive_bayes: return "naive_bayes";
        case Algorithm::knn: return "knn";
        case Algorithm::decision_tree: return "decision_tree";
        case Algorithm::random_forest: return "random_forest";
        case Algorithm::adaboost: return "adaboost";
    }
    return "unknown";
}

/// Short CLI name: nb, knn, tree, rf, ada.
inline std::string short_name(Algorithm a) {
    switch (a) {
        case Algorithm::naive_bayes: return "nb";
        case Algorithm::knn: return "knn";
        case Algorithm::decision_tree: return "tree";
        case Algorithm::random_forest: return "rf";
        case Algorithm::adaboost: return "ada";
    }
    return "unknown";
}

inline std::string display_name(Algorithm a) {
    switch (a) {
        case Algorithm::naive_bayes: return "Naïve Bayes Classifier";
        case Algorithm::knn: return "K-Nearest Neighbors Classifier";
        case Algorithm::decision_tree: return "Decision Tree Classifier";
        case Algorithm::random_forest: return "Random Forest Classifier";
        case Algorithm::adaboost: return "AdaBoost Classifier";
    }
    return "Unknown";
}

inline std::optional<Algorithm> algorithm_from_string(std::string_view s) {
    for (auto a : {Algorithm::naive_bayes, Algorithm::knn, Algorithm::decision_tree, Algorithm::random_forest,
                   Algorithm::adaboost})
        if (s == to_string(a) || s == short_name(a)) return a;
    return std::nullopt;
}

/// The four families compared in the evaluation table.
inline const std::vector<Algorithm>& table_algorithms() {
    static const std::vector<Algorithm> all{Algorithm::naive_bayes, Algorithm::adaboost, Algorithm::random_forest,
                                            Algorithm::knn};
    return all;
}

struct Hyperparameters {
    std::size_t knn_k = default_knn_k;
    TreeParams tree;
    ForestParams forest;
    BoostParams boost;

    bool operator==(const Hyperparameters&) const = default;
};

inline Json hyperparameters_to_json(const Hyperparameters& h) {
    return {{"knn_k", h.knn_k},
            {"tree", {{"max_depth", h.tree.max_depth},
                      {"min_samples_split", h.tree.min_samples_split},
                      {"features_per_split", h.tree.features_per_split}}},
            {"forest", {{"n_trees", h.forest.n_trees},
                        {"bootstrap", h.forest.bootstrap},
                        {"features_per_split", h.forest.features_per_split},
                        {"max_depth", h.forest.max_depth},
                        {"min_samples_split", h.forest.min_samples_split}}},
            {"boost", {{"n_rounds", h.boost.n_rounds}, {"learning_rate", h.boost.learning_rate}}}};
}

/// Missing keys keep their defaults.
inline Hyperparameters hyperparameters_from_json(const Json& j) {
    Hyperparameters h;
    h.knn_k = j.value("knn_k", h.knn_k);
    if (j.contains("tree")) {
        const auto& t = j["tree"];
        h.tree.max_depth = t.value("max_depth", h.tree.max_depth);
        h.tree.min_samples_split = t.value("min_samples_split", h.tree.min_samples_split);
        h.tree.features_per_split = t.value("features_per_split", h.tree.features_per_split);
    }
    if (j.contains("forest")) {
        const auto& f = j["forest"];
        h.forest.n_trees = f.value("n_trees", h.forest.n_trees);
        h.forest.bootstrap = f.value("bootstrap", h.forest.bootstrap);
        h.forest.features_per_split = f.value("features_per_split", h.forest.features_per_split);
        h.forest.max_depth = f.value("max_depth", h.forest.max_depth);
        h.forest.min_samples_split = f.value("min_samples_split", h.forest.min_samples_split);
    }
    if (j.contains("boost")) {
        const auto& b = j["boost"];
        h.boost.n_rounds = b.value("n_rounds", h.boost.n_rounds);
        h.boost.learning_rate = b.value("learning_rate", h.boost.learning_rate);
    }
    return h;
}

struct TrainMeta {
    std::uint64_t seed = 0;
    std::size_t rows = 0;
    std::size_t features = 0;
    Json hyperparameters = Json::object();

    bool operator==(const TrainMeta&) const = default;
};

using ModelParams = std::variant<NaiveBayesModel, KnnModel, DecisionTreeModel, RandomForestModel, AdaBoostModel>;

struct TrainedModel {
    ModelParams params;
    std::vector<ClassCode> classes;
    std::vector<std::string> feature_names;
    TrainMeta meta;
    LabelSemantics target = LabelSemantics::binary_label;
    /// Raw target values by class code when the target was encoded.
    std::vector<std::string> class_names;
    std::optional<Standardizer> scaler;
    /// Feature encoders fitted at training time, for scoring raw records.
    std::vector<EncoderMap> encoders;

    Algorithm algorithm() const { return static_cast<Algorithm>(params.index()); }

    bool operator==(const TrainedModel&) const = default;
};

/// Fits one family on (X, y). Scaling and encoders are attached by callers.
inline TrainedModel fit_model(Algorithm algo, const FeatureMatrix& X, const LabelVector& y,
                              const Hyperparameters& h = {}, std::uint64_t seed = 0) {
    TrainedModel m;
    switch (algo) {
        case Algorithm::naive_bayes: m.params = nb_fit(X, y); break;
        case Algorithm::knn: m.params = knn_fit(X, y, h.knn_k); break;
        case Algorithm::decision_tree: m.params = tree_fit(X, y, h.tree, seed); break;
        case Algorithm::random_forest: m.params = forest_fit(X, y, h.forest, seed); break;
        case Algorithm::adaboost: m.params = adaboost_fit(X, y, h.boost, seed); break;
    }
    m.classes = learners::observed_classes(y);
    m.feature_names = X.names;
    m.target = y.semantics;
    m.meta = {seed, X.rows, X.cols(), hyperparameters_to_json(h)};
    return m;
}

/// Labels for X, after the model's scaler when it has one.
inline std::vector<ClassCode> predict(const TrainedModel& m, const FeatureMatrix& X) {
    learners::require_width(X, m.feature_names.size());
    const FeatureMatrix& input = X;
    std::optional<FeatureMatrix> scaled;
    if (m.scaler) scaled = m.scaler->apply(X);
    const FeatureMatrix& in = scaled ? *scaled : input;
    return std::visit(
        [&](const auto& p) -> std::vector<ClassCode> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NaiveBayesModel>) return nb_predict(p, in).labels;
            else if constexpr (std::is_same_v<P, KnnModel>) return knn_predict(p, in);
            else if constexpr (std::is_same_v<P, DecisionTreeModel>) return tree_predict(p, in);
            else if constexpr (std::is_same_v<P, RandomForestModel>) return forest_predict(p, in);
            else return adaboost_predict(p, in);
        },
        m.params);
}

// ---------------------------------------------------------------------------
// Serialisation

namespace detail {

inline Json node_to_json(const DecisionTreeModel& t, std::size_t n) {
    const auto& node = t.nodes[n];
    if (node.is_leaf()) return {{"leaf", node.label}, {"counts", node.counts}, {"samples", node.samples}};
    return {{"feature", node.feature},
            {"threshold", node.threshold},
            {"counts", node.counts},
            {"samples", node.samples},
            {"left", node_to_json(t, static_cast<std::size_t>(node.left))},
            {"right", node_to_json(t, static_cast<std::size_t>(node.right))}};
}

inline Json tree_to_json(const DecisionTreeModel& t) { return node_to_json(t, 0); }

/// Rebuilds the flat node array with the same slot numbering the builder uses.
inline DecisionTreeModel tree_from_json(const Json& j, const std::vector<ClassCode>& classes, std::size_t d) {
    DecisionTreeModel t;
    t.classes = classes;
    t.n_features = d;
    t.nodes.resize(1);
    std::vector<std::pair<std::size_t, const Json*>> stack{{0, &j}};
    while (!stack.empty()) {
        auto [slot, js] = stack.back();
        stack.pop_back();
        TreeNode node;
        node.counts = js->at("counts").get<std::vector<double>>();
        node.samples = js->at("samples").get<std::size_t>();
        if (node.counts.size() != classes.size()) throw CorruptModel("tree node class counts do not match classes");
        if (js->contains("leaf")) {
            node.label = js->at("leaf").get<ClassCode>();
            learners::class_index(classes, node.label);
            t.nodes[slot] = std::move(node);
            continue;
        }
        node.feature = js->at("feature").get<int>();
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= d)
            throw CorruptModel("tree split references feature outside the model");
        node.threshold = js->at("threshold").get<double>();
        node.label = classes[learners::argmax_low<double>(node.counts)];
        node.left = static_cast<std::int32_t>(t.nodes.size());
        node.right = node.left + 1;
        const auto left = static_cast<std::size_t>(node.left);
        t.nodes[slot] = std::move(node);
        t.nodes.emplace_back();
        t.nodes.emplace_back();
        stack.emplace_back(left + 1, &js->at("right"));
        stack.emplace_back(left, &js->at("left"));
    }
    return t;
}

inline Json params_to_json(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> Json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NaiveBayesModel>) {
                return {{"priors", p.priors}, {"means", p.means}, {"variances", p.variances},
                        {"variance_floor", p.variance_floor}};
            } else if constexpr (std::is_same_v<P, KnnModel>) {
                Json rows = Json::array();
                for (std::size_t i = 0; i < p.train.rows; ++i) {
                    auto r = p.train.row(i);
                    rows.push_back(std::vector<double>(r.begin(), r.end()));
                }
                return {{"k", p.k}, {"train", rows}, {"labels", p.labels}};
            } else if constexpr (std::is_same_v<P, DecisionTreeModel>) {
                return {{"tree", tree_to_json(p)}};
            } else if constexpr (std::is_same_v<P, RandomForestModel>) {
                Json trees = Json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                return {{"n_trees", p.params.n_trees},
                        {"bootstrap", p.params.bootstrap},
                        {"features_per_split", p.params.features_per_split},
                        {"max_depth", p.params.max_depth},
                        {"min_samples_split", p.params.min_samples_split},
                        {"seed", p.seed},
                        {"trees", trees}};
            } else {
                Json rounds = Json::array();
                for (const auto& r : p.rounds)
                    rounds.push_back({{"alpha", r.alpha}, {"error", r.error}, {"stump", tree_to_json(r.stump)}});
                return {{"n_rounds", p.params.n_rounds}, {"learning_rate", p.params.learning_rate}, {"rounds", rounds}};
            }
        },
        params);
}

inline ModelParams params_from_json(Algorithm algo, const Json& j, const std::vector<ClassCode>& classes,
                                    const std::vector<std::string>& names) {
    const std::size_t d = names.size(), K = classes.size();
    switch (algo) {
        case Algorithm::naive_bayes: {
            NaiveBayesModel m;
            m.classes = classes;
            m.priors = j.at("priors").get<std::vector<double>>();
            m.means = j.at("means").get<std::vector<std::vector<double>>>();
            m.variances = j.at("variances").get<std::vector<std::vector<double>>>();
            m.variance_floor = j.at("variance_floor").get<double>();
            if (m.priors.size() != K || m.means.size() != K || m.variances.size() != K)
                throw CorruptModel("naive Bayes parameters do not match class count");
            for (std::size_t c = 0; c < K; ++c)
                if (m.means[c].size() != d || m.variances[c].size() != d)
                    throw CorruptModel("naive Bayes parameters do not match feature count");
            return m;
        }
        case Algorithm::knn: {
            KnnModel m;
            m.classes = classes;
            m.k = j.at("k").get<std::size_t>();
            m.labels = j.at("labels").get<std::vector<ClassCode>>();
            m.train = FeatureMatrix(names, 0);
            for (const auto& r : j.at("train")) {
                auto row = r.get<std::vector<double>>();
                if (row.size() != d) throw CorruptModel("stored neighbour row has wrong width");
                m.train.append_row(row);
            }
            if (m.labels.size() != m.train.rows || m.k == 0 || m.k > m.train.rows)
                throw CorruptModel("neighbour store is inconsistent");
            return m;
        }
        case Algorithm::decision_tree: return tree_from_json(j.at("tree"), classes, d);
        case Algorithm::random_forest: {
            RandomForestModel m;
            m.classes = classes;
            m.n_features = d;
            m.params.n_trees = j.at("n_trees").get<std::size_t>();
            m.params.bootstrap = j.at("bootstrap").get<bool>();
            m.params.features_per_split = j.at("features_per_split").get<std::size_t>();
            m.params.max_depth = j.at("max_depth").get<std::size_t>();
            m.params.min_samples_split = j.at("min_samples_split").get<std::size_t>();
            m.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t, classes, d));
            if (m.trees.size() != m.params.n_trees) throw CorruptModel("forest tree count mismatch");
            return m;
        }
        case Algorithm::adaboost: {
            AdaBoostModel m;
            m.classes = classes;
            m.n_features = d;
            m.params.n_rounds = j.at("n_rounds").get<std::size_t>();
            m.params.learning_rate = j.at("learning_rate").get<double>();
            for (const auto& r : j.at("rounds"))
                m.rounds.push_back({tree_from_json(r.at("stump"), classes, d), r.at("alpha").get<double>(),
                                    r.at("error").get<double>()});
            return m;
        }
    }
    throw CorruptModel("unknown algorithm");
}

}  // namespace detail

inline Json model_to_json(const TrainedModel& m) {
    Json j;
    j["version"] = model_format_version;
    j["algorithm"] = to_string(m.algorithm());
    j["classes"] = m.classes;
    j["feature_names"] = m.feature_names;
    j["target"] = to_string(m.target);
    j["class_names"] = m.class_names;
    j["meta"] = {{"seed", m.meta.seed}, {"rows", m.meta.rows}, {"features", m.meta.features},
                 {"hyperparameters", m.meta.hyperparameters}};
    j["scaler"] = m.scaler ? Json{{"mean", m.scaler->mean}, {"scale", m.scaler->scale}} : Json(nullptr);
    Json enc = Json::array();
    for (const auto& e : m.encoders) enc.push_back(encoder_to_json(e));
    j["encoders"] = enc;
    j["params"] = detail::params_to_json(m.params);
    return j;
}

inline TrainedModel model_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("version")) throw CorruptModel("model file has no version tag");
    if (!j["version"].is_number_integer()) throw CorruptModel("model version tag is not an integer");
    const auto version = j["version"].get<long long>();
    if (version != model_format_version)
        throw VersionMismatch("model format version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(model_format_version) + ")");
    try {
        const auto algo = algorithm_from_string(j.at("algorithm").get<std::string>());
        if (!algo) throw CorruptModel("unknown algorithm '" + j.at("algorithm").get<std::string>() + "'");
        TrainedModel m;
        m.classes = j.at("classes").get<std::vector<ClassCode>>();
        if (m.classes.empty() || !std::is_sorted(m.classes.begin(), m.classes.end()))
            throw CorruptModel("model classes must be a sorted, non-empty list");
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.target = label_semantics_from_string(j.at("target").get<std::string>());
        m.class_names = j.value("class_names", std::vector<std::string>{});
        const auto& meta = j.at("meta");
        m.meta = {meta.at("seed").get<std::uint64_t>(), meta.at("rows").get<std::size_t>(),
                  meta.at("features").get<std::size_t>(), meta.value("hyperparameters", Json::object())};
        if (j.contains("scaler") && !j["scaler"].is_null()) {
            Standardizer s{j["scaler"].at("mean").get<std::vector<double>>(),
                           j["scaler"].at("scale").get<std::vector<double>>()};
            if (s.mean.size() != m.feature_names.size() || s.scale.size() != m.feature_names.size())
                throw CorruptModel("scaler width does not match features");
            m.scaler = std::move(s);
        }
        for (const auto& e : j.value("encoders", Json::array())) m.encoders.push_back(encoder_from_json(e));
        m.params = detail::params_from_json(*algo, j.at("params"), m.classes, m.feature_names);
        return m;
    } catch (const Json::exception& e) {
        throw CorruptModel(std::string("malformed model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw CorruptModel(e.what());
    } catch (const UnknownLabel& e) {
        throw CorruptModel(e.what());
    }
}

inline std::string serialize_model(const TrainedModel& m) { return model_to_json(m).dump() + "\n"; }

inline TrainedModel deserialize_model(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw CorruptModel(std::string("model file is truncated or not JSON: ") + e.what());
    }
    return model_from_json(j);
}

inline void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << serialize_model(m);
    if (!out) throw IoError("failed writing " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

}  // namespace flowguard
