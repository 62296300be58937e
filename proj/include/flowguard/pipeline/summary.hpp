#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowguard/eda.hpp"
#include "flowguard/metrics.hpp"

namespace flowguard::pipeline {

struct StepRecord {
    std::string name;
    std::string status;  // "ran", "disabled" or "skipped"

    bool operator==(const StepRecord&) const = default;
};

struct ModelResult {
    std::string algorithm;  // short name
    std::string name;       // display name
    std::string model_file;
    std::string report_file;
    double train_accuracy = 0;
    EvaluationReport report;
};

struct EdaSummary {
    std::map<ClassCode, std::size_t> class_distribution;
    std::vector<Histogram> histograms;
    std::optional<CorrelationMatrix> correlation;
};

struct RunSummary {
    std::string dataset;
    std::string input_hash;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;
    double test_fraction = 0;
    std::string target;
    std::vector<std::string> class_names;
    std::size_t rows = 0;
    std::size_t skipped_rows = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    bool smote = false;
    std::size_t smote_k = 0;
    std::size_t synthetic_rows = 0;
    bool scaled = false;
    std::vector<std::string> features;  // after correlation dropping
    std::vector<DroppedFeature> dropped;
    double correlation_threshold = 0;
    std::optional<EdaSummary> eda;
    std::vector<ModelResult> models;
    ComparisonTable comparison;
    std::vector<StepRecord> steps;
    std::string created_at;
};

inline nlohmann::json summary_to_json(const RunSummary& s) {
    using nlohmann::json;
    json j;
    j["dataset"] = s.dataset;
    j["input_hash"] = s.input_hash;
    j["config_hash"] = s.config_hash;
    j["seed"] = s.seed;
    j["split"] = {{"seed", s.split_seed}, {"test_fraction", s.test_fraction},
                  {"train_rows", s.train_rows}, {"test_rows", s.test_rows}};
    j["target"] = s.target;
    j["class_names"] = s.class_names;
    j["rows"] = s.rows;
    j["skipped_rows"] = s.skipped_rows;
    j["smote"] = {{"enabled", s.smote}, {"k", s.smote_k}, {"synthetic_rows", s.synthetic_rows}};
    j["scaled"] = s.scaled;
    j["features"] = s.features;
    json dropped = json::array();
    for (const auto& d : s.dropped) dropped.push_back({{"name", d.name}, {"partner", d.partner}, {"r", d.r}});
    j["dropped"] = dropped;
    j["correlation_threshold"] = s.correlation_threshold;
    if (s.eda) {
        json dist = json::array();
        for (const auto& [c, n] : s.eda->class_distribution) dist.push_back({{"class", c}, {"count", n}});
        json hists = json::array();
        for (const auto& h : s.eda->histograms)
            hists.push_back({{"column", h.column}, {"bin_edges", h.bin_edges}, {"counts", h.counts}});
        json eda = {{"class_distribution", dist}, {"histograms", hists}};
        if (s.eda->correlation)
            eda["correlation"] = {{"names", s.eda->correlation->names},
                                  {"r", s.eda->correlation->r},
                                  {"degenerate", s.eda->correlation->degenerate}};
        else
            eda["correlation"] = nullptr;
        j["eda"] = eda;
    } else {
        j["eda"] = nullptr;
    }
    json models = json::array();
    for (const auto& m : s.models)
        models.push_back({{"algorithm", m.algorithm}, {"name", m.name}, {"model_file", m.model_file},
                          {"report_file", m.report_file}, {"train_accuracy", m.train_accuracy},
                          {"report", report_to_json(m.report)}});
    j["models"] = models;
    j["comparison"] = comparison_to_json(s.comparison);
    json steps = json::array();
    for (const auto& st : s.steps) steps.push_back({{"name", st.name}, {"status", st.status}});
    j["steps"] = steps;
    j["created_at"] = s.created_at;
    return j;
}

inline RunSummary summary_from_json(const nlohmann::json& j) {
    try {
        RunSummary s;
        s.dataset = j.at("dataset").get<std::string>();
        s.input_hash = j.at("input_hash").get<std::string>();
        s.config_hash = j.at("config_hash").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.split_seed = j.at("split").at("seed").get<std::uint64_t>();
        s.test_fraction = j.at("split").at("test_fraction").get<double>();
        s.train_rows = j.at("split").at("train_rows").get<std::size_t>();
        s.test_rows = j.at("split").at("test_rows").get<std::size_t>();
        s.target = j.at("target").get<std::string>();
        s.class_names = j.at("class_names").get<std::vector<std::string>>();
        s.rows = j.at("rows").get<std::size_t>();
        s.skipped_rows = j.at("skipped_rows").get<std::size_t>();
        s.smote = j.at("smote").at("enabled").get<bool>();
        s.smote_k = j.at("smote").at("k").get<std::size_t>();
        s.synthetic_rows = j.at("smote").at("synthetic_rows").get<std::size_t>();
        s.scaled = j.at("scaled").get<bool>();
        s.features = j.at("features").get<std::vector<std::string>>();
        for (const auto& d : j.at("dropped"))
            s.dropped.push_back({d.at("name").get<std::string>(), d.at("partner").get<std::string>(),
                                 d.at("r").get<double>()});
        s.correlation_threshold = j.at("correlation_threshold").get<double>();
        if (!j.at("eda").is_null()) {
            EdaSummary e;
            const auto& je = j["eda"];
            for (const auto& d : je.at("class_distribution"))
                e.class_distribution[d.at("class").get<ClassCode>()] = d.at("count").get<std::size_t>();
            for (const auto& h : je.at("histograms"))
                e.histograms.push_back({h.at("column").get<std::string>(), h.at("bin_edges").get<std::vector<double>>(),
                                        h.at("counts").get<std::vector<std::size_t>>()});
            if (!je.at("correlation").is_null())
                e.correlation = CorrelationMatrix{je["correlation"].at("names").get<std::vector<std::string>>(),
                                                  je["correlation"].at("r").get<std::vector<std::vector<double>>>(),
                                                  je["correlation"].at("degenerate").get<std::vector<std::string>>()};
            s.eda = std::move(e);
        }
        for (const auto& m : j.at("models"))
            s.models.push_back({m.at("algorithm").get<std::string>(), m.at("name").get<std::string>(),
                                m.at("model_file").get<std::string>(), m.at("report_file").get<std::string>(),
                                m.at("train_accuracy").get<double>(), report_from_json(m.at("report"))});
        for (const auto& r : j.at("comparison").at("rows"))
            s.comparison.rows.push_back({r.at("model").get<std::string>(), r.at("accuracy").get<double>(),
                                         r.at("precision").get<double>(), r.at("recall").get<double>(),
                                         r.at("f1").get<double>()});
        for (const auto& st : j.at("steps"))
            s.steps.push_back({st.at("name").get<std::string>(), st.at("status").get<std::string>()});
        s.created_at = j.at("created_at").get<std::string>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw MissingResults(std::string("run summary is malformed: ") + e.what());
    }
}

}  // namespace flowguard::pipeline
