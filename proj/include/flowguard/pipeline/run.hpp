#pragma once

// One end-to-end run over a workspace:
//
//   ingest    raw/<dataset>, raw/schema.json
//   curate    curated/<stem>.curated.csv (raw columns + <col>_code),
//             curated/schema.json, curated/encoders.json
//   assemble  numeric matrix + labels (in memory)
//   eda       results/class_distribution.{csv,svg}, results/hist_<col>.{csv,svg},
//             results/correlation.{csv,svg}
//   select    results/feature_selection.json
//   split     results/split.json
//   smote     results/smote.json
//   scale     results/scaler.json
//   train     models/<short>.model.json
//   evaluate  results/<short>.report.json
//   compare   results/comparison.{json,txt}, results/summary.json
//   report    report/index.html
//
// Every artifact is written through the workspace so it lands in its stage
// manifest. When a step throws, the files it already wrote are removed and a
// StepError naming the step is raised.

#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flowguard/eda.hpp"
#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/hash.hpp"
#include "flowguard/learners/common.hpp"
#include "flowguard/learners/model.hpp"
#include "flowguard/metrics.hpp"
#include "flowguard/pipeline/config.hpp"
#include "flowguard/pipeline/report.hpp"
#include "flowguard/pipeline/summary.hpp"
#include "flowguard/pipeline/workspace.hpp"
#include "flowguard/sampling.hpp"

namespace flowguard::pipeline {

struct RunOptions {
    /// Skip everything when the workspace already holds a verified run with
    /// the same input and config hashes.
    bool reuse = false;
    /// Fixed timestamps so manifests and the report are byte-reproducible.
    bool stable = false;
};

inline constexpr const char* curated_schema_file = "schema.json";
inline constexpr const char* encoders_file = "encoders.json";

/// Class display names: "normal"/"attack" for the binary label, the raw
/// category otherwise.
inline std::vector<std::string> class_names_for(LabelSemantics target, const FlowSchema& schema,
                                                std::span<const EncoderMap> encoders) {
    if (target == LabelSemantics::binary_label) {
        if (const auto* e = find_encoder(encoders, schema.label_column)) {
            std::vector<std::string> out;
            for (const auto& v : e->categories()) out.push_back(format_value(v));
            return out;
        }
        return {"normal", "attack"};
    }
    const auto* e = find_encoder(encoders, *schema.attack_column);
    std::vector<std::string> out;
    for (const auto& v : e->categories()) out.push_back(format_value(v));
    return out;
}

/// Raw columns followed by one `<col>_code` integer column per encoder.
inline RecordTable curate(const RecordTable& table, std::span<const EncoderMap> encoders) {
    RecordTable out{table.schema, {}, table.skipped_rows};
    std::vector<std::size_t> src;
    for (const auto& e : encoders) {
        out.schema.columns.push_back({e.column() + "_code", ColumnKind::integer});
        src.push_back(table.schema.index_of(e.column()));
    }
    out.rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        Row row = r;
        for (std::size_t k = 0; k < encoders.size(); ++k) row.emplace_back(encoders[k].code_of(r[src[k]]));
        out.rows.push_back(std::move(row));
    }
    return out;
}

namespace detail {

class StepRunner {
public:
    StepRunner(const Workspace& ws, std::string config_hash, std::string timestamp)
        : ws_(ws), hash_(std::move(config_hash)), timestamp_(std::move(timestamp)) {}

    void put(Stage s, const std::string& file, std::string_view bytes) {
        written_.emplace_back(s, file);
        ws_.write(s, file, bytes, step_, hash_, timestamp_);
    }

    template <typename F>
    void run(const std::string& name, std::vector<StepRecord>& log, F&& body) {
        step_ = name;
        written_.clear();
        try {
            body();
        } catch (const Error& e) {
            rollback();
            throw StepError(name, e);
        } catch (const std::exception& e) {
            rollback();
            throw StepError(name, Error("InternalError", e.what()));
        }
        log.push_back({name, "ran"});
    }

    static void disabled(const std::string& name, std::vector<StepRecord>& log) { log.push_back({name, "disabled"}); }

    const std::string& timestamp() const { return timestamp_; }

private:
    void rollback() noexcept {
        for (const auto& [s, f] : written_) {
            try {
                ws_.remove(s, f);
            } catch (...) {
            }
        }
        written_.clear();
    }

    const Workspace& ws_;
    std::string hash_;
    std::string timestamp_;
    std::string step_;
    std::vector<std::pair<Stage, std::string>> written_;
};

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string safe_file_part(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    return out;
}

inline double accuracy_of(std::span<const ClassCode> truth, std::span<const ClassCode> pred) {
    if (truth.empty()) return 0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Returns the stored summary when the workspace already holds a verified run
/// for `hash`.
inline std::optional<RunSummary> reusable_run(const Workspace& ws, const std::string& hash) {
    try {
        const auto results = ws.manifest(Stage::results);
        const auto report = ws.manifest(Stage::report);
        const auto* s = results.find(summary_file);
        const auto* r = report.find(report_file);
        if (!s || !r || s->config_hash != hash || r->config_hash != hash) return std::nullopt;
        if (!ws.verify().empty()) return std::nullopt;
        return load_summary(ws);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace detail

inline RunSummary run_pipeline(const Workspace& workspace, const RunConfig& config, const RunOptions& options = {}) {
    config.validate();
    if (!std::filesystem::is_regular_file(config.dataset))
        throw ConfigError("dataset " + config.dataset.string() + " does not exist");
    if (config.schema_path && !std::filesystem::is_regular_file(*config.schema_path))
        throw ConfigError("schema " + config.schema_path->string() + " does not exist");
    const FlowSchema schema = config.schema();

    const Workspace ws = init_workspace(workspace.root());
    WorkspaceLock lock(ws);

    const std::string input_hash = sha256_file(config.dataset);
    const std::string hash = config_hash(config, input_hash);

    if (options.reuse) {
        if (auto prior = detail::reusable_run(ws, hash)) {
            for (auto& st : prior->steps)
                if (st.status == "ran") st.status = "skipped";
            return *prior;
        }
    }
    ws.clear();

    detail::StepRunner step(ws, hash, options.stable ? std::string(stable_timestamp) : utc_timestamp());
    RunSummary summary;
    summary.dataset = config.dataset.filename().string();
    summary.input_hash = input_hash;
    summary.config_hash = hash;
    summary.seed = config.seed;
    summary.split_seed = config.effective_split_seed();
    summary.test_fraction = config.test_fraction;
    summary.target = to_string(config.target);
    summary.smote = config.smote;
    summary.smote_k = config.smote ? config.smote_k : 0;
    summary.scaled = config.scale;
    summary.correlation_threshold = config.correlation_threshold;
    summary.created_at = step.timestamp();
    auto& log = summary.steps;

    RecordTable table;
    step.run("ingest", log, [&] {
        step.put(Stage::raw, summary.dataset, Workspace::read_bytes(config.dataset));
        step.put(Stage::raw, curated_schema_file, detail::dump(schema_to_json(schema)));
        table = load_flow_csv(ws.path(Stage::raw, summary.dataset), schema, config.policy);
        if (table.rows.empty()) throw EmptyInput("dataset has no data rows");
        summary.rows = table.rows.size();
        summary.skipped_rows = table.skipped_rows;
    });

    std::vector<EncoderMap> encoders;
    step.run("curate", log, [&] {
        encoders = fit_encoders(table, schema, config.target, config.policy);
        const auto curated = curate(table, encoders);
        std::ostringstream csv_out;
        write_flow_csv(csv_out, curated);
        const auto stem = std::filesystem::path(summary.dataset).stem().string();
        step.put(Stage::curated, stem + ".curated.csv", csv_out.str());
        step.put(Stage::curated, curated_schema_file, detail::dump(schema_to_json(curated.schema)));
        nlohmann::json enc = nlohmann::json::array();
        for (const auto& e : encoders) enc.push_back(encoder_to_json(e));
        step.put(Stage::curated, encoders_file, detail::dump(enc));
    });

    FeatureMatrix X;
    LabelVector y;
    step.run("assemble", log, [&] {
        std::tie(X, y) = assemble(table, schema, encoders, config.target);
        summary.class_names = class_names_for(config.target, schema, encoders);
    });

    std::optional<CorrelationMatrix> correlation;
    auto correlate = [&] {
        if (!correlation && X.rows >= 2) correlation = pearson(X);
    };
    if (config.eda) {
        step.run("eda", log, [&] {
            EdaSummary eda;
            eda.class_distribution = class_distribution(y);
            std::ostringstream dist;
            dist << "class,name,count\n";
            for (const auto& [c, n] : eda.class_distribution) {
                const auto i = static_cast<std::size_t>(c);
                dist << c << ',' << csv::quote(i < summary.class_names.size() ? summary.class_names[i] : "") << ','
                     << n << '\n';
            }
            step.put(Stage::results, "class_distribution.csv", dist.str());
            step.put(Stage::results, "class_distribution.svg",
                     class_distribution_svg(eda.class_distribution, summary.class_names));
            for (std::size_t j = 0; j < X.cols(); ++j) {
                const auto& name = X.names[j];
                std::vector<double> values;
                if (table.schema.column(name).kind == ColumnKind::text) {
                    values = X.column(j);
                } else {
                    const auto idx = table.schema.index_of(name);
                    values.reserve(table.rows.size());
                    for (const auto& r : table.rows) values.push_back(as_real(r[idx]));
                }
                auto h = histogram(values, config.bins, name);
                const auto base = "hist_" + detail::safe_file_part(name);
                step.put(Stage::results, base + ".csv", histogram_csv(h));
                step.put(Stage::results, base + ".svg", histogram_svg(h));
                eda.histograms.push_back(std::move(h));
            }
            correlate();
            if (correlation) {
                step.put(Stage::results, "correlation.csv", correlation_csv(*correlation));
                step.put(Stage::results, "correlation.svg", correlation_svg(*correlation));
                eda.correlation = correlation;
            }
            summary.eda = std::move(eda);
        });
    } else {
        detail::StepRunner::disabled("eda", log);
    }

    step.run("select", log, [&] {
        FeatureSelection sel;
        sel.kept = X.names;
        sel.threshold = config.correlation_threshold;
        if (config.drop_correlated) {
            correlate();
            if (correlation) sel = drop_correlated(*correlation, config.correlation_threshold);
        }
        if (sel.kept.size() != X.cols()) X = X.select(sel.kept);
        summary.features = sel.kept;
        summary.dropped = sel.dropped;
        nlohmann::json dropped = nlohmann::json::array();
        for (const auto& d : sel.dropped) dropped.push_back({{"name", d.name}, {"partner", d.partner}, {"r", d.r}});
        step.put(Stage::results, "feature_selection.json",
                 detail::dump({{"enabled", config.drop_correlated},
                               {"threshold", sel.threshold},
                               {"kept", sel.kept},
                               {"dropped", dropped}}));
    });

    SplitIndices split;
    step.run("split", log, [&] {
        split = stratified_split(y, config.test_fraction, config.effective_split_seed());
        if (split.test.empty()) throw TooFewRows("test split is empty; raise split.test_fraction or add rows");
        if (split.train.empty()) throw TooFewRows("training split is empty");
        summary.train_rows = split.train.size();
        summary.test_rows = split.test.size();
        step.put(Stage::results, "split.json", detail::dump(split_to_json(split)));
    });
    const FeatureMatrix X_train_orig = X.take(split.train);
    const LabelVector y_train_orig = y.take(split.train);
    const FeatureMatrix X_test = X.take(split.test);
    const LabelVector y_test = y.take(split.test);

    FeatureMatrix X_train = X_train_orig;
    LabelVector y_train = y_train_orig;
    if (config.smote) {
        step.run("smote", log, [&] {
            auto res = smote(X_train_orig, y_train_orig, config.smote_k, config.seed);
            summary.synthetic_rows = res.synthetic_from.size();
            nlohmann::json counts = nlohmann::json::array();
            for (const auto& [c, n] : class_distribution(res.y)) counts.push_back({{"class", c}, {"count", n}});
            step.put(Stage::results, "smote.json",
                     detail::dump({{"k", config.smote_k},
                                   {"seed", config.seed},
                                   {"original_rows", res.original_rows()},
                                   {"synthetic_rows", res.synthetic_from.size()},
                                   {"single_class", res.single_class},
                                   {"class_counts", counts}}));
            X_train = std::move(res.X);
            y_train = std::move(res.y);
        });
    } else {
        detail::StepRunner::disabled("smote", log);
    }

    std::optional<Standardizer> scaler;
    if (config.scale) {
        step.run("scale", log, [&] {
            scaler = Standardizer::fit(X_train);
            X_train = scaler->apply(std::move(X_train));
            step.put(Stage::results, "scaler.json",
                     detail::dump({{"features", X_train.names}, {"mean", scaler->mean}, {"scale", scaler->scale}}));
        });
    } else {
        detail::StepRunner::disabled("scale", log);
    }

    std::vector<TrainedModel> models(config.models.size());
    std::vector<double> train_accuracy(config.models.size());
    step.run("train", log, [&] {
        // Families are independent, so they train concurrently; artifacts are
        // written afterwards in configuration order.
        std::vector<std::exception_ptr> failures(config.models.size());
        learners::parallel_for(config.models.size(), [&](std::size_t i) {
            try {
                auto m = fit_model(config.models[i], X_train, y_train, config.hyperparameters, config.seed);
                m.scaler = scaler;
                m.encoders = encoders;
                m.class_names = summary.class_names;
                train_accuracy[i] = detail::accuracy_of(y_train_orig.values, predict(m, X_train_orig));
                models[i] = std::move(m);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        });
        for (auto& f : failures)
            if (f) std::rethrow_exception(f);
        for (const auto& m : models)
            step.put(Stage::models, short_name(m.algorithm()) + ".model.json", serialize_model(m));
    });

    std::vector<EvaluationReport> reports;
    step.run("evaluate", log, [&] {
        for (std::size_t i = 0; i < models.size(); ++i) {
            const auto algo = config.models[i];
            auto r = evaluate(y_test.values, predict(models[i], X_test), y.classes, display_name(algo));
            const auto report_name = short_name(algo) + ".report.json";
            step.put(Stage::results, report_name, detail::dump(report_to_json(r)));
            summary.models.push_back({short_name(algo), display_name(algo), short_name(algo) + ".model.json",
                                      report_name, train_accuracy[i], r});
            reports.push_back(std::move(r));
        }
    });

    step.run("compare", log, [&] {
        summary.comparison = compare(reports);
        step.put(Stage::results, "comparison.json", detail::dump(comparison_to_json(summary.comparison)));
        step.put(Stage::results, "comparison.txt", render_comparison(summary.comparison));
    });

    // The summary is written inside the report step so that it lists every
    // step; a failed render rolls both files back together.
    step.run("report", log, [&] {
        auto complete = summary;
        complete.steps.push_back({"report", "ran"});
        step.put(Stage::results, summary_file, detail::dump(summary_to_json(complete)));
        step.put(Stage::report, report_file, render_html_report(load_summary(ws)));
    });
    return summary;
}

}  // namespace flowguard::pipeline
