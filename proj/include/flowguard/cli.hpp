#pragma once

// Command-line front end. `dispatch` parses the arguments (without the
// program name), runs one subcommand and returns the exit code:
//   0  success
//   1  user or data error (bad flags, malformed input, missing results, ...)
//   2  internal error
// Human-readable output goes to `out`, diagnostics to `err`. With --json
// every subcommand prints exactly one JSON document carrying a "status"
// field to `out`, errors included.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowguard/eda.hpp"
#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/learners/model.hpp"
#include "flowguard/metrics.hpp"
#include "flowguard/pipeline/config.hpp"
#include "flowguard/pipeline/query.hpp"
#include "flowguard/pipeline/report.hpp"
#include "flowguard/pipeline/run.hpp"
#include "flowguard/pipeline/synth.hpp"
#include "flowguard/pipeline/workspace.hpp"
#include "flowguard/sampling.hpp"

namespace flowguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool json_mode = false;
    bool stable = false;
    bool color = false;

    void emit(json j) const {
        j["status"] = "ok";
        out << j.dump(2) << '\n';
    }
    void info(const std::string& line) const {
        if (!json_mode) err << line << '\n';
    }
};

struct DataOptions {
    std::string schema;
    std::string policy = "strict";
    std::string target = "binary_label";

    void attach(CLI::App* sub) {
        sub->add_option("--schema", schema, "Schema JSON (default: NetFlow columns)")->check(CLI::ExistingFile);
        sub->add_option("--policy", policy, "Malformed rows and unseen categories: strict or lenient")
            ->check(CLI::IsMember({"strict", "lenient"}));
        sub->add_option("--target", target, "binary_label or attack_category")
            ->check(CLI::IsMember({"binary_label", "attack_category"}));
    }
    FlowSchema load_schema_or_default() const { return schema.empty() ? default_schema() : load_schema(schema); }
    Policy parsed_policy() const { return policy == "lenient" ? Policy::lenient : Policy::strict; }
    LabelSemantics parsed_target() const { return label_semantics_from_string(target); }
};

/// Flags that override a RunConfig (config file < flags).
struct RunFlags {
    std::string config;
    std::string csv;
    std::string workspace;
    std::optional<std::uint64_t> seed;
    bool scale = false;
    CLI::Option* smote_opt = nullptr;
    bool smote = true;
    std::optional<double> threshold;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config, "Run configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--csv", csv, "Dataset CSV (instead of a config's dataset)")->check(CLI::ExistingFile);
        sub->add_option("--workspace", workspace, "Workspace root (default: the config's, else ./workspace)");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_flag("--scale", scale, "Standardise features on the training rows");
        smote_opt = sub->add_flag("--smote,!--no-smote", smote, "Rebalance the training rows with SMOTE");
        sub->add_option("--threshold", threshold, "Correlation threshold for dropping features")
            ->check(CLI::Range(0.0, 1.0));
    }

    pipeline::RunConfig resolve() const {
        pipeline::RunConfig c;
        if (!config.empty()) c = pipeline::load_config(config);
        if (!csv.empty()) c.dataset = csv;
        if (!workspace.empty()) c.workspace = workspace;
        if (seed) c.seed = *seed;
        if (scale) c.scale = true;
        if (smote_opt && smote_opt->count() > 0) c.smote = smote;
        if (threshold) c.correlation_threshold = *threshold;
        if (c.dataset.empty()) throw ConfigError("no dataset: pass --config or --csv");
        return c;
    }
};

inline fs::path workspace_root(const std::string& explicit_root, const std::string& config) {
    if (!explicit_root.empty()) return explicit_root;
    if (!config.empty()) return pipeline::load_config(config).workspace;
    return "workspace";
}

inline pipeline::Workspace open_workspace(const fs::path& root) {
    if (!fs::is_directory(root)) throw MissingResults("no workspace at " + root.string() + "; run the pipeline first");
    return pipeline::Workspace(root);
}

inline std::string class_name(const std::vector<std::string>& names, ClassCode c) {
    const auto i = static_cast<std::size_t>(c);
    return c >= 0 && i < names.size() ? names[i] : std::to_string(c);
}

inline std::string percent(std::size_t n, std::size_t total) {
    return text::format_fixed(total ? 100.0 * static_cast<double>(n) / static_cast<double>(total) : 0.0, 2) + "%";
}

// -- subcommands ------------------------------------------------------------

inline int cmd_inspect(const Context& ctx, const std::string& csv_path, const DataOptions& d) {
    const auto schema = d.load_schema_or_default();
    const auto table = load_flow_csv(csv_path, schema, d.parsed_policy());
    const auto target = d.parsed_target();
    const auto encoders = fit_encoders(table, schema, target, d.parsed_policy());
    const auto [X, y] = assemble(table, schema, encoders, target);
    const auto names = pipeline::class_names_for(target, schema, encoders);
    const auto dist = class_distribution(y);

    if (ctx.json_mode) {
        json cols = json::array();
        for (const auto& c : schema.columns) {
            std::string role = "other";
            if (std::find(schema.feature_columns.begin(), schema.feature_columns.end(), c.name) !=
                schema.feature_columns.end())
                role = schema.is_encoded(c.name) ? "feature (encoded)" : "feature";
            else if (c.name == schema.label_column) role = "label";
            else if (schema.attack_column && c.name == *schema.attack_column) role = "attack";
            json col{{"name", c.name}, {"kind", to_string(c.kind)}, {"role", role}};
            if (const auto* e = find_encoder(encoders, c.name)) col["distinct"] = e->size();
            cols.push_back(col);
        }
        json classes = json::array();
        for (const auto& [c, n] : dist) classes.push_back({{"class", c}, {"name", class_name(names, c)}, {"count", n}});
        ctx.emit({{"command", "inspect"},
                  {"file", fs::path(csv_path).filename().string()},
                  {"rows", table.rows.size()},
                  {"skipped_rows", table.skipped_rows},
                  {"target", to_string(target)},
                  {"columns", cols},
                  {"class_distribution", classes}});
        return 0;
    }
    auto& o = ctx.out;
    o << "file:    " << fs::path(csv_path).filename().string() << '\n'
      << "rows:    " << table.rows.size();
    if (table.skipped_rows) o << " (" << table.skipped_rows << " malformed rows skipped)";
    o << "\ncolumns:\n";
    for (const auto& c : schema.columns) {
        o << "  " << flowguard::detail::pad_right(c.name, 16) << flowguard::detail::pad_right(to_string(c.kind), 9);
        if (std::find(schema.feature_columns.begin(), schema.feature_columns.end(), c.name) !=
            schema.feature_columns.end()) {
            o << "feature";
            if (const auto* e = find_encoder(encoders, c.name)) o << ", label-encoded (" << e->size() << " values)";
        } else if (c.name == schema.label_column) {
            o << "label";
        } else if (schema.attack_column && c.name == *schema.attack_column) {
            o << "attack category";
        }
        o << '\n';
    }
    o << "class distribution (" << to_string(target) << "):\n";
    for (const auto& [c, n] : dist)
        o << "  " << flowguard::detail::pad_right(std::to_string(c) + " " + class_name(names, c), 22)
          << flowguard::detail::pad_left(std::to_string(n), 9) << "  " << percent(n, y.size()) << '\n';
    return 0;
}

inline int cmd_eda(const Context& ctx, const std::string& csv_path, const DataOptions& d, const std::string& out_dir,
                   std::size_t bins, double threshold) {
    const auto schema = d.load_schema_or_default();
    const auto table = load_flow_csv(csv_path, schema, d.parsed_policy());
    const auto target = d.parsed_target();
    const auto encoders = fit_encoders(table, schema, target, d.parsed_policy());
    const auto [X, y] = assemble(table, schema, encoders, target);
    const auto names = pipeline::class_names_for(target, schema, encoders);

    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& bytes) {
        pipeline::Workspace::write_bytes(fs::path(out_dir) / name, bytes);
        files.push_back(name);
    };
    put("class_distribution.svg", class_distribution_svg(class_distribution(y), names));
    for (std::size_t j = 0; j < X.cols(); ++j) {
        std::vector<double> values;
        const auto& col = table.schema.column(X.names[j]);
        if (col.kind == ColumnKind::text) {
            values = X.column(j);
        } else {
            const auto idx = table.schema.index_of(X.names[j]);
            for (const auto& r : table.rows) values.push_back(as_real(r[idx]));
        }
        const auto h = histogram(values, bins, X.names[j]);
        const auto base = "hist_" + pipeline::detail::safe_file_part(X.names[j]);
        put(base + ".csv", histogram_csv(h));
        put(base + ".svg", histogram_svg(h));
    }
    const auto C = pearson(X);
    put("correlation.csv", correlation_csv(C));
    put("correlation.svg", correlation_svg(C));
    const auto sel = drop_correlated(C, threshold);

    if (ctx.json_mode) {
        json dropped = json::array();
        for (const auto& x : sel.dropped) dropped.push_back({{"name", x.name}, {"partner", x.partner}, {"r", x.r}});
        ctx.emit({{"command", "eda"},
                  {"out", out_dir},
                  {"files", files},
                  {"correlation", {{"names", C.names}, {"r", C.r}, {"degenerate", C.degenerate}}},
                  {"threshold", threshold},
                  {"kept", sel.kept},
                  {"dropped", dropped}});
        return 0;
    }
    ctx.out << "wrote " << files.size() << " files to " << out_dir << '\n';
    for (const auto& f : files) ctx.out << "  " << f << '\n';
    ctx.out << "correlation (Pearson r):\n";
    for (std::size_t i = 0; i < C.size(); ++i) {
        ctx.out << "  " << flowguard::detail::pad_right(C.names[i], 14);
        for (std::size_t j = 0; j < C.size(); ++j) ctx.out << flowguard::detail::pad_left(text::format_fixed(C.r[i][j], 3), 8);
        ctx.out << '\n';
    }
    if (sel.dropped.empty()) {
        ctx.out << "no pair reaches |r| >= " << text::format_real(threshold) << "; all features kept\n";
    } else {
        for (const auto& x : sel.dropped)
            ctx.out << "drop " << x.name << " (r = " << text::format_fixed(x.r, 3) << " with " << x.partner << ")\n";
    }
    return 0;
}

inline int cmd_split(const Context& ctx, const std::string& csv_path, const DataOptions& d, double fraction,
                     std::uint64_t seed, const std::string& out_file) {
    const auto schema = d.load_schema_or_default();
    const auto table = load_flow_csv(csv_path, schema, d.parsed_policy());
    const auto target = d.parsed_target();
    const auto encoders = fit_encoders(table, schema, target, d.parsed_policy());
    const auto [X, y] = assemble(table, schema, encoders, target);
    const auto split = stratified_split(y, fraction, seed);
    if (!out_file.empty()) pipeline::Workspace::write_bytes(out_file, split_to_json(split).dump(2) + "\n");
    const auto train = class_distribution(y.take(split.train));
    const auto test = class_distribution(y.take(split.test));

    if (ctx.json_mode) {
        json per = json::array();
        for (auto c : y.classes) {
            auto get = [&](const auto& m) { return m.count(c) ? m.at(c) : std::size_t{0}; };
            per.push_back({{"class", c}, {"train", get(train)}, {"test", get(test)}});
        }
        json j{{"command", "split"},
               {"seed", seed},
               {"test_fraction", fraction},
               {"train_rows", split.train.size()},
               {"test_rows", split.test.size()},
               {"per_class", per}};
        if (!out_file.empty()) j["out"] = out_file;
        ctx.emit(j);
        return 0;
    }
    ctx.out << "train " << split.train.size() << " / test " << split.test.size() << " (seed " << seed
            << ", test fraction " << text::format_real(fraction) << ")\n";
    for (auto c : y.classes) {
        auto get = [&](const auto& m) { return m.count(c) ? m.at(c) : std::size_t{0}; };
        ctx.out << "  class " << c << ": train " << get(train) << ", test " << get(test) << '\n';
    }
    if (!out_file.empty()) ctx.out << "indices written to " << out_file << '\n';
    return 0;
}

inline int cmd_train(const Context& ctx, const RunFlags& flags, const std::vector<std::string>& models) {
    auto config = flags.resolve();
    config.models = pipeline::parse_model_list(models);
    const auto summary =
        pipeline::run_pipeline(pipeline::Workspace(config.workspace), config, {false, ctx.stable});
    const pipeline::Workspace ws(config.workspace);
    if (ctx.json_mode) {
        json out = json::array();
        for (const auto& m : summary.models)
            out.push_back({{"algorithm", m.algorithm},
                           {"name", m.name},
                           {"model_file", ws.path(pipeline::Stage::models, m.model_file).generic_string()},
                           {"train_accuracy", m.train_accuracy},
                           {"test_accuracy", m.report.accuracy}});
        ctx.emit({{"command", "train"},
                  {"workspace", config.workspace.generic_string()},
                  {"config_hash", summary.config_hash},
                  {"models", out}});
        return 0;
    }
    for (const auto& m : summary.models)
        ctx.out << flowguard::detail::pad_right(m.name, 34) << "train accuracy " << text::format_fixed(m.train_accuracy, 4)
                << "  -> " << ws.path(pipeline::Stage::models, m.model_file).generic_string() << '\n';
    ctx.out << "results in " << ws.dir(pipeline::Stage::results).generic_string() << "; run `compare` to see the table\n";
    return 0;
}

inline int cmd_evaluate(const Context& ctx, const std::string& model_file, const std::string& csv_path,
                        const DataOptions& d) {
    const auto model = load_model(model_file);
    FlowSchema schema = d.load_schema_or_default();
    schema.feature_columns = model.feature_names;
    schema.encoded_columns.clear();
    for (const auto& f : model.feature_names)
        if (find_encoder(model.encoders, f)) schema.encoded_columns.push_back(f);
    auto encoders = model.encoders;
    for (auto& e : encoders)
        if (std::find(model.feature_names.begin(), model.feature_names.end(), e.column()) != model.feature_names.end())
            e.set_policy(d.parsed_policy());
    const auto table = load_flow_csv(csv_path, schema, d.parsed_policy());
    const auto [X, y] = assemble(table, schema, encoders, model.target);
    const auto pred = predict(model, X);
    std::vector<ClassCode> classes = model.classes;
    for (auto c : y.classes)
        if (!std::binary_search(classes.begin(), classes.end(), c)) classes.insert(std::upper_bound(classes.begin(), classes.end(), c), c);
    const auto report = evaluate(y.values, pred, classes, display_name(model.algorithm()));
    if (ctx.json_mode) {
        ctx.emit({{"command", "evaluate"}, {"rows", y.size()}, {"report", report_to_json(report)}});
        return 0;
    }
    ctx.out << render_report(report, model.class_names);
    return 0;
}

inline int cmd_compare(const Context& ctx, const fs::path& root) {
    const auto ws = open_workspace(root);
    const auto path = ws.path(pipeline::Stage::results, "comparison.json");
    if (!fs::exists(path) || !ws.manifest(pipeline::Stage::results).find("comparison.json"))
        throw MissingResults("no comparison in " + ws.dir(pipeline::Stage::results).string() + "; train models first");
    ComparisonTable table;
    try {
        const auto j = json::parse(pipeline::Workspace::read_bytes(path));
        for (const auto& r : j.at("rows"))
            table.rows.push_back({r.at("model").get<std::string>(), r.at("accuracy").get<double>(),
                                  r.at("precision").get<double>(), r.at("recall").get<double>(),
                                  r.at("f1").get<double>()});
    } catch (const json::exception& e) {
        throw MissingResults(std::string("comparison file is malformed: ") + e.what());
    }
    if (ctx.json_mode) {
        auto j = comparison_to_json(table);
        j["command"] = "compare";
        ctx.emit(j);
        return 0;
    }
    ctx.out << render_comparison(table);
    return 0;
}

inline int cmd_query(const Context& ctx, const std::string& expr_text, const std::string& csv_path,
                     const std::string& ws_root, const std::string& stage_name, std::string table_file,
                     const std::vector<std::string>& select) {
    const auto expr = pipeline::parse_query(expr_text);
    pipeline::QueryResult result;
    if (!csv_path.empty()) {
        result = pipeline::eval_query(pipeline::load_any_csv(csv_path), expr, select);
    } else {
        const auto ws = open_workspace(ws_root.empty() ? "workspace" : ws_root);
        const auto stage = pipeline::stage_from_string(stage_name);
        if (table_file.empty()) {
            for (const auto& e : ws.manifest(stage).entries)
                if (e.file.size() > 4 && e.file.ends_with(".csv")) {
                    table_file = e.file;
                    break;
                }
            if (table_file.empty()) throw MissingResults("no CSV table recorded in stage " + stage_name);
        }
        result = pipeline::eval_query(ws, stage, table_file, expr, select);
    }
    if (ctx.json_mode) {
        json cols = json::array(), rows = json::array();
        for (const auto& c : result.table.schema.columns) cols.push_back(c.name);
        for (const auto& r : result.table.rows) {
            json row = json::array();
            for (const auto& v : r) row.push_back(value_to_json(v));
            rows.push_back(row);
        }
        ctx.emit({{"command", "query"},
                  {"query", pipeline::render(expr)},
                  {"count", result.count},
                  {"columns", cols},
                  {"rows", rows}});
        return 0;
    }
    write_flow_csv(ctx.out, result.table);
    ctx.info(std::to_string(result.count) + (result.count == 1 ? " row" : " rows") + " matched");
    return 0;
}

inline int cmd_run(const Context& ctx, const RunFlags& flags, bool reuse) {
    const auto config = flags.resolve();
    const auto summary =
        pipeline::run_pipeline(pipeline::Workspace(config.workspace), config, {reuse, ctx.stable});
    const pipeline::Workspace ws(config.workspace);
    const auto report = ws.path(pipeline::Stage::report, pipeline::report_file).generic_string();
    const bool reused = std::none_of(summary.steps.begin(), summary.steps.end(),
                                     [](const pipeline::StepRecord& s) { return s.status == "ran"; });
    if (ctx.json_mode) {
        ctx.emit({{"command", "run"},
                  {"workspace", config.workspace.generic_string()},
                  {"report", report},
                  {"reused", reused},
                  {"summary", pipeline::summary_to_json(summary)}});
        return 0;
    }
    if (reused)
        ctx.out << "workspace already holds this run (config " << summary.config_hash.substr(0, 12)
                << "); all steps skipped\n";
    ctx.out << render_comparison(summary.comparison) << "report: " << report << '\n';
    return 0;
}

inline int cmd_report(const Context& ctx, const fs::path& root) {
    const auto ws = open_workspace(root);
    const auto path = pipeline::emit_report(
        ws, ctx.stable ? std::string(pipeline::stable_timestamp) : pipeline::utc_timestamp());
    if (ctx.json_mode) {
        ctx.emit({{"command", "report"}, {"report", path.generic_string()}});
        return 0;
    }
    ctx.out << "report: " << path.generic_string() << '\n';
    return 0;
}

inline int cmd_synth(const Context& ctx, std::size_t rows, double attack_fraction, std::uint64_t seed,
                     const std::string& out_file) {
    const auto table = pipeline::generate_synthetic(rows, {1.0 - attack_fraction, attack_fraction}, seed);
    std::size_t attacks = 0;
    const auto label = table.schema.index_of("Label");
    for (const auto& r : table.rows) attacks += std::get<std::int64_t>(r[label]) == 1;
    if (out_file.empty()) {
        if (ctx.json_mode) throw InvalidArgument("--json needs --out for synth (the CSV would share stdout)");
        write_flow_csv(ctx.out, table);
        return 0;
    }
    write_flow_csv(fs::path(out_file), table);
    if (ctx.json_mode) {
        ctx.emit({{"command", "synth"},
                  {"out", out_file},
                  {"rows", rows},
                  {"seed", seed},
                  {"class_counts", {{"normal", rows - attacks}, {"attack", attacks}}}});
        return 0;
    }
    ctx.out << "wrote " << rows << " rows (" << rows - attacks << " normal, " << attacks << " attack) to " << out_file
            << '\n';
    return 0;
}

inline bool want_color(const std::ostream& err) {
    if (std::getenv("NO_COLOR")) return false;
    return &err == &std::cerr && ::isatty(STDERR_FILENO);
}

inline void report_error(const Context& ctx, const Error& e, const std::string& query_text) {
    if (ctx.json_mode) {
        json j{{"status", "error"}, {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
            j["error"]["position"] = s->position();
            j["error"]["expected"] = s->expected();
        }
        if (const auto* s = dynamic_cast<const StepError*>(&e)) j["error"]["step"] = s->step();
        if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
            j["error"]["row"] = p->row();
            j["error"]["column"] = p->column();
        }
        ctx.out << j.dump(2) << '\n';
        return;
    }
    const char* red = ctx.color ? "\x1b[31m" : "";
    const char* reset = ctx.color ? "\x1b[0m" : "";
    ctx.err << red << "error" << reset << " [" << e.kind() << "]: " << e.what() << '\n';
    if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
        ctx.err << "  " << query_text << '\n' << "  " << std::string(s->position(), ' ') << red << '^' << reset << '\n';
    }
}

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    using namespace detail;
    Context ctx{out, err};
    ctx.color = want_color(err);
    for (const auto& a : args) ctx.json_mode = ctx.json_mode || a == "--json";

    CLI::App app{"Network-flow anomaly detection toolkit", "flowguard"};
    app.fallthrough();
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.add_flag("--json", ctx.json_mode, "Print one JSON document with a \"status\" field");
    app.add_flag("--stable", ctx.stable, "Fixed timestamps for byte-reproducible output");

    DataOptions data;
    std::string csv_path;

    auto* inspect = app.add_subcommand("inspect", "Show the schema and class distribution of a flow CSV");
    inspect->add_option("csv", csv_path, "Flow CSV")->required()->check(CLI::ExistingFile);
    data.attach(inspect);

    std::string out_dir = "eda";
    std::size_t bins = default_histogram_bins;
    double threshold = default_correlation_threshold;
    auto* eda = app.add_subcommand("eda", "Write histograms and the correlation heatmap for a flow CSV");
    eda->add_option("csv", csv_path, "Flow CSV")->required()->check(CLI::ExistingFile);
    eda->add_option("--out", out_dir, "Output directory")->capture_default_str();
    eda->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
    eda->add_option("--threshold", threshold, "Correlation threshold for dropping features")
        ->check(CLI::Range(0.0, 1.0));
    data.attach(eda);

    double fraction = default_test_fraction;
    std::uint64_t seed = 7;
    std::string out_file;
    auto* split = app.add_subcommand("split", "Stratified train/test split of a flow CSV");
    split->add_option("csv", csv_path, "Flow CSV")->required()->check(CLI::ExistingFile);
    split->add_option("--test-fraction", fraction, "Share of each class held out")->check(CLI::Range(0.0, 1.0));
    split->add_option("--seed", seed, "Split seed");
    split->add_option("--out", out_file, "Write the index lists as JSON");
    data.attach(split);

    RunFlags run_flags;
    std::vector<std::string> models{"all"};
    auto* train = app.add_subcommand("train", "Run the pipeline for the chosen model families");
    train->add_option("--model", models, "nb, knn, rf, ada, tree or all")
        ->check(CLI::IsMember({"nb", "knn", "rf", "ada", "tree", "all"}));
    run_flags.attach(train);

    std::string model_file;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a saved model on a labelled flow CSV");
    evaluate_cmd->add_option("--model-file", model_file, "Saved model JSON")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--csv", csv_path, "Labelled flow CSV")->required()->check(CLI::ExistingFile);
    data.attach(evaluate_cmd);

    std::string ws_root, config_for_ws;
    auto* compare_cmd = app.add_subcommand("compare", "Print the model comparison table of a workspace");
    compare_cmd->add_option("workspace,--workspace", ws_root, "Workspace root (default ./workspace)");
    compare_cmd->add_option("--config", config_for_ws, "Use the workspace named in this config")
        ->check(CLI::ExistingFile);

    std::string expr_text, stage_name = "curated", table_file;
    std::vector<std::string> select;
    auto* query = app.add_subcommand("query", "Filter a table with a small boolean expression language");
    query->add_option("expr", expr_text, "Expression, e.g. \"Label == 1 AND L4_DST_PORT < 1024\"")->required();
    auto* q_csv = query->add_option("--csv", csv_path, "Query a CSV file directly")->check(CLI::ExistingFile);
    auto* q_ws = query->add_option("--workspace", ws_root, "Workspace root (default ./workspace)");
    query->add_option("--stage", stage_name, "Workspace stage")->capture_default_str()
        ->check(CLI::IsMember({"raw", "curated", "models", "results", "report"}));
    query->add_option("--table", table_file, "File in the stage manifest (default: first CSV)");
    query->add_option("--select", select, "Columns to keep")->delimiter(',');
    q_csv->excludes(q_ws);

    bool reuse = false;
    auto* run = app.add_subcommand("run", "Run the whole pipeline from a config");
    run_flags.attach(run);
    run->add_flag("--reuse", reuse, "Skip all steps when the workspace already holds this run");

    auto* report = app.add_subcommand("report", "Re-emit report/index.html from a workspace's results");
    report->add_option("workspace,--workspace", ws_root, "Workspace root (default ./workspace)");
    report->add_option("--config", config_for_ws, "Use the workspace named in this config")->check(CLI::ExistingFile);

    std::size_t rows = 1000;
    double attack_fraction = 0.1;
    auto* synth = app.add_subcommand("synth", "Write the seeded synthetic flow fixture");
    synth->add_option("--rows", rows, "Number of rows")->check(CLI::PositiveNumber);
    synth->add_option("--attack-fraction", attack_fraction, "Share of attack rows")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--out", out_file, "Output CSV (default: standard output)");

    std::vector<const char*> argv{"flowguard"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (ctx.json_mode)
            out << json{{"status", "error"}, {"error", {{"kind", "UsageError"}, {"message", e.what()}}}}.dump(2)
                << '\n';
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*inspect) return cmd_inspect(ctx, csv_path, data);
        if (*eda) return cmd_eda(ctx, csv_path, data, out_dir, bins, threshold);
        if (*split) return cmd_split(ctx, csv_path, data, fraction, seed, out_file);
        if (*train) return cmd_train(ctx, run_flags, models);
        if (*evaluate_cmd) return cmd_evaluate(ctx, model_file, csv_path, data);
        if (*compare_cmd) return cmd_compare(ctx, workspace_root(ws_root, config_for_ws));
        if (*query) return cmd_query(ctx, expr_text, csv_path, ws_root, stage_name, table_file, select);
        if (*run) return cmd_run(ctx, run_flags, reuse);
        if (*report) return cmd_report(ctx, workspace_root(ws_root, config_for_ws));
        if (*synth) return cmd_synth(ctx, rows, attack_fraction, seed, out_file);
    } catch (const Error& e) {
        report_error(ctx, e, expr_text);
        return e.kind() == "InternalError" ? 2 : 1;
    } catch (const std::exception& e) {
        report_error(ctx, Error("InternalError", e.what()), expr_text);
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace flowguard::cli
