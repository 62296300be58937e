#pragma once

// Flow-record ingestion: schema description, RFC-4180 CSV loading, dense
// label encoding and assembly of numeric design matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/text.hpp"

namespace flowguard {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Values and schema

enum class ColumnKind { integer, real, text };

inline std::string to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::integer: return "integer";
        case ColumnKind::real: return "real";
        case ColumnKind::text: return "text";
    }
    return "text";
}

inline ColumnKind column_kind_from_string(std::string_view s) {
    if (s == "integer") return ColumnKind::integer;
    if (s == "real") return ColumnKind::real;
    if (s == "text") return ColumnKind::text;
    throw SchemaError("unknown column kind '" + std::string(s) + "'");
}

/// One cell. The alternative held always matches the column's kind.
using Value = std::variant<std::int64_t, double, std::string>;

inline bool is_numeric(const Value& v) { return !std::holds_alternative<std::string>(v); }

inline double as_real(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw TypeMismatch("text value used where a number is required");
}

/// Numbers order numerically, text lexicographically, numbers before text.
struct ValueLess {
    bool operator()(const Value& a, const Value& b) const {
        const bool an = is_numeric(a), bn = is_numeric(b);
        if (an && bn) {
            const double x = as_real(a), y = as_real(b);
            if (x != y) return x < y;
            // 3 and 3.0 are distinct raw values; keep the order total.
            return a.index() < b.index();
        }
        if (an != bn) return an;
        return std::get<std::string>(a) < std::get<std::string>(b);
    }
};

inline std::string format_value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) return text::format_real(*d);
    return std::get<std::string>(v);
}

inline Json value_to_json(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

inline Value value_from_json(const Json& j, ColumnKind kind) {
    switch (kind) {
        case ColumnKind::integer: return j.get<std::int64_t>();
        case ColumnKind::real: return j.get<double>();
        case ColumnKind::text: return j.get<std::string>();
    }
    return j.get<std::string>();
}

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::text;

    bool operator==(const Column&) const = default;
};

struct FlowSchema {
    std::vector<Column> columns;
    std::vector<std::string> feature_columns;
    std::string label_column;
    std::optional<std::string> attack_column;
    /// Feature columns that go through a label encoder before assembly.
    /// Text features must be listed here.
    std::vector<std::string> encoded_columns;

    bool operator==(const FlowSchema&) const = default;

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view name) const {
        if (auto i = find(name)) return *i;
        throw UnknownColumn("unknown column '" + std::string(name) + "'");
    }

    const Column& column(std::string_view name) const { return columns[index_of(name)]; }

    bool is_encoded(std::string_view name) const {
        return std::find(encoded_columns.begin(), encoded_columns.end(), name) != encoded_columns.end();
    }

    void validate() const {
        std::set<std::string> seen;
        for (const auto& c : columns)
            if (!seen.insert(c.name).second) throw SchemaError("duplicate column '" + c.name + "'");
        auto require = [&](const std::string& name, const char* role) {
            if (!seen.count(name))
                throw SchemaError(std::string(role) + " column '" + name + "' is not declared");
        };
        for (const auto& f : feature_columns) require(f, "feature");
        require(label_column, "label");
        if (attack_column) require(*attack_column, "attack");
        for (const auto& e : encoded_columns) require(e, "encoded");
        for (const auto& f : feature_columns)
            if (column(f).kind == ColumnKind::text && !is_encoded(f))
                throw SchemaError("text feature '" + f + "' must be encoded");
    }
};

/// NetFlow-variant UNSW-NB15 columns with the three selected features, all
/// label-encoded. Other columns in the file (addresses, byte counts) are
/// ignored on load.
inline FlowSchema default_schema() {
    FlowSchema s;
    s.columns = {{"L4_DST_PORT", ColumnKind::integer},
                 {"L7_PROTO", ColumnKind::real},
                 {"TCP_FLAGS", ColumnKind::integer},
                 {"Label", ColumnKind::integer},
                 {"Attack", ColumnKind::text}};
    s.feature_columns = {"L4_DST_PORT", "L7_PROTO", "TCP_FLAGS"};
    s.label_column = "Label";
    s.attack_column = "Attack";
    s.encoded_columns = s.feature_columns;
    return s;
}

inline Json schema_to_json(const FlowSchema& s) {
    Json cols = Json::array();
    for (const auto& c : s.columns) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    Json j = {{"columns", cols},
              {"features", s.feature_columns},
              {"label", s.label_column},
              {"encode", s.encoded_columns}};
    j["attack"] = s.attack_column ? Json(*s.attack_column) : Json(nullptr);
    return j;
}

/// Schema file keys: columns, features, label, attack (optional/null) and
/// encode (optional; defaults to every feature column).
inline FlowSchema schema_from_json(const Json& j) {
    try {
        FlowSchema s;
        for (const auto& c : j.at("columns"))
            s.columns.push_back({c.at("name").get<std::string>(),
                                 column_kind_from_string(c.value("kind", std::string("text")))});
        s.feature_columns = j.at("features").get<std::vector<std::string>>();
        s.label_column = j.at("label").get<std::string>();
        if (j.contains("attack") && !j["attack"].is_null()) s.attack_column = j["attack"].get<std::string>();
        s.encoded_columns = j.contains("encode") ? j["encode"].get<std::vector<std::string>>() : s.feature_columns;
        s.validate();
        return s;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("malformed schema: ") + e.what());
    }
}

inline FlowSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw SchemaError("schema " + path.string() + " is not valid JSON: " + e.what());
    }
    return schema_from_json(j);
}

// ---------------------------------------------------------------------------
// Record tables and CSV

enum class Policy { strict, lenient };

inline std::string to_string(Policy p) { return p == Policy::strict ? "strict" : "lenient"; }

using Row = std::vector<Value>;

struct RecordTable {
    FlowSchema schema;
    std::vector<Row> rows;
    /// Malformed rows dropped by a lenient load.
    std::size_t skipped_rows = 0;

    std::size_t row_count() const { return rows.size(); }

    std::vector<Value> column_values(std::string_view name) const {
        const auto idx = schema.index_of(name);
        std::vector<Value> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }

    bool operator==(const RecordTable& o) const { return schema == o.schema && rows == o.rows; }
};

namespace csv {

/// Reads one RFC-4180 record (quoted fields may span lines). Returns false at
/// end of input. `raw` receives the record text for diagnostics.
inline bool read_record(std::istream& in, std::vector<std::string>& fields, std::string& raw) {
    fields.clear();
    raw.clear();
    std::string field;
    bool in_quotes = false, any = false, field_quoted = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            raw += ch;
            if (ch == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    raw += static_cast<char>(in.get());
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '\n') break;
        if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        }
        raw += ch;
        if (ch == '"' && field.empty() && !field_quoted) {
            in_quotes = field_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_quoted = false;
        } else {
            field += ch;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline bool blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && text::trim(fields[0]).empty();
}

}  // namespace csv

inline std::optional<Value> parse_cell(std::string_view raw, ColumnKind kind) {
    switch (kind) {
        case ColumnKind::integer:
            if (auto v = text::parse_integer(raw)) return Value{static_cast<std::int64_t>(*v)};
            return std::nullopt;
        case ColumnKind::real:
            if (auto v = text::parse_real(raw)) return Value{*v};
            return std::nullopt;
        case ColumnKind::text:
            return Value{std::string(raw)};
    }
    return std::nullopt;
}

/// Loads the schema's columns from a CSV stream by header name; extra file
/// columns are ignored. Strict mode throws ParseError on the first bad row
/// (rows numbered from 1 after the header); lenient mode skips and counts.
inline RecordTable read_flow_csv(std::istream& in, const FlowSchema& schema, Policy policy = Policy::strict) {
    schema.validate();
    std::vector<std::string> fields;
    std::string raw;
    if (!csv::read_record(in, fields, raw) || csv::blank(fields))
        throw MissingHeader("input has no header line");
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < fields.size(); ++i) header.emplace(std::string(text::trim(fields[i])), i);
    std::vector<std::size_t> source(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        auto it = header.find(schema.columns[c].name);
        if (it == header.end()) throw MissingColumn("column '" + schema.columns[c].name + "' not in header");
        source[c] = it->second;
    }

    RecordTable table{schema, {}, 0};
    std::size_t row_no = 0;
    while (csv::read_record(in, fields, raw)) {
        if (csv::blank(fields)) continue;
        ++row_no;
        Row row;
        row.reserve(schema.columns.size());
        bool ok = true;
        for (std::size_t c = 0; c < schema.columns.size() && ok; ++c) {
            const auto& col = schema.columns[c];
            if (source[c] >= fields.size()) {
                if (policy == Policy::strict) throw ParseError(row_no, col.name, raw);
                ok = false;
                break;
            }
            auto v = parse_cell(fields[source[c]], col.kind);
            if (!v) {
                if (policy == Policy::strict) throw ParseError(row_no, col.name, fields[source[c]]);
                ok = false;
                break;
            }
            row.push_back(std::move(*v));
        }
        if (ok)
            table.rows.push_back(std::move(row));
        else
            ++table.skipped_rows;
    }
    return table;
}

inline RecordTable load_flow_csv(const std::filesystem::path& path, const FlowSchema& schema,
                                 Policy policy = Policy::strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_flow_csv(in, schema, policy);
}

inline void write_flow_csv(std::ostream& out, const RecordTable& table) {
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c)
        out << (c ? "," : "") << csv::quote(table.schema.columns[c].name);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv::quote(format_value(row[c]));
        out << '\n';
    }
}

inline void write_flow_csv(const std::filesystem::path& path, const RecordTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_flow_csv(out, table);
}

// ---------------------------------------------------------------------------
// Label encoding

/// Dense codes 0..n-1 assigned in ascending raw-value order.
class EncoderMap {
public:
    using Code = std::int64_t;

    EncoderMap() = default;

    EncoderMap(std::string column, ColumnKind kind, std::vector<Value> categories, Policy policy)
        : column_(std::move(column)), kind_(kind), policy_(policy) {
        std::sort(categories.begin(), categories.end(), ValueLess{});
        categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
        categories_ = std::move(categories);
        for (std::size_t i = 0; i < categories_.size(); ++i)
            codes_.emplace(categories_[i], static_cast<Code>(i));
    }

    const std::string& column() const { return column_; }
    ColumnKind kind() const { return kind_; }
    Policy policy() const { return policy_; }
    std::size_t size() const { return categories_.size(); }
    /// Raw values in code order.
    const std::vector<Value>& categories() const { return categories_; }

    void set_policy(Policy p) { policy_ = p; }

    Code code_of(const Value& raw) const {
        auto it = codes_.find(raw);
        if (it != codes_.end()) return it->second;
        if (policy_ == Policy::lenient) return static_cast<Code>(categories_.size());
        throw UnseenValue("value '" + format_value(raw) + "' was not seen when fitting encoder for '" +
                          column_ + "'");
    }

    std::vector<Code> encode(std::span<const Value> values) const {
        std::vector<Code> out;
        out.reserve(values.size());
        for (const auto& v : values) out.push_back(code_of(v));
        return out;
    }

    const Value& decode(Code code) const {
        if (code < 0 || static_cast<std::size_t>(code) >= categories_.size())
            throw InvalidArgument("code " + std::to_string(code) + " outside encoder for '" + column_ + "'");
        return categories_[static_cast<std::size_t>(code)];
    }

    std::map<Value, Code, ValueLess> mapping() const { return codes_; }

    bool operator==(const EncoderMap& o) const {
        return column_ == o.column_ && kind_ == o.kind_ && policy_ == o.policy_ && categories_ == o.categories_;
    }

private:
    std::string column_;
    ColumnKind kind_ = ColumnKind::text;
    Policy policy_ = Policy::strict;
    std::vector<Value> categories_;
    std::map<Value, Code, ValueLess> codes_;
};

inline EncoderMap fit_encoder(const RecordTable& table, std::string_view column, Policy policy = Policy::strict) {
    const auto idx = table.schema.index_of(column);
    std::vector<Value> values;
    values.reserve(table.rows.size());
    for (const auto& r : table.rows) values.push_back(r[idx]);
    return EncoderMap(std::string(column), table.schema.columns[idx].kind, std::move(values), policy);
}

inline EncoderMap::Code encode_one(const EncoderMap& map, const Value& v) { return map.code_of(v); }

inline std::vector<EncoderMap::Code> encode(const EncoderMap& map, std::span<const Value> values) {
    return map.encode(values);
}

inline Json encoder_to_json(const EncoderMap& e) {
    Json cats = Json::array();
    for (const auto& v : e.categories()) cats.push_back(value_to_json(v));
    return {{"column", e.column()}, {"kind", to_string(e.kind())}, {"policy", to_string(e.policy())},
            {"categories", cats}};
}

inline EncoderMap encoder_from_json(const Json& j) {
    const auto kind = column_kind_from_string(j.at("kind").get<std::string>());
    std::vector<Value> cats;
    for (const auto& c : j.at("categories")) cats.push_back(value_from_json(c, kind));
    const auto policy = j.value("policy", std::string("strict")) == "lenient" ? Policy::lenient : Policy::strict;
    return EncoderMap(j.at("column").get<std::string>(), kind, std::move(cats), policy);
}

// ---------------------------------------------------------------------------
// Design matrices

/// Row-major dense matrix with named columns.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::size_t rows = 0;
    std::vector<double> values;

    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> n, std::size_t r)
        : names(std::move(n)), rows(r), values(r * names.size(), 0.0) {}

    std::size_t cols() const { return names.size(); }
    double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols(), cols()}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * cols(), cols()}; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
        return out;
    }

    void append_row(std::span<const double> r) {
        values.insert(values.end(), r.begin(), r.end());
        ++rows;
    }

    /// Rows in the given order (duplicates allowed).
    FeatureMatrix take(std::span<const std::size_t> idx) const {
        FeatureMatrix out(names, 0);
        out.values.reserve(idx.size() * cols());
        for (auto i : idx) out.append_row(row(i));
        return out;
    }

    /// Keeps only the named columns, in the order given.
    FeatureMatrix select(std::span<const std::string> keep) const {
        std::vector<std::size_t> src;
        for (const auto& k : keep) {
            auto it = std::find(names.begin(), names.end(), k);
            if (it == names.end()) throw UnknownColumn("no feature '" + k + "'");
            src.push_back(static_cast<std::size_t>(it - names.begin()));
        }
        FeatureMatrix out({keep.begin(), keep.end()}, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < src.size(); ++j) out.at(i, j) = at(i, src[j]);
        return out;
    }

    bool operator==(const FeatureMatrix&) const = default;
};

enum class LabelSemantics { binary_label, attack_category };

inline std::string to_string(LabelSemantics s) {
    return s == LabelSemantics::binary_label ? "binary_label" : "attack_category";
}

inline LabelSemantics label_semantics_from_string(std::string_view s) {
    if (s == "binary_label" || s == "binary" || s == "label") return LabelSemantics::binary_label;
    if (s == "attack_category" || s == "attack") return LabelSemantics::attack_category;
    throw ConfigError("unknown target '" + std::string(s) + "'");
}

using ClassCode = int;

struct LabelVector {
    std::vector<ClassCode> values;
    std::vector<ClassCode> classes;  // sorted, distinct
    LabelSemantics semantics = LabelSemantics::binary_label;

    std::size_t size() const { return values.size(); }

    static LabelVector from_values(std::vector<ClassCode> v, LabelSemantics s = LabelSemantics::binary_label) {
        LabelVector y{std::move(v), {}, s};
        y.refresh_classes();
        return y;
    }

    void refresh_classes() {
        classes = values;
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    }

    LabelVector take(std::span<const std::size_t> idx) const {
        std::vector<ClassCode> v;
        v.reserve(idx.size());
        for (auto i : idx) v.push_back(values[i]);
        return from_values(std::move(v), semantics);
    }

    bool operator==(const LabelVector&) const = default;
};

inline const EncoderMap* find_encoder(std::span<const EncoderMap> encoders, std::string_view column) {
    for (const auto& e : encoders)
        if (e.column() == column) return &e;
    return nullptr;
}

/// Builds the numeric matrix (columns in schema feature order) and the aligned
/// label vector. Only schema.feature_columns are emitted, so address columns
/// never reach a learner unless a schema explicitly lists them.
inline std::pair<FeatureMatrix, LabelVector> assemble(const RecordTable& table, const FlowSchema& schema,
                                                      std::span<const EncoderMap> encoders,
                                                      LabelSemantics target) {
    const std::size_t d = schema.feature_columns.size();
    std::vector<std::size_t> src(d);
    std::vector<const EncoderMap*> enc(d, nullptr);
    for (std::size_t j = 0; j < d; ++j) {
        const auto& name = schema.feature_columns[j];
        src[j] = table.schema.index_of(name);
        if (schema.is_encoded(name) || table.schema.columns[src[j]].kind == ColumnKind::text) {
            enc[j] = find_encoder(encoders, name);
            if (!enc[j]) throw EncoderMissing("no encoder for feature '" + name + "'");
        }
    }

    std::string target_col;
    if (target == LabelSemantics::binary_label) {
        target_col = schema.label_column;
    } else {
        if (!schema.attack_column) throw SchemaError("schema has no attack column");
        target_col = *schema.attack_column;
    }
    const auto target_idx = table.schema.index_of(target_col);
    const EncoderMap* target_enc = nullptr;
    if (target == LabelSemantics::attack_category || table.schema.columns[target_idx].kind == ColumnKind::text) {
        target_enc = find_encoder(encoders, target_col);
        if (!target_enc) throw EncoderMissing("no encoder for target '" + target_col + "'");
    }

    FeatureMatrix X(schema.feature_columns, table.rows.size());
    std::vector<ClassCode> labels;
    labels.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        for (std::size_t j = 0; j < d; ++j)
            X.at(i, j) = enc[j] ? static_cast<double>(enc[j]->code_of(row[src[j]])) : as_real(row[src[j]]);
        const auto& t = row[target_idx];
        ClassCode code;
        if (target_enc) {
            code = static_cast<ClassCode>(target_enc->code_of(t));
        } else {
            const double v = as_real(t);
            code = static_cast<ClassCode>(v);
            if (static_cast<double>(code) != v)
                throw ParseError(i + 1, target_col, format_value(t));
        }
        if (target == LabelSemantics::binary_label && code != 0 && code != 1)
            throw ParseError(i + 1, target_col, format_value(t));
        labels.push_back(code);
    }
    return {std::move(X), LabelVector::from_values(std::move(labels), target)};
}

/// Fits one encoder per encoded feature plus the attack column when the
/// target needs it.
inline std::vector<EncoderMap> fit_encoders(const RecordTable& table, const FlowSchema& schema,
                                            LabelSemantics target, Policy policy = Policy::strict) {
    std::vector<EncoderMap> out;
    for (const auto& f : schema.feature_columns)
        if (schema.is_encoded(f) || table.schema.column(f).kind == ColumnKind::text)
            out.push_back(fit_encoder(table, f, policy));
    const std::string& target_col = target == LabelSemantics::binary_label || !schema.attack_column
                                        ? schema.label_column
                                        : *schema.attack_column;
    if (target == LabelSemantics::attack_category || table.schema.column(target_col).kind == ColumnKind::text)
        out.push_back(fit_encoder(table, target_col, Policy::strict));
    return out;
}

// ---------------------------------------------------------------------------
// Optional standardisation, (x - mean) / std fitted on training rows only.

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const FeatureMatrix& X) {
        Standardizer s{std::vector<double>(X.cols(), 0.0), std::vector<double>(X.cols(), 1.0)};
        if (X.rows == 0) return s;
        const double n = static_cast<double>(X.rows);
        for (std::size_t j = 0; j < X.cols(); ++j) {
            double m = 0;
            for (std::size_t i = 0; i < X.rows; ++i) m += X.at(i, j);
            m /= n;
            double v = 0;
            for (std::size_t i = 0; i < X.rows; ++i) v += (X.at(i, j) - m) * (X.at(i, j) - m);
            v /= n;
            s.mean[j] = m;
            s.scale[j] = v > 0 ? std::sqrt(v) : 1.0;
        }
        return s;
    }

    FeatureMatrix apply(FeatureMatrix X) const {
        if (X.cols() != mean.size()) throw DimensionMismatch("standardizer width differs from matrix");
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols(); ++j) X.at(i, j) = (X.at(i, j) - mean[j]) / scale[j];
        return X;
    }

    bool operator==(const Standardizer&) const = default;
};

}  // namespace flowguard
