#pragma once

// A small filter language over record tables, in place of an interactive SQL
// service:
//
//   expr       := or_expr
//   or_expr    := and_expr ("OR" and_expr)*
//   and_expr   := not_expr ("AND" not_expr)*
//   not_expr   := "NOT" not_expr | primary
//   primary    := "(" expr ")" | comparison
//   comparison := column op literal
//   op         := "==" | "!=" | "<" | "<=" | ">" | ">="
//   literal    := number | 'single-quoted text' ('' escapes a quote)
//
// Keywords are case-insensitive. Binary operators associate to the left.

#include <cctype>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/pipeline/workspace.hpp"
#include "flowguard/text.hpp"

namespace flowguard::pipeline {

enum class CompareOp { eq, ne, lt, le, gt, ge };

inline std::string to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "==";
        case CompareOp::ne: return "!=";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "==";
}

struct Comparison {
    std::string column;
    CompareOp op = CompareOp::eq;
    Value literal;

    bool operator==(const Comparison&) const = default;
};

/// Immutable expression tree; children are shared between copies.
class QueryExpr {
public:
    enum class Kind { comparison, conjunction, disjunction, negation };

    static QueryExpr compare(std::string column, CompareOp op, Value literal) {
        QueryExpr e(Kind::comparison);
        e.cmp_ = {std::move(column), op, std::move(literal)};
        return e;
    }
    static QueryExpr both(QueryExpr l, QueryExpr r) { return binary(Kind::conjunction, std::move(l), std::move(r)); }
    static QueryExpr either(QueryExpr l, QueryExpr r) { return binary(Kind::disjunction, std::move(l), std::move(r)); }
    static QueryExpr negate(QueryExpr e) {
        QueryExpr out(Kind::negation);
        out.lhs_ = std::make_shared<const QueryExpr>(std::move(e));
        return out;
    }

    Kind kind() const { return kind_; }
    const Comparison& comparison() const { return cmp_; }
    const QueryExpr& lhs() const { return *lhs_; }
    const QueryExpr& rhs() const { return *rhs_; }
    const QueryExpr& operand() const { return *lhs_; }

    friend bool operator==(const QueryExpr& a, const QueryExpr& b) {
        if (a.kind_ != b.kind_) return false;
        switch (a.kind_) {
            case Kind::comparison: return a.cmp_ == b.cmp_;
            case Kind::negation: return *a.lhs_ == *b.lhs_;
            default: return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
        }
    }

private:
    explicit QueryExpr(Kind k) : kind_(k) {}
    static QueryExpr binary(Kind k, QueryExpr l, QueryExpr r) {
        QueryExpr out(k);
        out.lhs_ = std::make_shared<const QueryExpr>(std::move(l));
        out.rhs_ = std::make_shared<const QueryExpr>(std::move(r));
        return out;
    }

    Kind kind_;
    Comparison cmp_;
    std::shared_ptr<const QueryExpr> lhs_;
    std::shared_ptr<const QueryExpr> rhs_;
};

// ---------------------------------------------------------------------------
// Rendering (canonical text form; parse(render(e)) == e)

inline std::string render_literal(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) {
        std::string out = "'";
        for (char c : *s) {
            if (c == '\'') out += '\'';
            out += c;
        }
        return out + "'";
    }
    if (const auto* d = std::get_if<double>(&v)) {
        auto t = text::format_real(*d);
        if (t.find_first_of(".eE") == std::string::npos) t += ".0";
        return t;
    }
    return std::to_string(std::get<std::int64_t>(v));
}

inline std::string render(const QueryExpr& e) {
    switch (e.kind()) {
        case QueryExpr::Kind::comparison:
            return e.comparison().column + " " + to_string(e.comparison().op) + " " +
                   render_literal(e.comparison().literal);
        case QueryExpr::Kind::conjunction: return "(" + render(e.lhs()) + " AND " + render(e.rhs()) + ")";
        case QueryExpr::Kind::disjunction: return "(" + render(e.lhs()) + " OR " + render(e.rhs()) + ")";
        case QueryExpr::Kind::negation: return "NOT " + render(e.operand());
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class QueryParser {
public:
    explicit QueryParser(std::string_view text) : src_(text) {}

    QueryExpr parse() {
        auto e = parse_or();
        skip_space();
        if (pos_ < src_.size()) fail({"AND", "OR", "end of input"});
        return e;
    }

private:
    QueryExpr parse_or() {
        auto lhs = parse_and();
        while (keyword("OR")) lhs = QueryExpr::either(std::move(lhs), parse_and());
        return lhs;
    }

    QueryExpr parse_and() {
        auto lhs = parse_not();
        while (keyword("AND")) lhs = QueryExpr::both(std::move(lhs), parse_not());
        return lhs;
    }

    QueryExpr parse_not() {
        if (keyword("NOT")) return QueryExpr::negate(parse_not());
        return parse_primary();
    }

    QueryExpr parse_primary() {
        skip_space();
        if (peek() == '(') {
            ++pos_;
            auto e = parse_or();
            skip_space();
            if (peek() != ')') fail({"')'", "AND", "OR"});
            ++pos_;
            return e;
        }
        const std::size_t at = pos_;
        auto column = identifier();
        if (column.empty()) fail({"column name", "NOT", "'('"});
        if (is_keyword(column)) {
            pos_ = at;
            fail({"column name", "NOT", "'('"});
        }
        auto op = compare_op();
        auto lit = literal();
        return QueryExpr::compare(std::move(column), op, std::move(lit));
    }

    CompareOp compare_op() {
        skip_space();
        auto starts = [&](std::string_view s) { return src_.substr(pos_, s.size()) == s; };
        static constexpr std::pair<std::string_view, CompareOp> ops[] = {
            {"==", CompareOp::eq}, {"!=", CompareOp::ne}, {"<=", CompareOp::le},
            {">=", CompareOp::ge}, {"<", CompareOp::lt},  {">", CompareOp::gt}};
        for (const auto& [tok, op] : ops)
            if (starts(tok)) {
                pos_ += tok.size();
                return op;
            }
        fail({"'=='", "'!='", "'<'", "'<='", "'>'", "'>='"});
    }

    Value literal() {
        skip_space();
        if (peek() == '\'') {
            const std::size_t start = pos_++;
            std::string out;
            for (;;) {
                if (pos_ >= src_.size()) {
                    pos_ = start;
                    fail({"closing quote"});
                }
                const char c = src_[pos_++];
                if (c == '\'') {
                    if (peek() == '\'') {
                        out += '\'';
                        ++pos_;
                        continue;
                    }
                    return out;
                }
                out += c;
            }
        }
        const std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        bool digits = false, real = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
        if (peek() == '.') {
            real = true;
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
        }
        if (digits && (peek() == 'e' || peek() == 'E')) {
            const std::size_t save = pos_++;
            if (peek() == '-' || peek() == '+') ++pos_;
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                real = true;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        if (!digits || (pos_ < src_.size() && is_ident_char(src_[pos_]))) {
            pos_ = start;
            fail({"number", "quoted string"});
        }
        const auto tok = src_.substr(start, pos_ - start);
        if (!real) {
            if (auto v = text::parse_integer(tok)) return Value{static_cast<std::int64_t>(*v)};
            pos_ = start;
            fail({"integer in 64-bit range"});
        }
        if (auto v = text::parse_real(tok)) return Value{*v};
        pos_ = start;
        fail({"finite number"});
    }

    std::string identifier() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    bool keyword(std::string_view kw) {
        skip_space();
        const std::size_t save = pos_;
        auto word = identifier();
        if (text::to_lower(word) == text::to_lower(kw)) return true;
        pos_ = save;
        return false;
    }

    static bool is_keyword(std::string_view w) {
        const auto l = text::to_lower(w);
        return l == "and" || l == "or" || l == "not";
    }

    static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::size_t p = pos_;
        while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
        const std::string found = p >= src_.size() ? "end of input" : "'" + std::string(1, src_[p]) + "'";
        throw SyntaxError(p, std::move(expected), found);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline QueryExpr parse_query(std::string_view text) { return detail::QueryParser(text).parse(); }

// ---------------------------------------------------------------------------
// Binding and evaluation

/// Checks every referenced column exists and every literal suits its column.
inline void bind(const QueryExpr& e, const FlowSchema& schema) {
    switch (e.kind()) {
        case QueryExpr::Kind::comparison: {
            const auto& c = e.comparison();
            const auto idx = schema.find(c.column);
            if (!idx) throw UnknownColumn("unknown column '" + c.column + "'");
            const bool text_col = schema.columns[*idx].kind == ColumnKind::text;
            if (text_col != std::holds_alternative<std::string>(c.literal))
                throw TypeMismatch("column '" + c.column + "' is " + to_string(schema.columns[*idx].kind) +
                                   " but literal " + render_literal(c.literal) + " is not");
            return;
        }
        case QueryExpr::Kind::negation: bind(e.operand(), schema); return;
        default:
            bind(e.lhs(), schema);
            bind(e.rhs(), schema);
    }
}

namespace detail {

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
    switch (op) {
        case CompareOp::eq: return a == b;
        case CompareOp::ne: return a != b;
        case CompareOp::lt: return a < b;
        case CompareOp::le: return a <= b;
        case CompareOp::gt: return a > b;
        case CompareOp::ge: return a >= b;
    }
    return false;
}

}  // namespace detail

/// Evaluates a bound expression against one row of `schema`.
inline bool matches(const QueryExpr& e, const FlowSchema& schema, const Row& row) {
    switch (e.kind()) {
        case QueryExpr::Kind::comparison: {
            const auto& c = e.comparison();
            const auto& v = row[schema.index_of(c.column)];
            if (const auto* s = std::get_if<std::string>(&v))
                return detail::apply(c.op, *s, std::get<std::string>(c.literal));
            const auto* vi = std::get_if<std::int64_t>(&v);
            const auto* li = std::get_if<std::int64_t>(&c.literal);
            if (vi && li) return detail::apply(c.op, *vi, *li);
            return detail::apply(c.op, as_real(v), as_real(c.literal));
        }
        case QueryExpr::Kind::conjunction: return matches(e.lhs(), schema, row) && matches(e.rhs(), schema, row);
        case QueryExpr::Kind::disjunction: return matches(e.lhs(), schema, row) || matches(e.rhs(), schema, row);
        case QueryExpr::Kind::negation: return !matches(e.operand(), schema, row);
    }
    return false;
}

struct QueryResult {
    RecordTable table;
    std::size_t count = 0;
};

/// Rows satisfying `expr`, in input order, restricted to `projection` (all
/// columns when empty).
inline QueryResult eval_query(const RecordTable& table, const QueryExpr& expr,
                              const std::vector<std::string>& projection = {}) {
    bind(expr, table.schema);
    std::vector<std::size_t> keep;
    FlowSchema out_schema;
    if (projection.empty()) {
        out_schema = table.schema;
        for (std::size_t i = 0; i < table.schema.columns.size(); ++i) keep.push_back(i);
    } else {
        for (const auto& p : projection) {
            const auto idx = table.schema.index_of(p);
            keep.push_back(idx);
            out_schema.columns.push_back(table.schema.columns[idx]);
        }
        // A projection is a plain column list; label/feature roles only
        // survive when the projected columns still carry them.
        auto has = [&](const std::string& n) { return out_schema.find(n).has_value(); };
        for (const auto& f : table.schema.feature_columns)
            if (has(f)) out_schema.feature_columns.push_back(f);
        for (const auto& f : table.schema.encoded_columns)
            if (has(f)) out_schema.encoded_columns.push_back(f);
        out_schema.label_column = has(table.schema.label_column) ? table.schema.label_column : std::string{};
        if (table.schema.attack_column && has(*table.schema.attack_column))
            out_schema.attack_column = table.schema.attack_column;
    }
    QueryResult r{RecordTable{out_schema, {}, 0}, 0};
    for (const auto& row : table.rows) {
        if (!matches(expr, table.schema, row)) continue;
        Row out;
        out.reserve(keep.size());
        for (auto k : keep) out.push_back(row[k]);
        r.table.rows.push_back(std::move(out));
    }
    r.count = r.table.rows.size();
    return r;
}

/// Column kinds inferred from the data: integer when every cell parses as an
/// integer, real when every cell parses as a number, text otherwise.
inline FlowSchema infer_schema(std::istream& in) {
    std::vector<std::string> header, fields;
    std::string raw;
    if (!csv::read_record(in, header, raw) || csv::blank(header)) throw MissingHeader("input has no header line");
    std::vector<ColumnKind> kinds(header.size(), ColumnKind::integer);
    while (csv::read_record(in, fields, raw)) {
        if (csv::blank(fields)) continue;
        for (std::size_t c = 0; c < header.size() && c < fields.size(); ++c) {
            if (kinds[c] == ColumnKind::integer && !text::parse_integer(fields[c])) kinds[c] = ColumnKind::real;
            if (kinds[c] == ColumnKind::real && !text::parse_real(fields[c])) kinds[c] = ColumnKind::text;
        }
    }
    FlowSchema s;
    for (std::size_t c = 0; c < header.size(); ++c) s.columns.push_back({std::string(text::trim(header[c])), kinds[c]});
    return s;
}

/// Loads any CSV with inferred column kinds (no feature/label roles).
inline RecordTable load_any_csv(const std::filesystem::path& path) {
    FlowSchema schema;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path.string());
        schema = infer_schema(in);
    }
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> fields;
    std::string raw;
    csv::read_record(in, fields, raw);
    RecordTable t{schema, {}, 0};
    std::size_t row_no = 0;
    while (csv::read_record(in, fields, raw)) {
        if (csv::blank(fields)) continue;
        ++row_no;
        Row row;
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            if (c >= fields.size()) throw ParseError(row_no, schema.columns[c].name, raw);
            auto v = parse_cell(fields[c], schema.columns[c].kind);
            if (!v) throw ParseError(row_no, schema.columns[c].name, fields[c]);
            row.push_back(std::move(*v));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Query over a table file recorded in a workspace stage manifest.
inline QueryResult eval_query(const Workspace& ws, Stage stage, const std::string& file, const QueryExpr& expr,
                              const std::vector<std::string>& projection = {}) {
    if (!ws.manifest(stage).find(file))
        throw InvalidArgument("'" + file + "' is not recorded in the " + to_string(stage) + " manifest");
    return eval_query(load_any_csv(ws.path(stage, file)), expr, projection);
}

}  // namespace flowguard::pipeline
