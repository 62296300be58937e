#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flowguard {

/// Base of every error thrown by the toolkit. `kind()` is a stable
/// identifier used by the CLI's JSON output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FLOWGUARD_SIMPLE_ERROR(Name)                                        \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    };

// flowdata
FLOWGUARD_SIMPLE_ERROR(MissingHeader)
FLOWGUARD_SIMPLE_ERROR(MissingColumn)
FLOWGUARD_SIMPLE_ERROR(UnknownColumn)
FLOWGUARD_SIMPLE_ERROR(UnseenValue)
FLOWGUARD_SIMPLE_ERROR(EncoderMissing)
FLOWGUARD_SIMPLE_ERROR(SchemaError)
FLOWGUARD_SIMPLE_ERROR(IoError)

// eda / sampling
FLOWGUARD_SIMPLE_ERROR(EmptyInput)
FLOWGUARD_SIMPLE_ERROR(TooFewRows)
FLOWGUARD_SIMPLE_ERROR(EmptyLabels)
FLOWGUARD_SIMPLE_ERROR(InvalidArgument)

// learners
FLOWGUARD_SIMPLE_ERROR(EmptyTraining)
FLOWGUARD_SIMPLE_ERROR(DimensionMismatch)
FLOWGUARD_SIMPLE_ERROR(NoRounds)
FLOWGUARD_SIMPLE_ERROR(VersionMismatch)
FLOWGUARD_SIMPLE_ERROR(CorruptModel)

// metrics
FLOWGUARD_SIMPLE_ERROR(LengthMismatch)
FLOWGUARD_SIMPLE_ERROR(UnknownLabel)
FLOWGUARD_SIMPLE_ERROR(EmptyMatrix)

// pipeline
FLOWGUARD_SIMPLE_ERROR(PermissionDenied)
FLOWGUARD_SIMPLE_ERROR(MissingResults)
FLOWGUARD_SIMPLE_ERROR(TypeMismatch)
FLOWGUARD_SIMPLE_ERROR(ConfigError)
FLOWGUARD_SIMPLE_ERROR(WorkspaceLocked)

#undef FLOWGUARD_SIMPLE_ERROR

/// Strict-mode CSV failure: 1-based data row, column name and the raw text.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, std::string raw)
        : Error("ParseError", "row " + std::to_string(row) + ", column " + column +
                                  ": cannot parse '" + raw + "'"),
          row_(row), column_(std::move(column)), raw_(std::move(raw)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }
    const std::string& raw() const noexcept { return raw_; }

private:
    std::size_t row_;
    std::string column_;
    std::string raw_;
};

/// Query text rejected by the parser. `position` is a 0-based byte offset.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& found)
        : Error("SyntaxError", build_message(position, expected, found)),
          position_(position), expected_(std::move(expected)) {}

    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string build_message(std::size_t pos, const std::vector<std::string>& expected,
                                     const std::string& found) {
        std::string msg = "syntax error at position " + std::to_string(pos) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
        msg += ", found " + found;
        return msg;
    }

    std::size_t position_;
    std::vector<std::string> expected_;
};

/// A pipeline step failed; wraps the underlying error with the step name.
class StepError : public Error {
public:
    StepError(std::string step, const Error& cause)
        : Error(cause.kind(), "step '" + step + "' failed: " + cause.what()),
          step_(std::move(step)) {}

    const std::string& step() const noexcept { return step_; }

private:
    std::string step_;
};

}  // namespace flowguard
