#pragma once

// Shared fixtures and hand-rolled generators for the test suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "flowguard/flowdata.hpp"
#include "flowguard/random.hpp"

namespace flowguard::testing {

inline constexpr const char* two_row_csv =
    "L4_DST_PORT,L7_PROTO,TCP_FLAGS,Label,Attack\n"
    "80,7,25,0,Benign\n"
    "53,5,0,1,Exploits\n";

inline RecordTable read_csv_text(const std::string& text, const FlowSchema& schema = default_schema(),
                                 Policy policy = Policy::strict) {
    std::istringstream in(text);
    return read_flow_csv(in, schema, policy);
}

/// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        const auto base = std::filesystem::temp_directory_path();
        for (;;) {
            path_ = base / ("flowguard_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
            if (std::filesystem::create_directories(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Small random generator helpers over the library's own RNG.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t size(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng_.below(hi - lo + 1)); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1))); }
    double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
    bool coin(double p = 0.5) { return rng_.uniform() < p; }
    Rng& rng() { return rng_; }

    /// n x d matrix with small integer-valued entries (plenty of ties).
    FeatureMatrix grid_matrix(std::size_t n, std::size_t d, int lo, int hi) {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
        FeatureMatrix X(names, n);
        for (auto& v : X.values) v = integer(lo, hi);
        return X;
    }

    FeatureMatrix real_matrix(std::size_t n, std::size_t d, double lo, double hi) {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
        FeatureMatrix X(names, n);
        for (auto& v : X.values) v = real(lo, hi);
        return X;
    }

    std::vector<ClassCode> labels(std::size_t n, int classes) {
        std::vector<ClassCode> y(n);
        for (auto& v : y) v = integer(0, classes - 1);
        return y;
    }

private:
    Rng rng_;
};

inline FeatureMatrix matrix(std::vector<std::vector<double>> rows) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    FeatureMatrix X(names, 0);
    for (const auto& r : rows) X.append_row(r);
    return X;
}

}  // namespace flowguard::testing
