#pragma once

// On-disk staged workspace: <root>/{raw,curated,models,results,report}, each
// stage with a manifest.json recording every artifact it holds.
//
// Manifest format:
//   {"stage": "<name>", "entries": [{"file", "bytes", "sha256",
//     "created_at", "step", "config_hash"}, ...]}
// Entries are kept sorted by file name; "sha256" is the lowercase hex SHA-256
// of the file's bytes and "created_at" an ISO-8601 UTC timestamp.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/hash.hpp"

namespace flowguard::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::json;

enum class Stage { raw, curated, models, results, report };

inline constexpr std::array<Stage, 5> all_stages{Stage::raw, Stage::curated, Stage::models, Stage::results,
                                                 Stage::report};

inline std::string to_string(Stage s) {
    switch (s) {
        case Stage::raw: return "raw";
        case Stage::curated: return "curated";
        case Stage::models: return "models";
        case Stage::results: return "results";
        case Stage::report: return "report";
    }
    return "raw";
}

inline Stage stage_from_string(std::string_view s) {
    for (auto st : all_stages)
        if (to_string(st) == s) return st;
    throw InvalidArgument("unknown stage '" + std::string(s) + "'");
}

inline constexpr const char* manifest_name = "manifest.json";
inline constexpr const char* stable_timestamp = "1970-01-01T00:00:00Z";

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ManifestEntry {
    std::string file;
    std::uintmax_t bytes = 0;
    std::string sha256;
    std::string created_at;
    std::string step;
    std::string config_hash;

    bool operator==(const ManifestEntry&) const = default;
};

struct StageManifest {
    Stage stage = Stage::raw;
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(std::string_view file) const {
        for (const auto& e : entries)
            if (e.file == file) return &e;
        return nullptr;
    }

    void upsert(ManifestEntry e) {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& x) { return x.file == e.file; });
        if (it != entries.end()) *it = std::move(e);
        else entries.push_back(std::move(e));
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
    }

    void remove(std::string_view file) {
        std::erase_if(entries, [&](const auto& x) { return x.file == file; });
    }

    Json to_json() const {
        Json list = Json::array();
        for (const auto& e : entries)
            list.push_back({{"file", e.file}, {"bytes", e.bytes}, {"sha256", e.sha256},
                            {"created_at", e.created_at}, {"step", e.step}, {"config_hash", e.config_hash}});
        return {{"stage", to_string(stage)}, {"entries", list}};
    }

    static StageManifest from_json(const Json& j) {
        try {
            StageManifest m;
            m.stage = stage_from_string(j.at("stage").get<std::string>());
            for (const auto& e : j.at("entries"))
                m.entries.push_back({e.at("file").get<std::string>(), e.at("bytes").get<std::uintmax_t>(),
                                     e.at("sha256").get<std::string>(), e.at("created_at").get<std::string>(),
                                     e.at("step").get<std::string>(), e.at("config_hash").get<std::string>()});
            return m;
        } catch (const Json::exception& e) {
            throw Error("CorruptManifest", std::string("malformed manifest: ") + e.what());
        }
    }

    bool operator==(const StageManifest&) const = default;
};

class Workspace {
public:
    explicit Workspace(fs::path root) : root_(std::move(root)) {}

    const fs::path& root() const { return root_; }
    fs::path dir(Stage s) const { return root_ / to_string(s); }
    fs::path path(Stage s, std::string_view file) const { return dir(s) / file; }
    fs::path manifest_path(Stage s) const { return dir(s) / manifest_name; }

    StageManifest manifest(Stage s) const {
        std::ifstream in(manifest_path(s));
        if (!in) throw IoError("missing manifest for stage " + to_string(s));
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw Error("CorruptManifest", "manifest for stage " + to_string(s) + " is not JSON");
        }
        return StageManifest::from_json(j);
    }

    void save_manifest(const StageManifest& m) const {
        write_bytes(manifest_path(m.stage), m.to_json().dump(2) + "\n");
    }

    /// Writes an artifact and records it in the stage manifest.
    ManifestEntry write(Stage s, const std::string& file, std::string_view bytes, const std::string& step,
                        const std::string& config_hash, const std::string& timestamp) const {
        const auto p = path(s, file);
        write_bytes(p, bytes);
        return record(s, file, step, config_hash, timestamp);
    }

    /// Records an artifact already present in the stage directory.
    ManifestEntry record(Stage s, const std::string& file, const std::string& step, const std::string& config_hash,
                         const std::string& timestamp) const {
        const auto p = path(s, file);
        ManifestEntry e{file, fs::file_size(p), sha256_file(p), timestamp, step, config_hash};
        auto m = manifest(s);
        m.upsert(e);
        save_manifest(m);
        return e;
    }

    void remove(Stage s, const std::string& file) const {
        std::error_code ec;
        fs::remove(path(s, file), ec);
        auto m = manifest(s);
        m.remove(file);
        save_manifest(m);
    }

    /// Deletes every artifact and empties every manifest.
    void clear() const {
        for (auto s : all_stages) {
            for (const auto& entry : fs::directory_iterator(dir(s))) fs::remove_all(entry.path());
            save_manifest(StageManifest{s, {}});
        }
    }

    /// Problems found: entries whose file is missing or whose hash differs,
    /// and files present in a stage but absent from its manifest.
    std::vector<std::string> verify() const {
        std::vector<std::string> problems;
        for (auto s : all_stages) {
            const auto m = manifest(s);
            for (const auto& e : m.entries) {
                const auto p = path(s, e.file);
                if (!fs::exists(p)) problems.push_back(to_string(s) + "/" + e.file + ": missing");
                else if (sha256_file(p) != e.sha256) problems.push_back(to_string(s) + "/" + e.file + ": hash mismatch");
            }
            for (const auto& entry : fs::recursive_directory_iterator(dir(s))) {
                if (!entry.is_regular_file()) continue;
                const auto rel = fs::relative(entry.path(), dir(s)).generic_string();
                if (rel == manifest_name) continue;
                if (!m.find(rel)) problems.push_back(to_string(s) + "/" + rel + ": not in manifest");
            }
        }
        return problems;
    }

    static void write_bytes(const fs::path& p, std::string_view bytes) {
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("failed writing " + p.string());
    }

    static std::string read_bytes(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError("cannot open " + p.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

private:
    fs::path root_;
};

/// Creates the five stage directories with empty manifests. Existing
/// manifests are left alone, so re-initialising is a no-op.
inline Workspace init_workspace(const fs::path& root) {
    std::error_code ec;
    if (fs::exists(root, ec) && !fs::is_directory(root, ec))
        throw PermissionDenied("workspace root " + root.string() + " exists and is not a directory");
    try {
        fs::create_directories(root);
        Workspace ws(root);
        for (auto s : all_stages) {
            fs::create_directories(ws.dir(s));
            if (!fs::exists(ws.manifest_path(s))) ws.save_manifest(StageManifest{s, {}});
        }
        return ws;
    } catch (const fs::filesystem_error& e) {
        throw PermissionDenied("cannot create workspace at " + root.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw PermissionDenied(e.what());
    }
}

/// Exclusive ownership of a workspace for the duration of a run.
class WorkspaceLock {
public:
    explicit WorkspaceLock(const Workspace& ws) : path_(ws.root() / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f) throw WorkspaceLocked("workspace " + ws.root().string() + " is locked by another run (" +
                                      path_.string() + ")");
        std::fclose(f);
    }
    ~WorkspaceLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    WorkspaceLock(const WorkspaceLock&) = delete;
    WorkspaceLock& operator=(const WorkspaceLock&) = delete;

private:
    fs::path path_;
};

}  // namespace flowguard::pipeline
