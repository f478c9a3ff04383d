#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

// Deterministic artifact files: JSON with sorted keys and shortest round-trip numbers,
// locale-free CSV, and a manifest carrying a SHA-256 per file.
namespace psep::io {

using Json = nlohmann::json;

// Two-space indent, sorted keys, trailing newline. Non-finite numbers become null.
std::string dump_json(const Json& j);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(std::vector<std::string> cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

    static std::string cell(double x);
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(std::string_view s);   // quoted when it holds , " or newline

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(std::string_view data);

// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "PSEP_OUT_DIR";
// $PSEP_OUT_DIR if set and non-empty, else ./psep-out
std::filesystem::path default_output_dir();

struct ManifestEntry {
    std::string name;
    std::string sha256;    // empty for volatile files
    std::size_t bytes = 0;
};

// Files are written as <name>.partial and renamed by commit(). abandon() keeps the
// .partial names and writes manifest.json.partial with the error. Thread safe.
class ArtifactSet {
public:
    explicit ArtifactSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const Json& j) { write(name, dump_json(j)); }
    void write_csv(const std::string& name, const CsvWriter& csv) { write(name, csv.str()); }
    // Listed in the manifest without hash or size (wall-clock data).
    void write_volatile(const std::string& name, const std::string& content);

    // `fields` is merged into the manifest next to the file list.
    void commit(Json fields);
    void abandon(Json fields, const std::string& error);

    std::vector<ManifestEntry> entries() const;

private:
    void put(const std::string& name, const std::string& content, bool hashed);
    Json manifest(Json fields) const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::vector<ManifestEntry> entries_;
    bool closed_ = false;
};

}  // namespace psep::io
