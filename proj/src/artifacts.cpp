#include "psep/artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "psep/config.hpp"

namespace psep::io {

namespace {

void escape_into(std::string& out, const std::string& s)
{
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c < 0x20) {
                static const char* hex = "0123456789abcdef";
                out += "\\u00";
                out += hex[c >> 4];
                out += hex[c & 15];
            } else {
                out += char(c);
            }
        }
    }
    out += '"';
}

void dump_into(std::string& out, const Json& j, int indent)
{
    const std::string pad(std::size_t(indent + 2), ' ');
    const std::string close(std::size_t(indent), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        // nlohmann's default object is a std::map, so iteration is key-sorted
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            escape_into(out, it.key());
            out += ": ";
            dump_into(out, it.value(), indent + 2);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            dump_into(out, j[i], indent + 2);
        }
        out += "\n" + close + "]";
        return;
    }
    case Json::value_t::string: escape_into(out, j.get_ref<const std::string&>()); return;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer: out += std::to_string(j.get<long long>()); return;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<unsigned long long>()); return;
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    default: out += "null"; return;
    }
}

void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f.write(content.data(), std::streamsize(content.size()));
    if (!f) throw std::runtime_error("short write to " + p.string());
}

}  // namespace

std::string dump_json(const Json& j)
{
    std::string out;
    dump_into(out, j, 0);
    out += '\n';
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::row(std::vector<std::string> cells)
{
    if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width does not match the header");
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::cell(double x) { return format_double(x); }

std::string CsvWriter::cell(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string CsvWriter::str() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::filesystem::path default_output_dir()
{
    const char* v = std::getenv(output_dir_env);
    if (v && *v) return v;
    return "psep-out";
}

ArtifactSet::ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

void ArtifactSet::put(const std::string& name, const std::string& content, bool hashed)
{
    if (name.empty() || name.find('/') != std::string::npos || name == "manifest.json")
        throw std::invalid_argument("invalid artifact name '" + name + "'");
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw std::logic_error("artifact set already closed");
    for (const auto& e : entries_)
        if (e.name == name) throw std::logic_error("artifact '" + name + "' written twice");
    write_file(dir_ / (name + ".partial"), content);
    entries_.push_back({name, hashed ? sha256_hex(content) : std::string(), content.size()});
}

void ArtifactSet::write(const std::string& name, const std::string& content) { put(name, content, true); }
void ArtifactSet::write_volatile(const std::string& name, const std::string& content) { put(name, content, false); }

Json ArtifactSet::manifest(Json fields) const
{
    Json files = Json::array();
    std::vector<ManifestEntry> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (const auto& e : sorted) {
        Json f;
        f["name"] = e.name;
        // volatile files carry neither hash nor size, so the manifest stays reproducible
        if (e.sha256.empty()) {
            f["volatile"] = true;
        } else {
            f["bytes"] = e.bytes;
            f["sha256"] = e.sha256;
        }
        files.push_back(f);
    }
    if (!fields.is_object()) fields = Json::object();
    fields["files"] = files;
    return fields;
}

void ArtifactSet::commit(Json fields)
{
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw std::logic_error("artifact set already closed");
    for (const auto& e : entries_) std::filesystem::rename(dir_ / (e.name + ".partial"), dir_ / e.name);
    std::filesystem::remove(dir_ / "manifest.json.partial");
    write_file(dir_ / "manifest.json", dump_json(manifest(std::move(fields))));
    closed_ = true;
}

void ArtifactSet::abandon(Json fields, const std::string& error)
{
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) return;
    if (!fields.is_object()) fields = Json::object();
    fields["error"] = error;
    std::filesystem::remove(dir_ / "manifest.json");
    write_file(dir_ / "manifest.json.partial", dump_json(manifest(std::move(fields))));
    closed_ = true;
}

std::vector<ManifestEntry> ArtifactSet::entries() const
{
    std::lock_guard<std::mutex> lock(mu_);
    return entries_;
}

}  // namespace psep::io
