#include "gqfpe/output.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "gqfpe/errors.hpp"

#ifndef GQFPE_VERSION
#define GQFPE_VERSION "0.0.0"
#endif

namespace gqfpe {

namespace fs = std::filesystem;

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != header.size()) throw DomainError("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_cell(double v) {
    if (std::isnan(v)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

OutputBundle::OutputBundle(std::string out_dir) : dir_(std::move(out_dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error("cannot create output directory " + dir_);
}

void OutputBundle::write_text(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("failed to write " + path.string());
    manifest_.push_back({name, content.size(), fnv1a64_hex(content)});
}

void OutputBundle::write_csv(const std::string& name, const CsvTable& table) { write_text(name, table.to_text()); }

nlohmann::ordered_json config_to_json(const RunConfig& config) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    const auto& schema = command_schema(config.command);
    for (const auto& spec : schema) {
        switch (spec.type) {
            case ValueType::Real: j[spec.key] = config.real(spec.key); break;
            case ValueType::Integer: j[spec.key] = config.integer(spec.key); break;
            case ValueType::Text: j[spec.key] = config.text(spec.key); break;
            case ValueType::TextList: j[spec.key] = config.texts(spec.key); break;
            case ValueType::RealList: j[spec.key] = config.reals(spec.key); break;
            case ValueType::Flag: j[spec.key] = config.flag(spec.key); break;
        }
    }
    return j;
}

void OutputBundle::write_summary(const std::string& name, const RunConfig& config, nlohmann::ordered_json results) {
    nlohmann::ordered_json j;
    j["version"] = GQFPE_VERSION;
    j["command"] = config.command;
    j["timestamp"] = utc_timestamp();
    j["config"] = config_to_json(config);
    j["config_text"] = serialize(config);
    j["results"] = std::move(results);
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& m : manifest_) {
        files.push_back({{"file", m.file}, {"bytes", m.bytes}, {"fnv1a64", m.checksum}});
    }
    j["manifest"] = files;
    const std::string text = j.dump(2) + "\n";
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("failed to write " + path.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_error_json(const std::string& out_dir, const std::string& command, const std::string& kind,
                      const std::string& message, nlohmann::ordered_json details) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    nlohmann::ordered_json j;
    j["version"] = GQFPE_VERSION;
    j["command"] = command;
    j["timestamp"] = utc_timestamp();
    j["error"] = kind;
    j["message"] = message;
    j["details"] = std::move(details);
    std::ofstream out(fs::path(out_dir) / "error.json", std::ios::binary | std::ios::trunc);
    out << j.dump(2) << "\n";
}

}  // namespace gqfpe
