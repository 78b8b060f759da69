#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqfpe/config.hpp"

namespace gqfpe {

/// Columns of doubles; NaN cells are written blank.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::string to_text() const;
};

std::string format_cell(double v);  // %.17g, blank for NaN

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

struct ManifestEntry {
    std::string file;
    std::size_t bytes = 0;
    std::string checksum;
};

/// Writes into one output directory and keeps a manifest of everything written.
class OutputBundle {
public:
    explicit OutputBundle(std::string out_dir);

    const std::string& directory() const { return dir_; }
    void write_text(const std::string& name, const std::string& content);
    void write_csv(const std::string& name, const CsvTable& table);

    /// Summary JSON with run metadata, the caller's results and the manifest of prior files.
    void write_summary(const std::string& name, const RunConfig& config, nlohmann::ordered_json results);

    const std::vector<ManifestEntry>& manifest() const { return manifest_; }

private:
    std::string dir_;
    std::vector<ManifestEntry> manifest_;
};

nlohmann::ordered_json config_to_json(const RunConfig& config);
std::string utc_timestamp();

/// Diagnostic file for failed runs.
void write_error_json(const std::string& out_dir, const std::string& command, const std::string& kind,
                      const std::string& message, nlohmann::ordered_json details = nlohmann::ordered_json::object());

}  // namespace gqfpe
