#pragma once

#include <string>
#include <vector>

namespace gqfpe {

enum class ValueType { Real, Integer, Text, TextList, RealList, Flag };

struct ParamSpec {
    std::string key;
    ValueType type = ValueType::Real;
    std::string default_value;  // empty: required
    enum class Bound { None, Positive, NonNegative, AtLeastTwo, AtLeastOne, AtLeastEight } bound = Bound::None;
    std::vector<std::string> choices;  // for Text and TextList
    std::string help;
};

/// Keys accepted by one command section, in canonical order.
const std::vector<ParamSpec>& command_schema(const std::string& command);
const std::vector<std::string>& command_names();

struct ConfigEntry {
    std::string key;
    std::string value;  // canonical text form
    int line = 0;       // source line, 0 for defaults and overrides
    bool from_default = false;
};

class RunConfig {
public:
    std::string command;
    std::vector<ConfigEntry> entries;  // schema order, every key present

    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::string> texts(const std::string& key) const;
    bool flag(const std::string& key) const;
    bool is_default(const std::string& key) const;

    /// Replace one value from a `key=value` string, revalidating it.
    void set(const std::string& assignment);

    bool operator==(const RunConfig& other) const;

private:
    const ConfigEntry& entry(const std::string& key) const;
};

/// Parses INI-style `[section]` / `key = value` text or an equivalent JSON object
/// and returns the validated section for `command`.
RunConfig parse_config(const std::string& text, const std::string& command);

/// Defaults only; fails if the command has required keys and `overrides` does not cover them.
RunConfig default_config(const std::string& command, const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::string& path, const std::string& command,
                      const std::vector<std::string>& overrides = {});

/// INI text that parses back to the same configuration.
std::string serialize(const RunConfig& config);

/// Canonical text of a double: the shortest representation that round-trips.
std::string format_real(double v);

}  // namespace gqfpe
