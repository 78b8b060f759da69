#include "gqfpe/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gqfpe/errors.hpp"

namespace gqfpe {

namespace {

using Bound = ParamSpec::Bound;

ParamSpec real(std::string key, std::string def, Bound b = Bound::None, std::string help = {}) {
    return {std::move(key), ValueType::Real, std::move(def), b, {}, std::move(help)};
}
ParamSpec integer(std::string key, std::string def, Bound b, std::string help = {}) {
    return {std::move(key), ValueType::Integer, std::move(def), b, {}, std::move(help)};
}
ParamSpec text(std::string key, std::string def, std::vector<std::string> choices, std::string help = {}) {
    return {std::move(key), ValueType::Text, std::move(def), Bound::None, std::move(choices), std::move(help)};
}

const ParamSpec kConvention = text("convention", "derived", {"derived", "printed"}, "K_R^(2) prefactor");
const ParamSpec kMatsubaraTol = real("matsubara_tol", "1e-10", Bound::Positive);

std::vector<ParamSpec> propagation_keys() {
    return {
        real("gamma_s", "", Bound::NonNegative, "damping strength"),
        real("beta_s", "", Bound::Positive, "inverse temperature"),
        real("omega_e", "1", Bound::Positive),
        real("omega_g", "1", Bound::Positive),
        real("shift", "0", Bound::None, "displacement d of V_e"),
        real("quartic", "0", Bound::NonNegative),
        real("q0", "0", Bound::None, "drive displacement"),
        real("cross_gamma_s", "0"),
        integer("N", "64", Bound::AtLeastTwo, "basis size"),
        real("omega_ref", "0", Bound::NonNegative, "basis frequency, 0 selects omega_e"),
        real("dt", "1e-3", Bound::Positive),
        real("t_end", "20", Bound::Positive),
        integer("record_every", "100", Bound::AtLeastOne),
        {"monitors", ValueType::TextList, "trace,hermiticity,min_eig,energy", Bound::None,
         {"trace", "hermiticity", "min_eig", "energy"}, {}},
        {"symmetrize", ValueType::Flag, "false", Bound::None, {}, {}},
        text("initial", "thermal", {"thermal", "oracle"}),
        real("max_leakage", "1e-6", Bound::Positive),
        real("trace_abort", "1e-6", Bound::Positive),
        kConvention,
        kMatsubaraTol,
    };
}

std::vector<ParamSpec> oracle_keys(bool with_physics) {
    std::vector<ParamSpec> keys;
    if (with_physics) {
        keys = {real("gamma_s", "", Bound::NonNegative), real("beta_s", "", Bound::Positive),
                real("omega_e", "1", Bound::Positive),   real("omega_g", "1", Bound::Positive),
                real("shift", "0"),                      real("t_end", "20", Bound::Positive)};
    }
    keys.push_back(real("ground_gamma_s", "0", Bound::NonNegative));
    keys.push_back(integer("n_modes", "512", Bound::AtLeastEight));
    keys.push_back(real("omega_max", "30", Bound::Positive));
    if (with_physics) keys.push_back(real("record_dt", "0.1", Bound::Positive));
    return keys;
}

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
    static const std::map<std::string, std::vector<ParamSpec>> s = [] {
        std::map<std::string, std::vector<ParamSpec>> m;
        m["kernels"] = {real("gamma_s", "", Bound::NonNegative),
                        real("beta_s", "", Bound::Positive),
                        real("t_max", "20", Bound::Positive),
                        integer("steps", "2000", Bound::AtLeastOne),
                        text("method", "closed_form", {"closed_form", "quadrature"}),
                        kConvention,
                        kMatsubaraTol};
        m["coeffs"] = {real("gamma_s", "", Bound::NonNegative),
                       {"beta_s", ValueType::RealList, "", Bound::Positive, {}, {}},
                       real("t_max", "20", Bound::Positive),
                       integer("steps", "2000", Bound::AtLeastOne),
                       kConvention,
                       kMatsubaraTol};
        m["figure1"] = m["coeffs"];
        m["figure1"][0].default_value = "0.1";
        m["figure1"][1].default_value = "0.5,1,5";
        m["propagate"] = propagation_keys();
        m["oracle"] = oracle_keys(true);
        m["compare"] = propagation_keys();
        for (auto& k : oracle_keys(false)) m["compare"].push_back(k);
        auto w = propagation_keys();
        w[0].default_value = "0";
        w[1].default_value = "1";
        w.insert(w.begin(), text("state", "thermal", {"thermal", "coherent", "final"}));
        w.push_back(real("p0", "0", Bound::None, "coherent-state momentum"));
        w.push_back(real("q_min", "-8"));
        w.push_back(real("q_max", "8"));
        w.push_back(real("p_min", "-8"));
        w.push_back(real("p_max", "8"));
        w.push_back(integer("points", "161", Bound::AtLeastTwo));
        m["wigner"] = w;
        return m;
    }();
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.c_str();
    char* end = nullptr;
    errno = 0;
    v = std::strtod(b, &end);
    return end == b + s.size() && errno == 0 && std::isfinite(v);
}

bool parse_int(const std::string& s, int& v) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::Real: return "a real number";
        case ValueType::Integer: return "an integer";
        case ValueType::Text: return "one of the listed words";
        case ValueType::TextList: return "a comma-separated list of words";
        case ValueType::RealList: return "a comma-separated list of real numbers";
        case ValueType::Flag: return "true or false";
    }
    return "";
}

void check_bound(const ParamSpec& spec, double v, int line) {
    bool ok = true;
    std::string rule;
    switch (spec.bound) {
        case Bound::None: break;
        case Bound::Positive: ok = v > 0.0; rule = "must be > 0"; break;
        case Bound::NonNegative: ok = v >= 0.0; rule = "must be >= 0"; break;
        case Bound::AtLeastOne: ok = v >= 1.0; rule = "must be >= 1"; break;
        case Bound::AtLeastTwo: ok = v >= 2.0; rule = "must be >= 2"; break;
        case Bound::AtLeastEight: ok = v >= 8.0; rule = "must be >= 8"; break;
    }
    if (!ok) throw ConfigError(spec.key + " " + rule + " (got " + format_real(v) + ")", line);
}

std::string join_choices(const std::vector<std::string>& c) {
    std::string s;
    for (const auto& x : c) s += (s.empty() ? "" : ", ") + x;
    return s;
}

// Validates raw text against its parameter definition and returns its canonical form.
std::string canonical(const ParamSpec& spec, const std::string& raw, int line) {
    const std::string v = trim(raw);
    auto mismatch = [&]() {
        return ConfigError("type mismatch for " + spec.key + ": expected " + type_name(spec.type) + ", got '" + v + "'",
                           line);
    };
    switch (spec.type) {
        case ValueType::Real: {
            double x;
            if (!parse_double(v, x)) throw mismatch();
            check_bound(spec, x, line);
            return format_real(x);
        }
        case ValueType::Integer: {
            int x;
            if (!parse_int(v, x)) throw mismatch();
            check_bound(spec, x, line);
            return std::to_string(x);
        }
        case ValueType::Text:
            if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
                throw ConfigError("invalid value '" + v + "' for " + spec.key + " (allowed: " +
                                      join_choices(spec.choices) + ")",
                                  line);
            }
            return v;
        case ValueType::TextList: {
            std::string out;
            if (v.empty()) return out;
            for (const auto& item : split(v, ',')) {
                if (std::find(spec.choices.begin(), spec.choices.end(), item) == spec.choices.end()) {
                    throw ConfigError("invalid item '" + item + "' in " + spec.key + " (allowed: " +
                                          join_choices(spec.choices) + ")",
                                      line);
                }
                out += (out.empty() ? "" : ",") + item;
            }
            return out;
        }
        case ValueType::RealList: {
            std::string out;
            const auto items = split(v, ',');
            if (items.empty()) throw mismatch();
            for (const auto& item : items) {
                double x;
                if (!parse_double(item, x)) throw mismatch();
                check_bound(spec, x, line);
                out += (out.empty() ? "" : ",") + format_real(x);
            }
            return out;
        }
        case ValueType::Flag:
            if (v == "true" || v == "1" || v == "yes") return "true";
            if (v == "false" || v == "0" || v == "no") return "false";
            throw mismatch();
    }
    return v;
}

const ParamSpec* find_spec(const std::vector<ParamSpec>& schema, const std::string& key) {
    for (const auto& s : schema) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

struct RawValue {
    std::string text;
    int line = 0;
};

using RawSection = std::map<std::string, RawValue>;

struct RawDocument {
    std::map<std::string, RawSection> sections;
    std::map<std::string, int> section_lines;
};

RawDocument read_ini(const std::string& text) {
    RawDocument doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!schemas().count(section)) throw ConfigError("unknown section [" + section + "]", line);
            if (doc.sections.count(section)) throw ConfigError("duplicate section [" + section + "]", line);
            doc.sections[section];
            doc.section_lines[section] = line;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + s + "'", line);
        if (section.empty()) throw ConfigError("key outside of any [section]", line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key", line);
        auto& sec = doc.sections[section];
        if (sec.count(key)) throw ConfigError("duplicate key " + key, line);
        sec[key] = {trim(s.substr(eq + 1)), line};
    }
    return doc;
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string json_scalar_text(const nlohmann::ordered_json& v, bool& ok) {
    ok = true;
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_real(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    ok = false;
    return {};
}

RawDocument read_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what(), line_of_offset(text, e.byte));
    }
    if (!j.is_object()) throw ConfigError("JSON configuration must be an object of sections", 1);
    RawDocument doc;
    std::size_t cursor = 0;
    auto locate = [&](const std::string& key) {
        const auto pos = text.find("\"" + key + "\"", cursor);
        if (pos == std::string::npos) return line_of_offset(text, cursor);
        cursor = pos;
        return line_of_offset(text, pos);
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        cursor = 0;
        const int sline = locate(it.key());
        if (!schemas().count(it.key())) throw ConfigError("unknown section [" + it.key() + "]", sline);
        if (!it.value().is_object()) throw ConfigError("section " + it.key() + " must be an object", sline);
        auto& sec = doc.sections[it.key()];
        doc.section_lines[it.key()] = sline;
        const std::size_t section_start = cursor;
        for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
            cursor = section_start;
            const int line = locate(kv.key());
            std::string value;
            bool ok = true;
            if (kv.value().is_array()) {
                for (const auto& item : kv.value()) {
                    bool item_ok = true;
                    const std::string s = json_scalar_text(item, item_ok);
                    ok = ok && item_ok;
                    value += (value.empty() ? "" : ",") + s;
                }
            } else {
                value = json_scalar_text(kv.value(), ok);
            }
            if (!ok) throw ConfigError("type mismatch for " + kv.key() + ": unsupported JSON value", line);
            sec[kv.key()] = {value, line};
        }
    }
    return doc;
}

bool required(const ParamSpec& spec) { return spec.default_value.empty() && spec.type != ValueType::TextList; }

RunConfig build(const std::string& command, const RawSection& raw, int section_line) {
    const auto& schema = command_schema(command);
    for (const auto& [key, value] : raw) {
        if (!find_spec(schema, key)) throw ConfigError("unknown key " + key + " in [" + command + "]", value.line);
    }
    RunConfig c;
    c.command = command;
    for (const auto& spec : schema) {
        ConfigEntry e;
        e.key = spec.key;
        const auto it = raw.find(spec.key);
        if (it != raw.end()) {
            e.value = canonical(spec, it->second.text, it->second.line);
            e.line = it->second.line;
        } else if (!required(spec)) {
            e.value = canonical(spec, spec.default_value, 0);
            e.from_default = true;
        } else {
            // left empty for an override to fill, checked in finish()
            e.line = section_line;
        }
        c.entries.push_back(e);
    }
    return c;
}

void finish(RunConfig& c) {
    for (const auto& e : c.entries) {
        if (e.value.empty() && required(*find_spec(command_schema(c.command), e.key))) {
            throw ConfigError("missing required key " + e.key + " in [" + c.command + "]", e.line);
        }
    }
}

RunConfig from_document(const RawDocument& doc, const std::string& command,
                        const std::vector<std::string>& overrides) {
    // every section present is validated, not only the one being run
    for (const auto& [name, sec] : doc.sections) {
        if (name == command) continue;
        const auto& schema = command_schema(name);
        for (const auto& [key, value] : sec) {
            const auto* spec = find_spec(schema, key);
            if (!spec) throw ConfigError("unknown key " + key + " in [" + name + "]", value.line);
            canonical(*spec, value.text, value.line);
        }
    }
    RawSection raw;
    int section_line = 0;
    if (doc.sections.count(command)) {
        raw = doc.sections.at(command);
        section_line = doc.section_lines.at(command);
    } else if (command == "compare" && doc.sections.count("propagate") && doc.sections.count("oracle")) {
        raw = doc.sections.at("propagate");
        for (const auto& [key, value] : doc.sections.at("oracle")) {
            const auto it = raw.find(key);
            if (it != raw.end()) {
                const auto* spec = find_spec(command_schema("compare"), key);
                if (spec && canonical(*spec, it->second.text, it->second.line) !=
                                canonical(*spec, value.text, value.line)) {
                    throw ConfigError("mismatched parameter sets: " + key + " differs between [propagate] and [oracle]",
                                      value.line);
                }
            }
            raw.emplace(key, value);
        }
        section_line = doc.section_lines.at("propagate");
    }
    RunConfig c = build(command, raw, section_line);
    for (const auto& o : overrides) c.set(o);
    finish(c);
    return c;
}

}  // namespace

const std::vector<ParamSpec>& command_schema(const std::string& command) {
    const auto it = schemas().find(command);
    if (it == schemas().end()) throw ConfigError("unknown command " + command);
    return it->second;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"kernels", "coeffs",  "figure1", "propagate",
                                                   "oracle",  "compare", "wigner"};
    return names;
}

std::string format_real(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const ConfigEntry& RunConfig::entry(const std::string& key) const {
    for (const auto& e : entries) {
        if (e.key == key) return e;
    }
    throw ConfigError("no key " + key + " in [" + command + "]");
}

double RunConfig::real(const std::string& key) const { return std::strtod(entry(key).value.c_str(), nullptr); }

int RunConfig::integer(const std::string& key) const { return std::atoi(entry(key).value.c_str()); }

const std::string& RunConfig::text(const std::string& key) const { return entry(key).value; }

std::vector<double> RunConfig::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split(entry(key).value, ',')) out.push_back(std::strtod(s.c_str(), nullptr));
    return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key) const {
    const std::string& v = entry(key).value;
    if (v.empty()) return {};
    return split(v, ',');
}

bool RunConfig::flag(const std::string& key) const { return entry(key).value == "true"; }

bool RunConfig::is_default(const std::string& key) const { return entry(key).from_default; }

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value, got '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        if (key.substr(0, dot) != command) {
            throw ConfigError("override " + key + " does not apply to [" + command + "]");
        }
        key = key.substr(dot + 1);
    }
    const auto* spec = find_spec(command_schema(command), key);
    if (!spec) throw ConfigError("unknown key " + key + " in [" + command + "]");
    for (auto& e : entries) {
        if (e.key == key) {
            e.value = canonical(*spec, assignment.substr(eq + 1), 0);
            e.line = 0;
            e.from_default = false;
        }
    }
}

bool RunConfig::operator==(const RunConfig& other) const {
    if (command != other.command || entries.size() != other.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].key != other.entries[i].key || entries[i].value != other.entries[i].value) return false;
    }
    return true;
}

RunConfig parse_config(const std::string& text, const std::string& command) {
    command_schema(command);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = first != std::string::npos && text[first] == '{';
    return from_document(json ? read_json(text) : read_ini(text), command, {});
}

RunConfig default_config(const std::string& command, const std::vector<std::string>& overrides) {
    command_schema(command);
    return from_document(RawDocument{}, command, overrides);
}

RunConfig load_config(const std::string& path, const std::string& command,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = first != std::string::npos && text[first] == '{';
    return from_document(json ? read_json(text) : read_ini(text), command, overrides);
}

std::string serialize(const RunConfig& config) {
    std::string out = "[" + config.command + "]\n";
    for (const auto& e : config.entries) out += e.key + " = " + e.value + "\n";
    return out;
}

}  // namespace gqfpe
