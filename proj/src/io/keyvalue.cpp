#include "elfkit/io/keyvalue.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elfkit::io {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.entries_[key] = trim(stripped.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw std::runtime_error("config: missing key '" + key + "'");
    }
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string raw = get(key);
    try {
        return std::stod(raw);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + raw);
    }
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int_or(const std::string& key, long long fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const std::string raw = get(key);
    try {
        return std::stoll(raw);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + raw);
    }
}

AircraftConfig aircraft_from_config(const KeyValueConfig& cfg, const std::string& prefix) {
    const AircraftConfig defaults = da20_c1();
    AircraftConfig c;
    c.mass_kg = cfg.get_double_or(prefix + "mass_kg", defaults.mass_kg);
    c.wing_area_m2 = cfg.get_double_or(prefix + "wing_area_m2", defaults.wing_area_m2);
    c.wing_span_m = cfg.get_double_or(prefix + "wing_span_m", defaults.wing_span_m);
    c.ld_max = cfg.get_double_or(prefix + "ld_max", defaults.ld_max);
    c.mu = cfg.get_double_or(prefix + "mu", defaults.mu);
    c.reaction_time_s = cfg.get_double_or(prefix + "reaction_time_s", defaults.reaction_time_s);
    c.touchdown_speed_ms =
        cfg.get_double_or(prefix + "touchdown_speed_ms", defaults.touchdown_speed_ms);
    c.thrust_n = cfg.get_double_or(prefix + "thrust_n", defaults.thrust_n);
    return c;
}

Atmosphere atmosphere_from_config(const KeyValueConfig& cfg, const std::string& prefix) {
    Atmosphere atm;
    atm.rho = cfg.get_double_or(prefix + "rho", atm.rho);
    atm.g = cfg.get_double_or(prefix + "g", atm.g);
    return atm;
}

}  // namespace elfkit::io
