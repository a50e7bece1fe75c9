#pragma once

#include <map>
#include <string>

#include "elfkit/ground_roll.hpp"

namespace elfkit::io {

/// Plain key=value configuration text: one pair per line, '#' comments,
/// dotted keys as section prefixes ("aircraft.mass_kg=800").
class KeyValueConfig {
  public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int_or(const std::string& key, long long fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

/// Aircraft/atmosphere parameters from a config, under an optional key
/// prefix ("" or "aircraft."). Missing keys fall back to the DA20-C1
/// assumption set.
AircraftConfig aircraft_from_config(const KeyValueConfig& cfg, const std::string& prefix = "");
Atmosphere atmosphere_from_config(const KeyValueConfig& cfg, const std::string& prefix = "");

}  // namespace elfkit::io
