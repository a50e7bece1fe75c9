#include "elfkit/io/elf_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "elfkit/io/wkt.hpp"

namespace elfkit::io {

namespace {

// Infinity marks a landing direction the aircraft cannot stop in.
std::string format_f6(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string json_number(double v) {
    // JSON has no infinity literal; unusable directions become null.
    if (std::isinf(v) || std::isnan(v)) {
        return "null";
    }
    return format_f6(v);
}

std::string rect_ring_json(const OrientedRect& rect) {
    const auto corners = rect.corners();
    std::string out = "[[";
    for (int i = 0; i < 5; ++i) {
        const Vec2& c = corners[static_cast<std::size_t>(i % 4)];
        if (i > 0) {
            out += ", [";
        }
        out += format_f6(c.x());
        out += ", ";
        out += format_f6(c.y());
        out += ']';
    }
    out += ']';
    return out;
}

std::string properties_json(const ElfRecord& r, std::size_t id) {
    std::string out = "{";
    out += "\"id\": " + std::to_string(id);
    out += ", \"length_m\": " + format_f6(r.length);
    out += ", \"width_m\": " + format_f6(r.width);
    out += ", \"rotation_rad\": " + format_f6(r.rect.rotation);
    out += ", \"slope_fwd_pct\": " + format_f6(r.slope_fwd_pct);
    out += ", \"slope_rev_pct\": " + format_f6(r.slope_rev_pct);
    out += ", \"required_length_fwd_m\": " + json_number(r.required_length_fwd);
    out += ", \"required_length_rev_m\": " + json_number(r.required_length_rev);
    out += std::string(", \"accepted\": ") + (r.accepted ? "true" : "false");
    out += std::string(", \"wet115\": ") + (r.wet115 ? "true" : "false");
    out += std::string(", \"wet160\": ") + (r.wet160 ? "true" : "false");
    out += "}";
    return out;
}

}  // namespace

void sort_records(std::vector<ElfRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ElfRecord& a, const ElfRecord& b) {
        if (a.rect.anchor.y() != b.rect.anchor.y()) return a.rect.anchor.y() < b.rect.anchor.y();
        if (a.rect.anchor.x() != b.rect.anchor.x()) return a.rect.anchor.x() < b.rect.anchor.x();
        if (a.rect.rotation != b.rect.rotation) return a.rect.rotation < b.rect.rotation;
        return a.length < b.length;
    });
}

void write_elf_geojson(const std::string& path, const std::vector<ElfRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write geojson file " + path);
    }
    out << "{\"type\": \"FeatureCollection\", \"features\": [\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << R"({"type": "Feature", "properties": )" << properties_json(records[i], i)
            << R"(, "geometry": {"type": "Polygon", "coordinates": [)"
            << rect_ring_json(records[i].rect) << "]}}" << (i + 1 < records.size() ? ",\n" : "\n");
    }
    out << "]}\n";
    if (!out) {
        throw std::runtime_error("short write on geojson file " + path);
    }
}

void write_elf_csv(const std::string& path, const std::vector<ElfRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write csv file " + path);
    }
    out << "id,wkt,length_m,width_m,rotation_rad,slope_fwd_pct,slope_rev_pct,"
           "required_length_fwd_m,required_length_rev_m,accepted,wet115,wet160\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ElfRecord& r = records[i];
        out << i << ",\"" << to_wkt(r.rect, 6) << "\"," << format_f6(r.length) << ','
            << format_f6(r.width) << ',' << format_f6(r.rect.rotation) << ','
            << format_f6(r.slope_fwd_pct) << ',' << format_f6(r.slope_rev_pct) << ','
            << format_f6(r.required_length_fwd) << ',' << format_f6(r.required_length_rev) << ','
            << (r.accepted ? 1 : 0) << ',' << (r.wet115 ? 1 : 0) << ',' << (r.wet160 ? 1 : 0)
            << '\n';
    }
    if (!out) {
        throw std::runtime_error("short write on csv file " + path);
    }
}

void write_elf_sql(const std::string& path, const std::vector<ElfRecord>& records,
                   const std::string& table) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write sql file " + path);
    }
    out << "-- elfkit export\n";
    out << "-- " << table
        << "(id, wkt, length_m, width_m, rotation_rad, slope_fwd_pct, slope_rev_pct,\n"
           "--   required_length_fwd_m, required_length_rev_m, accepted, wet115, wet160)\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ElfRecord& r = records[i];
        out << "INSERT INTO " << table << " VALUES (" << i << ", '" << to_wkt(r.rect, 6) << "', "
            << format_f6(r.length) << ", " << format_f6(r.width) << ", "
            << format_f6(r.rect.rotation) << ", " << format_f6(r.slope_fwd_pct) << ", "
            << format_f6(r.slope_rev_pct) << ", "
            << (std::isinf(r.required_length_fwd) ? "NULL" : format_f6(r.required_length_fwd))
            << ", "
            << (std::isinf(r.required_length_rev) ? "NULL" : format_f6(r.required_length_rev))
            << ", " << (r.accepted ? "TRUE" : "FALSE") << ", " << (r.wet115 ? "TRUE" : "FALSE")
            << ", " << (r.wet160 ? "TRUE" : "FALSE") << ");\n";
    }
    if (!out) {
        throw std::runtime_error("short write on sql file " + path);
    }
}

}  // namespace elfkit::io
