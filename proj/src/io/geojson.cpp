#include "elfkit/io/geojson.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace elfkit::io {

namespace {

using nlohmann::json;

std::string format_f6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

Ring oriented(Ring ring, bool counter_clockwise) {
    if ((ring_signed_area(ring) > 0.0) != counter_clockwise) {
        std::reverse(ring.begin(), ring.end());
    }
    return ring;
}

void append_ring_json(std::string& out, const Ring& ring) {
    out += '[';
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += '[';
        out += format_f6(ring[i].x());
        out += ", ";
        out += format_f6(ring[i].y());
        out += ']';
    }
    out += ']';
}

std::string geometry_text(const GeoPolygon& polygon) {
    std::string out = R"({"type": "Polygon", "coordinates": [)";
    append_ring_json(out, oriented(polygon.exterior(), true));
    for (const Ring& hole : polygon.holes()) {
        out += ", ";
        append_ring_json(out, oriented(hole, false));
    }
    out += "]}";
    return out;
}

Ring ring_from_json(const json& coords) {
    Ring ring;
    for (const json& pair : coords) {
        if (!pair.is_array() || pair.size() < 2) {
            throw std::invalid_argument("geojson: coordinate pair expected");
        }
        ring.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return ring;
}

GeoPolygon polygon_from_json(const json& geometry) {
    if (geometry.value("type", "") != "Polygon") {
        throw std::invalid_argument("geojson: only Polygon geometries are supported");
    }
    const json& coords = geometry.at("coordinates");
    if (!coords.is_array() || coords.empty()) {
        throw std::invalid_argument("geojson: Polygon needs at least one ring");
    }
    Ring exterior = oriented(ring_from_json(coords[0]), true);
    std::vector<Ring> holes;
    for (std::size_t i = 1; i < coords.size(); ++i) {
        holes.push_back(oriented(ring_from_json(coords[i]), false));
    }
    GeoPolygon polygon(std::move(exterior), std::move(holes));
    polygon.validate_topology();
    return polygon;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open geojson file " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("geojson file " + path + ": " + e.what());
    }
    return doc;
}

const json& features_of(const json& doc, const std::string& path) {
    if (doc.value("type", "") != "FeatureCollection") {
        throw std::runtime_error("geojson file " + path + ": expected a FeatureCollection");
    }
    return doc.at("features");
}

}  // namespace

std::string polygon_to_geojson(const GeoPolygon& polygon) { return geometry_text(polygon); }

GeoPolygon polygon_from_geojson(const std::string& text) {
    return polygon_from_json(json::parse(text));
}

void write_polygon_collection(const std::string& path, const std::vector<GeoPolygon>& polygons) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write geojson file " + path);
    }
    out << "{\"type\": \"FeatureCollection\", \"features\": [\n";
    for (std::size_t i = 0; i < polygons.size(); ++i) {
        out << R"({"type": "Feature", "properties": {"id": )" << i << "}, \"geometry\": "
            << geometry_text(polygons[i]) << '}' << (i + 1 < polygons.size() ? ",\n" : "\n");
    }
    out << "]}\n";
    if (!out) {
        throw std::runtime_error("short write on geojson file " + path);
    }
}

std::vector<GeoPolygon> read_polygon_collection(const std::string& path) {
    const json doc = parse_file(path);
    std::vector<GeoPolygon> polygons;
    for (const json& feature : features_of(doc, path)) {
        polygons.push_back(polygon_from_json(feature.at("geometry")));
    }
    return polygons;
}

std::vector<LabeledPolygon> read_labeled_polygons(const std::string& path) {
    const json doc = parse_file(path);
    std::vector<LabeledPolygon> labels;
    for (const json& feature : features_of(doc, path)) {
        LabeledPolygon lp;
        lp.polygon = polygon_from_json(feature.at("geometry"));
        const json& props = feature.at("properties");
        if (!props.contains("label")) {
            throw std::runtime_error("geojson file " + path + ": feature without a label");
        }
        lp.label = props.at("label").get<int>();
        if (lp.label != 0 && lp.label != 1) {
            throw std::runtime_error("geojson file " + path + ": label must be 0 or 1");
        }
        labels.push_back(std::move(lp));
    }
    return labels;
}

void write_labeled_polygons(const std::string& path, const std::vector<LabeledPolygon>& labels) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write geojson file " + path);
    }
    out << "{\"type\": \"FeatureCollection\", \"features\": [\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << R"({"type": "Feature", "properties": {"label": )" << labels[i].label
            << "}, \"geometry\": " << geometry_text(labels[i].polygon) << '}'
            << (i + 1 < labels.size() ? ",\n" : "\n");
    }
    out << "]}\n";
    if (!out) {
        throw std::runtime_error("short write on geojson file " + path);
    }
}

}  // namespace elfkit::io
