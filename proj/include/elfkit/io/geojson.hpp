#pragma once

#include <string>
#include <vector>

#include "elfkit/geo.hpp"

namespace elfkit::io {

/// Polygon feature with an integer `label` property (0 unlandable,
/// 1 landable), as used by the dataset labeling workflow.
struct LabeledPolygon {
    GeoPolygon polygon;
    int label = 0;
};

/// RFC 7946 geometry text ([x, y] order, exterior counter-clockwise,
/// holes clockwise). Coordinates use fixed 6-decimal formatting so equal
/// inputs serialize byte-identically.
std::string polygon_to_geojson(const GeoPolygon& polygon);

GeoPolygon polygon_from_geojson(const std::string& text);

/// FeatureCollection of bare polygons (no properties).
void write_polygon_collection(const std::string& path, const std::vector<GeoPolygon>& polygons);
std::vector<GeoPolygon> read_polygon_collection(const std::string& path);

/// FeatureCollection whose features carry a `label` property.
std::vector<LabeledPolygon> read_labeled_polygons(const std::string& path);
void write_labeled_polygons(const std::string& path, const std::vector<LabeledPolygon>& labels);

}  // namespace elfkit::io
