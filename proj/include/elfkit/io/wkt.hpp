#pragma once

#include <string>

#include "elfkit/geo.hpp"

namespace elfkit::io {

/// POLYGON well-known text. `precision` is the fixed decimal count; 17
/// significant digits (precision < 0) round-trip exactly.
std::string to_wkt(const GeoPolygon& polygon, int precision = -1);
std::string to_wkt(const OrientedRect& rect, int precision = -1);

GeoPolygon polygon_from_wkt(const std::string& wkt);

}  // namespace elfkit::io
