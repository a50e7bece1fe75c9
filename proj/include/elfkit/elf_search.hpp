#pragma once

#include <vector>

#include "elfkit/geo.hpp"
#include "elfkit/ground_roll.hpp"
#include "elfkit/raster.hpp"

namespace elfkit {

/// A candidate rectangle, evaluated against the ground-roll model in both
/// landing directions. Slopes are signed in the forward direction (anchor
/// end toward the far end); the reverse direction negates them.
struct ElfRecord {
    OrientedRect rect;
    double length = 0.0;
    double width = 0.0;
    double slope_fwd_pct = 0.0;
    double slope_rev_pct = 0.0;
    double required_length_fwd = 0.0;  // +inf when the direction cannot stop the aircraft
    double required_length_rev = 0.0;
    bool accepted = false;
    bool wet115 = false;  // accepted under the grass factor 1.15
    bool wet160 = false;  // accepted under the wet short grass factor 1.6
};

/// Rotation-sweep placement of rectangles of at least elf_length x
/// elf_width inside the polygon. The polygon is rotated about its centroid
/// through 0, 4, ..., 176 degrees; at each angle, axis-aligned candidates
/// are swept at a y pitch of elf_width/2 and an x pitch of 1 m, grown
/// lengthwise in 1 m steps while they remain contained, and emitted after
/// back-rotation. Undersized polygons yield an empty list.
std::vector<OrientedRect> find_elfs(const GeoPolygon& polygon, double elf_length,
                                    double elf_width);

struct ProfilePoint {
    double distance = 0.0;  // along the center line, from the anchor end
    double z = 0.0;
};

/// DSM elevations sampled bilinearly along the rectangle's long-axis
/// center line at sample_step intervals (the end point is always
/// included). Throws when the rectangle leaves the raster or a station
/// hits nodata.
std::vector<ProfilePoint> center_line_profile(const GridRaster& dsm, const OrientedRect& rect,
                                              double sample_step = 1.0);

struct ProfileSlopes {
    double regression_pct = 0.0;  // least-squares line fit
    double endpoint_pct = 0.0;    // start-to-end elevation difference
};

ProfileSlopes profile_slope(const std::vector<ProfilePoint>& profile);

/// Scores one rectangle: per landing direction the slope measure with the
/// larger magnitude fixes alpha and the required length; acceptance needs
/// one direction with enough length and a slope above -10%.
ElfRecord evaluate_elf(const OrientedRect& rect, const GridRaster& dsm,
                       const AircraftConfig& config, const Atmosphere& atm,
                       double surface_factor);

}  // namespace elfkit
