#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace elfkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Closed vertex ring: front() == back(), at least 4 entries.
using Ring = std::vector<Vec2>;

/// Axis-aligned bounds in the (y_min, y_max, x_min, x_max) order used by
/// the rectangle-placement sweep.
struct Bounds {
    double y_min = 0.0;
    double y_max = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

/// Planar polygon in a projected metric CRS. The CRS is an opaque tag; no
/// reprojection happens anywhere in the pipeline.
class GeoPolygon {
  public:
    GeoPolygon() = default;
    GeoPolygon(Ring exterior, std::vector<Ring> holes = {}, std::string crs = "");

    const Ring& exterior() const { return exterior_; }
    const std::vector<Ring>& holes() const { return holes_; }
    const std::string& crs() const { return crs_; }

    /// Full topology check: simple exterior, holes fully inside the
    /// exterior. O(n^2) segment tests; run on untrusted input.
    void validate_topology() const;

  private:
    Ring exterior_;
    std::vector<Ring> holes_;
    std::string crs_;
};

/// Rectangle with an arbitrary in-plane rotation. `anchor` is corner 0 and
/// the rotation pivot; `length` extends along the local +x axis, `width`
/// along local +y. Corners derive bit-identically from the four fields.
struct OrientedRect {
    Vec2 anchor = Vec2::Zero();
    double length = 0.0;
    double width = 0.0;
    double rotation = 0.0;  // radians, counter-clockwise

    std::array<Vec2, 4> corners() const;
    Vec2 center() const;
};

struct PointCloud {
    std::vector<Vec3> points;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

// Rotations are counter-clockwise positive, in radians.
Vec2 rotate(const Vec2& p, double angle, const Vec2& pivot);
Ring rotate(const Ring& ring, double angle, const Vec2& pivot);
GeoPolygon rotate(const GeoPolygon& polygon, double angle, const Vec2& pivot);
OrientedRect rotate(const OrientedRect& rect, double angle, const Vec2& pivot);

/// Area-weighted centroid of the exterior ring (shoelace). Throws
/// std::invalid_argument for degenerate (zero-area) polygons.
Vec2 centroid(const GeoPolygon& polygon);

/// Signed shoelace area of a closed ring (positive for counter-clockwise).
double ring_signed_area(const Ring& ring);

/// Axis-aligned bounding box of the exterior ring.
Bounds polygon_limits(const GeoPolygon& polygon);

/// Point-in-polygon with boundary counting as inside. Points strictly
/// inside a hole are outside; points on a hole boundary are inside.
bool polygon_contains_point(const GeoPolygon& polygon, const Vec2& p);

/// True iff the rectangle lies inside the polygon: all four corners inside
/// (boundary counts), no rectangle edge properly crossing any ring, and no
/// hole poking into the rectangle.
bool contains(const GeoPolygon& polygon, const OrientedRect& rect);

/// Location of a point relative to a single closed ring.
enum class RingLocation { Outside, Boundary, Inside };
RingLocation locate_in_ring(const Ring& ring, const Vec2& p);

/// True iff segments ab and cd cross at a point interior to both.
/// Touching endpoints and collinear overlap do not count.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace elfkit
