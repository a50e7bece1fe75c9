#include "elfkit/geo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace elfkit {

namespace {

constexpr double kGeomEps = 1e-9;

void check_ring(const Ring& ring, const char* what) {
    if (ring.size() < 4) {
        throw std::invalid_argument(std::string(what) + ": ring needs at least 4 vertices");
    }
    if ((ring.front() - ring.back()).norm() > kGeomEps) {
        throw std::invalid_argument(std::string(what) + ": ring is not closed");
    }
    for (const Vec2& v : ring) {
        if (!v.allFinite()) {
            throw std::invalid_argument(std::string(what) + ": non-finite vertex");
        }
    }
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const Vec2 ap = p - a;
    const double len = ab.norm();
    if (len < kGeomEps) {
        return ap.norm() <= kGeomEps;
    }
    const double perp = std::abs(ab.x() * ap.y() - ab.y() * ap.x()) / len;
    if (perp > kGeomEps) {
        return false;
    }
    const double t = ab.dot(ap) / (len * len);
    return t >= -kGeomEps && t <= 1.0 + kGeomEps;
}

// True iff any two non-adjacent edges of the ring properly cross.
bool ring_self_intersects(const Ring& ring) {
    const std::size_t n = ring.size() - 1;  // last vertex repeats the first
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                continue;
            }
            if (segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

GeoPolygon::GeoPolygon(Ring exterior, std::vector<Ring> holes, std::string crs)
    : exterior_(std::move(exterior)), holes_(std::move(holes)), crs_(std::move(crs)) {
    check_ring(exterior_, "polygon exterior");
    for (const Ring& hole : holes_) {
        check_ring(hole, "polygon hole");
    }
}

void GeoPolygon::validate_topology() const {
    if (ring_self_intersects(exterior_)) {
        throw std::invalid_argument("polygon exterior is self-intersecting");
    }
    for (const Ring& hole : holes_) {
        if (ring_self_intersects(hole)) {
            throw std::invalid_argument("polygon hole is self-intersecting");
        }
        for (const Vec2& v : hole) {
            if (locate_in_ring(exterior_, v) == RingLocation::Outside) {
                throw std::invalid_argument("polygon hole extends outside the exterior");
            }
        }
        for (std::size_t i = 0; i + 1 < hole.size(); ++i) {
            for (std::size_t j = 0; j + 1 < exterior_.size(); ++j) {
                if (segments_cross(hole[i], hole[i + 1], exterior_[j], exterior_[j + 1])) {
                    throw std::invalid_argument("polygon hole crosses the exterior");
                }
            }
        }
    }
}

std::array<Vec2, 4> OrientedRect::corners() const {
    const Eigen::Rotation2Dd rot(rotation);
    const Vec2 ex = rot * Vec2(length, 0.0);
    const Vec2 ey = rot * Vec2(0.0, width);
    return {anchor, anchor + ex, anchor + ex + ey, anchor + ey};
}

Vec2 OrientedRect::center() const {
    const Eigen::Rotation2Dd rot(rotation);
    return anchor + rot * Vec2(length / 2.0, width / 2.0);
}

Vec2 rotate(const Vec2& p, double angle, const Vec2& pivot) {
    return pivot + Eigen::Rotation2Dd(angle) * (p - pivot);
}

Ring rotate(const Ring& ring, double angle, const Vec2& pivot) {
    Ring out;
    out.reserve(ring.size());
    const Eigen::Rotation2Dd rot(angle);
    for (const Vec2& v : ring) {
        out.push_back(pivot + rot * (v - pivot));
    }
    return out;
}

GeoPolygon rotate(const GeoPolygon& polygon, double angle, const Vec2& pivot) {
    std::vector<Ring> holes;
    holes.reserve(polygon.holes().size());
    for (const Ring& hole : polygon.holes()) {
        holes.push_back(rotate(hole, angle, pivot));
    }
    return GeoPolygon(rotate(polygon.exterior(), angle, pivot), std::move(holes), polygon.crs());
}

OrientedRect rotate(const OrientedRect& rect, double angle, const Vec2& pivot) {
    OrientedRect out = rect;
    out.anchor = rotate(rect.anchor, angle, pivot);
    out.rotation = rect.rotation + angle;
    return out;
}

double ring_signed_area(const Ring& ring) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        acc += ring[i].x() * ring[i + 1].y() - ring[i + 1].x() * ring[i].y();
    }
    return acc / 2.0;
}

Vec2 centroid(const GeoPolygon& polygon) {
    const Ring& ring = polygon.exterior();
    const double area = ring_signed_area(ring);
    if (std::abs(area) < kGeomEps) {
        throw std::invalid_argument("centroid: degenerate polygon with zero area");
    }
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double w = ring[i].x() * ring[i + 1].y() - ring[i + 1].x() * ring[i].y();
        cx += (ring[i].x() + ring[i + 1].x()) * w;
        cy += (ring[i].y() + ring[i + 1].y()) * w;
    }
    return Vec2(cx / (6.0 * area), cy / (6.0 * area));
}

Bounds polygon_limits(const GeoPolygon& polygon) {
    Bounds b;
    b.x_min = b.y_min = std::numeric_limits<double>::infinity();
    b.x_max = b.y_max = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : polygon.exterior()) {
        b.x_min = std::min(b.x_min, v.x());
        b.x_max = std::max(b.x_max, v.x());
        b.y_min = std::min(b.y_min, v.y());
        b.y_max = std::max(b.y_max, v.y());
    }
    return b;
}

RingLocation locate_in_ring(const Ring& ring, const Vec2& p) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (point_on_segment(p, ring[i], ring[i + 1])) {
            return RingLocation::Boundary;
        }
    }
    // Crossing number over edges, half-open in y to avoid double counting
    // at vertices.
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[i + 1];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_hit = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (x_hit > p.x()) {
                inside = !inside;
            }
        }
    }
    return inside ? RingLocation::Inside : RingLocation::Outside;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(),
                                   c.cwiseAbs().maxCoeff(), d.cwiseAbs().maxCoeff()});
    const double eps = kGeomEps * scale;
    const double d1 = cross2(c, d, a);
    const double d2 = cross2(c, d, b);
    const double d3 = cross2(a, b, c);
    const double d4 = cross2(a, b, d);
    return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
           ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

bool polygon_contains_point(const GeoPolygon& polygon, const Vec2& p) {
    const RingLocation ext = locate_in_ring(polygon.exterior(), p);
    if (ext == RingLocation::Outside) {
        return false;
    }
    if (ext == RingLocation::Boundary) {
        return true;
    }
    for (const Ring& hole : polygon.holes()) {
        if (locate_in_ring(hole, p) == RingLocation::Inside) {
            return false;
        }
    }
    return true;
}

bool contains(const GeoPolygon& polygon, const OrientedRect& rect) {
    const auto corners = rect.corners();
    for (const Vec2& corner : corners) {
        if (!polygon_contains_point(polygon, corner)) {
            return false;
        }
    }

    auto rect_edge_crosses_ring = [&](const Ring& ring) {
        for (int e = 0; e < 4; ++e) {
            const Vec2& a = corners[e];
            const Vec2& b = corners[(e + 1) % 4];
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                if (segments_cross(a, b, ring[i], ring[i + 1])) {
                    return true;
                }
            }
        }
        return false;
    };

    if (rect_edge_crosses_ring(polygon.exterior())) {
        return false;
    }
    for (const Ring& hole : polygon.holes()) {
        if (rect_edge_crosses_ring(hole)) {
            return false;
        }
        // A hole fully swallowed by the rectangle produces no edge
        // crossing; catch it through its vertices.
        const Eigen::Rotation2Dd inv(-rect.rotation);
        for (std::size_t i = 0; i + 1 < hole.size(); ++i) {
            const Vec2 local = inv * (hole[i] - rect.anchor);
            if (local.x() > kGeomEps && local.x() < rect.length - kGeomEps &&
                local.y() > kGeomEps && local.y() < rect.width - kGeomEps) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace elfkit
