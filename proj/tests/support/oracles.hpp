// Independent reference implementations used by the unit and acceptance
// suites. Everything here is deliberately written from the definitions,
// without calling the library code paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "elfkit/geo.hpp"
#include "elfkit/raster.hpp"
#include "elfkit/segmentation.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Scattered-data / raster references
// ---------------------------------------------------------------------------

/// All-pairs IDW: nearest max_points within radius, d^-power weights,
/// exact value on a zero-distance hit.
inline double idw_value(const elfkit::PointCloud& cloud, double cx, double cy, double power,
                        double radius, int max_points, double nodata) {
    struct Hit {
        double d2;
        std::size_t i;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const double dx = cloud.points[i].x() - cx;
        const double dy = cloud.points[i].y() - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= radius * radius) {
            hits.push_back({d2, i});
        }
    }
    if (hits.empty()) {
        return nodata;
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.d2 != b.d2 ? a.d2 < b.d2 : a.i < b.i; });
    if (hits.size() > static_cast<std::size_t>(max_points)) {
        hits.resize(static_cast<std::size_t>(max_points));
    }
    if (hits.front().d2 < 1e-24) {
        return cloud.points[hits.front().i].z();
    }
    double wsum = 0.0;
    double vsum = 0.0;
    for (const Hit& h : hits) {
        const double w = std::pow(std::sqrt(h.d2), -power);
        wsum += w;
        vsum += w * cloud.points[h.i].z();
    }
    return vsum / wsum;
}

/// Closed-form bilinear interpolation at (x, y) over the source lattice,
/// clamped to the cell-center hull.
inline double bilinear_value(const elfkit::GridRaster& src, double x, double y) {
    const double gx = std::clamp((x - src.origin_x()) / src.res_x() - 0.5, 0.0,
                                 static_cast<double>(src.width() - 1));
    const double gy = std::clamp((src.origin_y() - y) / src.res_y() - 0.5, 0.0,
                                 static_cast<double>(src.height() - 1));
    const auto c0 = static_cast<Eigen::Index>(std::floor(gx));
    const auto r0 = static_cast<Eigen::Index>(std::floor(gy));
    const Eigen::Index c1 = std::min(c0 + 1, src.width() - 1);
    const Eigen::Index r1 = std::min(r0 + 1, src.height() - 1);
    const double fx = gx - static_cast<double>(c0);
    const double fy = gy - static_cast<double>(r0);
    const double v00 = src.at(r0, c0);
    const double v01 = src.at(r0, c1);
    const double v10 = src.at(r1, c0);
    const double v11 = src.at(r1, c1);
    if (src.is_nodata(v00) || src.is_nodata(v01) || src.is_nodata(v10) || src.is_nodata(v11)) {
        return src.nodata();
    }
    return v00 * (1 - fx) * (1 - fy) + v01 * fx * (1 - fy) + v10 * (1 - fx) * fy + v11 * fx * fy;
}

struct HornGradient {
    double dzdx = 0.0;  // east
    double dzdy = 0.0;  // north
    bool valid = false;
};

/// Hand-rolled Horn 3x3 kernel, straight from the stencil weights.
inline HornGradient horn_at(const elfkit::GridRaster& dsm, Eigen::Index r, Eigen::Index c) {
    HornGradient g;
    if (r < 1 || c < 1 || r + 1 >= dsm.height() || c + 1 >= dsm.width()) {
        return g;
    }
    const double nw = dsm.at(r - 1, c - 1), n = dsm.at(r - 1, c), ne = dsm.at(r - 1, c + 1);
    const double w = dsm.at(r, c - 1), e = dsm.at(r, c + 1);
    const double sw = dsm.at(r + 1, c - 1), s = dsm.at(r + 1, c), se = dsm.at(r + 1, c + 1);
    for (double v : {nw, n, ne, w, dsm.at(r, c), e, sw, s, se}) {
        if (dsm.is_nodata(v)) {
            return g;
        }
    }
    g.dzdx = ((ne + 2 * e + se) - (nw + 2 * w + sw)) / (8.0 * dsm.res_x());
    g.dzdy = ((nw + 2 * n + ne) - (sw + 2 * s + se)) / (8.0 * dsm.res_x());
    g.valid = true;
    return g;
}

inline double slope_degrees_at(const elfkit::GridRaster& dsm, Eigen::Index r, Eigen::Index c,
                               double nodata) {
    const HornGradient g = horn_at(dsm, r, c);
    if (!g.valid) {
        return nodata;
    }
    return std::atan(std::hypot(g.dzdx, g.dzdy)) * 180.0 / M_PI;
}

inline double roughness_at(const elfkit::GridRaster& dsm, Eigen::Index r, Eigen::Index c,
                           double nodata) {
    if (r < 1 || c < 1 || r + 1 >= dsm.height() || c + 1 >= dsm.width()) {
        return nodata;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index dr = -1; dr <= 1; ++dr) {
        for (Eigen::Index dc = -1; dc <= 1; ++dc) {
            const double v = dsm.at(r + dr, c + dc);
            if (dsm.is_nodata(v)) {
                return nodata;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return hi - lo;
}

inline double hillshade_at(const elfkit::GridRaster& dsm, Eigen::Index r, Eigen::Index c,
                           double azimuth_deg, double altitude_deg, double nodata) {
    const HornGradient g = horn_at(dsm, r, c);
    if (!g.valid) {
        return nodata;
    }
    const double slope_rad = std::atan(std::hypot(g.dzdx, g.dzdy));
    const double aspect = std::atan2(-g.dzdx, -g.dzdy);
    const double zenith = (90.0 - altitude_deg) * M_PI / 180.0;
    const double az = azimuth_deg * M_PI / 180.0;
    const double cosi = std::cos(zenith) * std::cos(slope_rad) +
                        std::sin(zenith) * std::sin(slope_rad) * std::cos(az - aspect);
    return std::round(255.0 * std::clamp(cosi, 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Planar geometry references
// ---------------------------------------------------------------------------

struct Pt {
    double x = 0.0;
    double y = 0.0;
};

using RefRing = std::vector<Pt>;  // closed

struct RefPolygon {
    RefRing exterior;
    std::vector<RefRing> holes;
};

inline RefPolygon to_ref(const elfkit::GeoPolygon& poly) {
    RefPolygon out;
    for (const elfkit::Vec2& v : poly.exterior()) {
        out.exterior.push_back({v.x(), v.y()});
    }
    for (const elfkit::Ring& hole : poly.holes()) {
        RefRing ring;
        for (const elfkit::Vec2& v : hole) {
            ring.push_back({v.x(), v.y()});
        }
        out.holes.push_back(std::move(ring));
    }
    return out;
}

inline double shoelace_area(const RefRing& ring) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        a += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    }
    return 0.5 * a;
}

inline Pt shoelace_centroid(const RefRing& ring) {
    const double a = shoelace_area(ring);
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double w = ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
        cx += (ring[i].x + ring[i + 1].x) * w;
        cy += (ring[i].y + ring[i + 1].y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

inline bool ref_on_segment(const Pt& p, const Pt& a, const Pt& b, double eps = 1e-9) {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double apx = p.x - a.x;
    const double apy = p.y - a.y;
    const double len = std::hypot(abx, aby);
    if (len < eps) {
        return std::hypot(apx, apy) <= eps;
    }
    if (std::abs(abx * apy - aby * apx) / len > eps) {
        return false;
    }
    const double t = (abx * apx + aby * apy) / (len * len);
    return t >= -eps && t <= 1.0 + eps;
}

/// Crossing-number point-in-ring with boundary reported separately.
/// Returns 0 outside, 1 on the boundary, 2 inside.
inline int ref_locate(const RefRing& ring, const Pt& p) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (ref_on_segment(p, ring[i], ring[i + 1])) {
            return 1;
        }
    }
    int crossings = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const Pt& a = ring[i];
        const Pt& b = ring[i + 1];
        if ((a.y <= p.y && b.y > p.y) || (b.y <= p.y && a.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            if (a.x + t * (b.x - a.x) > p.x) {
                ++crossings;
            }
        }
    }
    return crossings % 2 == 1 ? 2 : 0;
}

inline bool ref_point_in_polygon(const RefPolygon& poly, const Pt& p) {
    const int loc = ref_locate(poly.exterior, p);
    if (loc == 0) {
        return false;
    }
    if (loc == 1) {
        return true;
    }
    for (const RefRing& hole : poly.holes) {
        if (ref_locate(hole, p) == 2) {
            return false;
        }
    }
    return true;
}

/// Parametric proper-crossing test; touching and collinear overlap do not
/// count.
inline bool ref_segments_cross(const Pt& a, const Pt& b, const Pt& c, const Pt& d,
                               double eps = 1e-9) {
    const double rx = b.x - a.x;
    const double ry = b.y - a.y;
    const double sx = d.x - c.x;
    const double sy = d.y - c.y;
    const double den = rx * sy - ry * sx;
    const double scale = std::max({1.0, std::abs(a.x), std::abs(a.y), std::abs(c.x),
                                   std::abs(c.y), std::abs(b.x), std::abs(b.y)});
    if (std::abs(den) < eps * scale) {
        return false;  // parallel or collinear
    }
    const double qpx = c.x - a.x;
    const double qpy = c.y - a.y;
    const double t = (qpx * sy - qpy * sx) / den;
    const double u = (qpx * ry - qpy * rx) / den;
    const double te = eps * scale / std::max(eps, std::hypot(rx, ry));
    const double ue = eps * scale / std::max(eps, std::hypot(sx, sy));
    return t > te && t < 1.0 - te && u > ue && u < 1.0 - ue;
}

struct RefRect {
    double min_x = 0.0;
    double min_y = 0.0;
    double length = 0.0;
    double width = 0.0;
};

/// Axis-aligned rectangle containment: corners inside, no proper edge
/// crossing, no hole vertex strictly inside the rectangle.
inline bool ref_contains_rect(const RefPolygon& poly, const RefRect& rect) {
    const Pt corners[4] = {{rect.min_x, rect.min_y},
                           {rect.min_x + rect.length, rect.min_y},
                           {rect.min_x + rect.length, rect.min_y + rect.width},
                           {rect.min_x, rect.min_y + rect.width}};
    for (const Pt& corner : corners) {
        if (!ref_point_in_polygon(poly, corner)) {
            return false;
        }
    }
    auto crosses_ring = [&](const RefRing& ring) {
        for (int e = 0; e < 4; ++e) {
            const Pt& a = corners[e];
            const Pt& b = corners[(e + 1) % 4];
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                if (ref_segments_cross(a, b, ring[i], ring[i + 1])) {
                    return true;
                }
            }
        }
        return false;
    };
    if (crosses_ring(poly.exterior)) {
        return false;
    }
    for (const RefRing& hole : poly.holes) {
        if (crosses_ring(hole)) {
            return false;
        }
        for (const Pt& v : hole) {
            if (v.x > rect.min_x + 1e-9 && v.x < rect.min_x + rect.length - 1e-9 &&
                v.y > rect.min_y + 1e-9 && v.y < rect.min_y + rect.width - 1e-9) {
                return false;
            }
        }
    }
    return true;
}

/// Dense sampling containment: a grid of probe points across the
/// rectangle, all of which must land inside the polygon.
inline bool sampled_contains_rect(const elfkit::GeoPolygon& poly, const elfkit::OrientedRect& rect,
                                  double pitch) {
    const RefPolygon ref = to_ref(poly);
    const double cr = std::cos(rect.rotation);
    const double sr = std::sin(rect.rotation);
    const auto nx = static_cast<int>(std::ceil(rect.length / pitch));
    const auto ny = static_cast<int>(std::ceil(rect.width / pitch));
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= ny; ++j) {
            const double lx = std::min(rect.length, i * pitch);
            const double ly = std::min(rect.width, j * pitch);
            const Pt p{rect.anchor.x() + cr * lx - sr * ly, rect.anchor.y() + sr * lx + cr * ly};
            if (!ref_point_in_polygon(ref, p)) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Rotation-sweep placement reference (exhaustive, same discretization)
// ---------------------------------------------------------------------------

struct RefPlacement {
    double angle = 0.0;  // radians the polygon was rotated by
    RefRect rect;        // in rotated-polygon coordinates
};

inline RefPolygon ref_rotate(const RefPolygon& poly, double angle, const Pt& pivot) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    auto rot_ring = [&](const RefRing& ring) {
        RefRing out;
        out.reserve(ring.size());
        for (const Pt& v : ring) {
            const double dx = v.x - pivot.x;
            const double dy = v.y - pivot.y;
            out.push_back({pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy});
        }
        return out;
    };
    RefPolygon out;
    out.exterior = rot_ring(poly.exterior);
    for (const RefRing& hole : poly.holes) {
        out.holes.push_back(rot_ring(hole));
    }
    return out;
}

/// Direct transliteration of the rotation sweep: every angle, every y row
/// at a width/2 pitch, x shifts of 1 m, lengthwise growth of 1 m until
/// containment fails, then the skip of grown length + 1. Returns the
/// placements in rotated coordinates plus the pivot used.
inline std::vector<RefPlacement> ref_find_elfs(const elfkit::GeoPolygon& polygon,
                                               double elf_length, double elf_width, Pt* pivot_out) {
    const RefPolygon base = to_ref(polygon);
    const Pt pivot = shoelace_centroid(base.exterior);
    if (pivot_out != nullptr) {
        *pivot_out = pivot;
    }
    const double stride = elf_width / 2.0;
    std::vector<RefPlacement> out;

    for (int deg = 0; deg < 180; deg += 4) {
        const double angle = deg * M_PI / 180.0;
        const RefPolygon poi = deg == 0 ? base : ref_rotate(base, angle, pivot);
        double x_min = std::numeric_limits<double>::infinity();
        double x_max = -x_min;
        double y_min = x_min;
        double y_max = x_max;
        for (const Pt& v : poi.exterior) {
            x_min = std::min(x_min, v.x);
            x_max = std::max(x_max, v.x);
            y_min = std::min(y_min, v.y);
            y_max = std::max(y_max, v.y);
        }
        const double dx = x_max - x_min;
        const double dy = y_max - y_min;
        if (dx < elf_length || dy < elf_width) {
            continue;
        }
        const auto n_y = static_cast<long long>(std::floor(dy / stride)) + 1;
        for (long long iy = 0; iy <= n_y; ++iy) {
            const double y0 = y_min + static_cast<double>(iy) * stride;
            double x_shift = 0.0;
            while (dx - x_shift >= elf_length) {
                RefRect rect{x_min + x_shift, y0, elf_length, elf_width};
                if (!ref_contains_rect(poi, rect)) {
                    x_shift += 1.0;
                    continue;
                }
                RefRect last = rect;
                int resize = 1;
                for (;;) {
                    RefRect grown = rect;
                    grown.length = elf_length + static_cast<double>(resize);
                    ++resize;
                    if (!ref_contains_rect(poi, grown)) {
                        break;
                    }
                    last = grown;
                }
                out.push_back({angle, last});
                x_shift += static_cast<double>(resize) + 1.0;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cascade reference: materialize every stage, then apply the selection and
// voting rules to the full table.
// ---------------------------------------------------------------------------

struct RefStagePrediction {
    double min_x, min_y, sw;
    int label;
    double confidence;
};

struct RefCascadeResult {
    std::vector<int> labels;          // finest lattice, row-major
    std::vector<double> confidences;  // mean over contributions
};

inline RefCascadeResult ref_cascade(double origin_x, double origin_y, double extent_x,
                                    double extent_y,
                                    const std::vector<elfkit::StageSpec>& stages, double threshold,
                                    double confidence_scale = 1.0) {
    auto windows = [](double extent, double sw, double stride) {
        if (extent + 1e-9 < sw) {
            return static_cast<long long>(0);
        }
        return static_cast<long long>(std::floor((extent - sw) / stride + 1e-9)) + 1;
    };

    // Materialize every stage everywhere.
    std::vector<std::vector<RefStagePrediction>> all(stages.size());
    std::vector<double> strides(stages.size());
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const double sw = stages[s].sw;
        const double stride = stages[s].stride > 0.0 ? stages[s].stride : sw / 2.0;
        strides[s] = stride;
        const long long nx = windows(extent_x, sw, stride);
        const long long ny = windows(extent_y, sw, stride);
        for (long long iy = 0; iy < ny; ++iy) {
            for (long long ix = 0; ix < nx; ++ix) {
                elfkit::PatchFootprint patch;
                patch.index = iy * nx + ix;
                patch.min_x = origin_x + static_cast<double>(ix) * stride;
                patch.min_y = origin_y + static_cast<double>(iy) * stride;
                patch.sw = sw;
                const elfkit::PatchPrediction p = stages[s].classifier->classify(patch);
                all[s].push_back({patch.min_x, patch.min_y, sw, p.label,
                                  confidence_scale * (p.p_max - 0.5) / 0.5});
            }
        }
    }

    const double fine_sw = stages.back().sw;
    const double fine_stride = strides.back();
    const long long nfx = windows(extent_x, fine_sw, fine_stride);
    const long long nfy = windows(extent_y, fine_sw, fine_stride);
    const std::size_t n_cells = static_cast<std::size_t>(nfx * nfy);

    std::vector<std::vector<RefStagePrediction>> acc(n_cells);
    auto covers = [&](const RefStagePrediction& p, long long ix, long long iy) {
        const double fx = origin_x + static_cast<double>(ix) * fine_stride;
        const double fy = origin_y + static_cast<double>(iy) * fine_stride;
        return p.min_x <= fx + 1e-9 && fx + fine_sw <= p.min_x + p.sw + 1e-9 &&
               p.min_y <= fy + 1e-9 && fy + fine_sw <= p.min_y + p.sw + 1e-9;
    };
    auto vote_label = [](const std::vector<RefStagePrediction>& preds) {
        double mass1 = 0.0;
        double mass0 = 0.0;
        for (const RefStagePrediction& p : preds) {
            (p.label == 1 ? mass1 : mass0) += p.confidence;
        }
        return mass1 > mass0 ? 1 : 0;
    };
    auto open = [&](const std::vector<RefStagePrediction>& preds) {
        if (preds.empty()) {
            return true;
        }
        double sum = 0.0;
        for (const RefStagePrediction& p : preds) {
            sum += p.confidence;
        }
        return sum / static_cast<double>(preds.size()) < threshold || vote_label(preds) == 1;
    };

    for (std::size_t s = 0; s < stages.size(); ++s) {
        std::vector<char> open_now(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i) {
            open_now[i] = open(acc[i]);
        }
        for (const RefStagePrediction& p : all[s]) {
            bool run = (s == 0);
            if (!run) {
                for (long long iy = 0; iy < nfy && !run; ++iy) {
                    for (long long ix = 0; ix < nfx; ++ix) {
                        if (covers(p, ix, iy) &&
                            open_now[static_cast<std::size_t>(iy * nfx + ix)]) {
                            run = true;
                            break;
                        }
                    }
                }
            }
            if (!run) {
                continue;
            }
            for (long long iy = 0; iy < nfy; ++iy) {
                for (long long ix = 0; ix < nfx; ++ix) {
                    if (covers(p, ix, iy)) {
                        acc[static_cast<std::size_t>(iy * nfx + ix)].push_back(p);
                    }
                }
            }
        }
    }

    RefCascadeResult result;
    result.labels.resize(n_cells, 0);
    result.confidences.resize(n_cells, 0.0);
    for (std::size_t i = 0; i < n_cells; ++i) {
        if (acc[i].empty()) {
            continue;
        }
        result.labels[i] = vote_label(acc[i]);
        double sum = 0.0;
        for (const RefStagePrediction& p : acc[i]) {
            sum += p.confidence;
        }
        result.confidences[i] = sum / static_cast<double>(acc[i].size());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Random geometry generators
// ---------------------------------------------------------------------------

/// Random convex polygon: a convex hull of points on a jittered circle.
inline elfkit::GeoPolygon random_convex_polygon(std::mt19937_64& rng, double cx, double cy,
                                                double radius, int vertices) {
    std::uniform_real_distribution<double> jitter(0.55, 1.0);
    std::vector<double> angles;
    std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * M_PI);
    for (int i = 0; i < vertices; ++i) {
        angles.push_back(angle_dist(rng));
    }
    std::sort(angles.begin(), angles.end());
    elfkit::Ring ring;
    for (double a : angles) {
        const double r = radius * jitter(rng);
        ring.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    ring.push_back(ring.front());
    return elfkit::GeoPolygon(ring);
}

/// Random star-shaped (generally concave) polygon around a center.
inline elfkit::GeoPolygon random_concave_polygon(std::mt19937_64& rng, double cx, double cy,
                                                 double radius, int vertices) {
    std::uniform_real_distribution<double> jitter(0.35, 1.0);
    elfkit::Ring ring;
    for (int i = 0; i < vertices; ++i) {
        const double a = 2.0 * M_PI * static_cast<double>(i) / vertices;
        const double r = radius * jitter(rng);
        ring.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    ring.push_back(ring.front());
    return elfkit::GeoPolygon(ring);
}

}  // namespace oracles
