#include "elfkit/raster_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace elfkit {

namespace {

constexpr double kExactHitDistance = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// Spatial hash with bucket size = search radius, so a 3x3 bucket
// neighborhood covers every candidate disc.
class BucketIndex {
  public:
    BucketIndex(const PointCloud& cloud, double bucket) : cloud_(cloud), bucket_(bucket) {
        for (std::size_t i = 0; i < cloud.points.size(); ++i) {
            buckets_[key(cloud.points[i].x(), cloud.points[i].y())].push_back(i);
        }
    }

    template <typename Fn>
    void for_each_near(double x, double y, Fn&& fn) const {
        const std::int64_t bx = cell(x);
        const std::int64_t by = cell(y);
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                const auto it = buckets_.find(pack(bx + dx, by + dy));
                if (it == buckets_.end()) {
                    continue;
                }
                for (std::size_t idx : it->second) {
                    fn(idx);
                }
            }
        }
    }

  private:
    std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / bucket_)); }
    static std::uint64_t pack(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
    }
    std::uint64_t key(double x, double y) const { return pack(cell(x), cell(y)); }

    const PointCloud& cloud_;
    double bucket_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

struct Candidate {
    double dist2;
    std::size_t index;
};

void require_square_pixels(const GridRaster& dsm, const char* op) {
    if (std::abs(dsm.res_x() - dsm.res_y()) > 1e-12) {
        throw std::invalid_argument(std::string(op) + ": requires res_x == res_y");
    }
}

// Horn gradient over the 3x3 window centered at (r, c). Returns false when
// the window touches the border or contains nodata. dzdx points east,
// dzdy north.
bool horn_gradient(const GridRaster& dsm, Eigen::Index r, Eigen::Index c, double* dzdx,
                   double* dzdy) {
    if (r == 0 || c == 0 || r + 1 >= dsm.height() || c + 1 >= dsm.width()) {
        return false;
    }
    double w[9];
    int k = 0;
    for (Eigen::Index dr = -1; dr <= 1; ++dr) {
        for (Eigen::Index dc = -1; dc <= 1; ++dc) {
            w[k] = dsm.at(r + dr, c + dc);
            if (dsm.is_nodata(w[k])) {
                return false;
            }
            ++k;
        }
    }
    const double res = dsm.res_x();
    // Window layout: 0 1 2 / 3 4 5 / 6 7 8, row 0 at the north.
    *dzdx = ((w[2] + 2.0 * w[5] + w[8]) - (w[0] + 2.0 * w[3] + w[6])) / (8.0 * res);
    *dzdy = ((w[0] + 2.0 * w[1] + w[2]) - (w[6] + 2.0 * w[7] + w[8])) / (8.0 * res);
    return true;
}

}  // namespace

RasterSpec raster_spec_for_cloud(const PointCloud& cloud, double resolution) {
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("idw: resolution must be positive");
    }
    if (cloud.empty()) {
        throw std::invalid_argument("idw: cannot derive a raster spec from an empty cloud");
    }
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = x_max;
    for (const Vec3& p : cloud.points) {
        x_min = std::min(x_min, p.x());
        x_max = std::max(x_max, p.x());
        y_min = std::min(y_min, p.y());
        y_max = std::max(y_max, p.y());
    }
    RasterSpec spec;
    spec.res_x = spec.res_y = resolution;
    spec.origin_x = std::floor(x_min / resolution) * resolution;
    spec.origin_y = std::ceil(y_max / resolution) * resolution;
    spec.width = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil((x_max - spec.origin_x) / resolution)));
    spec.height = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil((spec.origin_y - y_min) / resolution)));
    return spec;
}

GridRaster idw_interpolate(const PointCloud& cloud, const RasterSpec& target,
                           const IdwParams& params) {
    if (!(params.radius > 0.0)) {
        throw std::invalid_argument("idw: radius must be positive");
    }
    if (params.max_points < 1) {
        throw std::invalid_argument("idw: max_points must be at least 1");
    }
    GridRaster out(target, params.nodata);
    for (const Vec3& p : cloud.points) {
        if (!p.allFinite()) {
            throw std::invalid_argument("idw: non-finite point in cloud");
        }
    }
    if (cloud.empty()) {
        return out;
    }

    const BucketIndex index(cloud, params.radius);
    const double radius2 = params.radius * params.radius;
    std::vector<Candidate> candidates;

    for (Eigen::Index r = 0; r < out.height(); ++r) {
        for (Eigen::Index c = 0; c < out.width(); ++c) {
            const Vec2 center = out.cell_center(r, c);
            candidates.clear();
            index.for_each_near(center.x(), center.y(), [&](std::size_t i) {
                const Vec3& p = cloud.points[i];
                const double dx = p.x() - center.x();
                const double dy = p.y() - center.y();
                const double d2 = dx * dx + dy * dy;
                if (d2 <= radius2) {
                    candidates.push_back({d2, i});
                }
            });
            if (candidates.empty()) {
                continue;
            }
            std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
                return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
            });
            if (candidates.size() > static_cast<std::size_t>(params.max_points)) {
                candidates.resize(static_cast<std::size_t>(params.max_points));
            }
            if (candidates.front().dist2 < kExactHitDistance * kExactHitDistance) {
                out.set(r, c, cloud.points[candidates.front().index].z());
                continue;
            }
            double weight_sum = 0.0;
            double value_sum = 0.0;
            for (const Candidate& cand : candidates) {
                const double w = std::pow(std::sqrt(cand.dist2), -params.power);
                weight_sum += w;
                value_sum += w * cloud.points[cand.index].z();
            }
            out.set(r, c, value_sum / weight_sum);
        }
    }
    return out;
}

double bilinear_sample(const GridRaster& src, double x, double y) {
    double gx = (x - src.origin_x()) / src.res_x() - 0.5;
    double gy = (src.origin_y() - y) / src.res_y() - 0.5;
    gx = std::clamp(gx, 0.0, static_cast<double>(src.width() - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(src.height() - 1));
    const Eigen::Index c0 = static_cast<Eigen::Index>(std::floor(gx));
    const Eigen::Index r0 = static_cast<Eigen::Index>(std::floor(gy));
    const Eigen::Index c1 = std::min<Eigen::Index>(c0 + 1, src.width() - 1);
    const Eigen::Index r1 = std::min<Eigen::Index>(r0 + 1, src.height() - 1);
    const double fx = gx - static_cast<double>(c0);
    const double fy = gy - static_cast<double>(r0);
    const double v00 = src.at(r0, c0);
    const double v01 = src.at(r0, c1);
    const double v10 = src.at(r1, c0);
    const double v11 = src.at(r1, c1);
    if (src.is_nodata(v00) || src.is_nodata(v01) || src.is_nodata(v10) || src.is_nodata(v11)) {
        return src.nodata();
    }
    const double top = (1.0 - fx) * v00 + fx * v01;
    const double bottom = (1.0 - fx) * v10 + fx * v11;
    return (1.0 - fy) * top + fy * bottom;
}

GridRaster bilinear_resample(const GridRaster& src, double target_resolution) {
    if (!(target_resolution > 0.0)) {
        throw std::invalid_argument("resample: target resolution must be positive");
    }
    RasterSpec spec;
    spec.origin_x = src.origin_x();
    spec.origin_y = src.origin_y();
    spec.res_x = spec.res_y = target_resolution;
    spec.width = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(static_cast<double>(src.width()) * src.res_x() / target_resolution)));
    spec.height = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(static_cast<double>(src.height()) * src.res_y() / target_resolution)));
    GridRaster out(spec, src.nodata());
    for (Eigen::Index r = 0; r < out.height(); ++r) {
        for (Eigen::Index c = 0; c < out.width(); ++c) {
            const Vec2 p = out.cell_center(r, c);
            out.set(r, c, bilinear_sample(src, p.x(), p.y()));
        }
    }
    return out;
}

GridRaster slope(const GridRaster& dsm, SlopeUnits units) {
    require_square_pixels(dsm, "slope");
    GridRaster out(dsm.spec(), dsm.nodata());
    for (Eigen::Index r = 0; r < dsm.height(); ++r) {
        for (Eigen::Index c = 0; c < dsm.width(); ++c) {
            double dzdx = 0.0;
            double dzdy = 0.0;
            if (!horn_gradient(dsm, r, c, &dzdx, &dzdy)) {
                continue;
            }
            const double rise = std::sqrt(dzdx * dzdx + dzdy * dzdy);
            out.set(r, c, units == SlopeUnits::Degrees ? std::atan(rise) * 180.0 / kPi
                                                       : 100.0 * rise);
        }
    }
    return out;
}

GridRaster roughness(const GridRaster& dsm) {
    require_square_pixels(dsm, "roughness");
    GridRaster out(dsm.spec(), dsm.nodata());
    for (Eigen::Index r = 1; r + 1 < dsm.height(); ++r) {
        for (Eigen::Index c = 1; c + 1 < dsm.width(); ++c) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            bool ok = true;
            for (Eigen::Index dr = -1; dr <= 1 && ok; ++dr) {
                for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                    const double v = dsm.at(r + dr, c + dc);
                    if (dsm.is_nodata(v)) {
                        ok = false;
                        break;
                    }
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (ok) {
                out.set(r, c, hi - lo);
            }
        }
    }
    return out;
}

GridRaster ndvi(const GridRaster& nir, const GridRaster& red) {
    if (!nir.same_grid(red)) {
        throw std::invalid_argument("ndvi: nir and red rasters are not aligned");
    }
    GridRaster out(nir.spec(), nir.nodata());
    for (Eigen::Index r = 0; r < nir.height(); ++r) {
        for (Eigen::Index c = 0; c < nir.width(); ++c) {
            const double n = nir.at(r, c);
            const double d = red.at(r, c);
            if (nir.is_nodata(n) || red.is_nodata(d)) {
                continue;
            }
            const double denom = n + d;
            if (denom == 0.0) {
                continue;
            }
            out.set(r, c, std::clamp((n - d) / denom, -1.0, 1.0));
        }
    }
    return out;
}

GridRaster hillshade(const GridRaster& dsm, double azimuth_deg, double altitude_deg) {
    require_square_pixels(dsm, "hillshade");
    const double azimuth = azimuth_deg * kPi / 180.0;
    const double zenith = (90.0 - altitude_deg) * kPi / 180.0;
    GridRaster out(dsm.spec(), dsm.nodata());
    for (Eigen::Index r = 0; r < dsm.height(); ++r) {
        for (Eigen::Index c = 0; c < dsm.width(); ++c) {
            double dzdx = 0.0;
            double dzdy = 0.0;
            if (!horn_gradient(dsm, r, c, &dzdx, &dzdy)) {
                continue;
            }
            const double slope_rad = std::atan(std::sqrt(dzdx * dzdx + dzdy * dzdy));
            // Azimuth of the downslope direction, clockwise from north.
            const double aspect = std::atan2(-dzdx, -dzdy);
            const double cosi = std::cos(zenith) * std::cos(slope_rad) +
                                std::sin(zenith) * std::sin(slope_rad) * std::cos(azimuth - aspect);
            out.set(r, c, std::round(255.0 * std::clamp(cosi, 0.0, 1.0)));
        }
    }
    return out;
}

}  // namespace elfkit
