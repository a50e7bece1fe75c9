#include "elfkit/elf_search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "elfkit/raster_ops.hpp"

namespace elfkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kShiftStep = 1.0;  // m, Alg. 1 granularity

}  // namespace

std::vector<OrientedRect> find_elfs(const GeoPolygon& polygon, double elf_length,
                                    double elf_width) {
    if (!(elf_length > 0.0) || !(elf_width > 0.0)) {
        throw std::invalid_argument("find_elfs: rectangle dimensions must be positive");
    }
    const Vec2 pivot = centroid(polygon);
    const double stride = elf_width / 2.0;
    std::vector<OrientedRect> out;

    for (int deg = 0; deg < 180; deg += 4) {
        const double angle = static_cast<double>(deg) * kPi / 180.0;
        const GeoPolygon poi = deg == 0 ? polygon : rotate(polygon, angle, pivot);
        const Bounds b = polygon_limits(poi);
        const double dx = b.width();
        const double dy = b.height();
        if (dx < elf_length || dy < elf_width) {
            continue;  // check_dimensions
        }

        const auto n_y = static_cast<long long>(std::floor(dy / stride)) + 1;
        for (long long iy = 0; iy <= n_y; ++iy) {
            const double y0 = b.y_min + static_cast<double>(iy) * stride;
            double x_shift = 0.0;
            while (dx - x_shift >= elf_length) {
                OrientedRect rect;
                rect.anchor = Vec2(b.x_min + x_shift, y0);
                rect.length = elf_length;
                rect.width = elf_width;
                rect.rotation = 0.0;

                if (!contains(poi, rect)) {
                    x_shift += kShiftStep;
                    continue;
                }

                // Grow lengthwise in 1 m steps until containment fails and
                // emit the last contained size.
                OrientedRect last = rect;
                OrientedRect grown = rect;
                int resize = 1;
                for (;;) {
                    grown.length = elf_length + static_cast<double>(resize);
                    ++resize;
                    if (!contains(poi, grown)) {
                        break;
                    }
                    last = grown;
                }
                out.push_back(rotate(last, -angle, pivot));
                x_shift += static_cast<double>(resize) + 1.0;
            }
        }
    }
    return out;
}

std::vector<ProfilePoint> center_line_profile(const GridRaster& dsm, const OrientedRect& rect,
                                              double sample_step) {
    if (!(sample_step > 0.0)) {
        throw std::invalid_argument("profile: sample step must be positive");
    }
    for (const Vec2& corner : rect.corners()) {
        if (!dsm.covers(corner.x(), corner.y())) {
            throw std::invalid_argument("profile: rectangle leaves the DSM extent");
        }
    }
    const Eigen::Rotation2Dd rot(rect.rotation);
    const Vec2 start = rect.anchor + rot * Vec2(0.0, rect.width / 2.0);
    const Vec2 dir = rot * Vec2(1.0, 0.0);

    std::vector<double> stations;
    for (double t = 0.0; t < rect.length; t += sample_step) {
        stations.push_back(t);
    }
    stations.push_back(rect.length);

    std::vector<ProfilePoint> profile;
    profile.reserve(stations.size());
    std::string bad;
    for (double t : stations) {
        const Vec2 p = start + t * dir;
        const double z = bilinear_sample(dsm, p.x(), p.y());
        if (dsm.is_nodata(z)) {
            if (!bad.empty()) {
                bad += ", ";
            }
            bad += std::to_string(t);
            continue;
        }
        profile.push_back({t, z});
    }
    if (!bad.empty()) {
        throw std::runtime_error("profile: nodata at stations " + bad);
    }
    return profile;
}

ProfileSlopes profile_slope(const std::vector<ProfilePoint>& profile) {
    if (profile.size() < 2) {
        throw std::invalid_argument("profile slope: need at least 2 samples");
    }
    const double total = profile.back().distance - profile.front().distance;
    if (!(total > 0.0)) {
        throw std::invalid_argument("profile slope: zero-length profile");
    }
    double mean_t = 0.0;
    double mean_z = 0.0;
    for (const ProfilePoint& p : profile) {
        mean_t += p.distance;
        mean_z += p.z;
    }
    mean_t /= static_cast<double>(profile.size());
    mean_z /= static_cast<double>(profile.size());
    double num = 0.0;
    double den = 0.0;
    for (const ProfilePoint& p : profile) {
        num += (p.distance - mean_t) * (p.z - mean_z);
        den += (p.distance - mean_t) * (p.distance - mean_t);
    }
    ProfileSlopes slopes;
    slopes.regression_pct = 100.0 * num / den;
    slopes.endpoint_pct = 100.0 * (profile.back().z - profile.front().z) / total;
    return slopes;
}

namespace {

// The direction-signed slope measure with the larger magnitude; the
// regression estimate wins exact ties.
double dominant_slope(const ProfileSlopes& slopes) {
    return std::abs(slopes.regression_pct) >= std::abs(slopes.endpoint_pct)
               ? slopes.regression_pct
               : slopes.endpoint_pct;
}

double direction_required_length(const AircraftConfig& config, const Atmosphere& atm,
                                 double slope_pct, double surface_factor) {
    const double alpha = std::atan(slope_pct / 100.0);
    try {
        const double roll = ground_roll_distance(config, atm, alpha);
        return required_length(roll, surface_factor, slope_pct);
    } catch (const std::domain_error&) {
        // Non-stopping configuration: this landing direction is unusable.
        return std::numeric_limits<double>::infinity();
    }
}

bool direction_ok(double rect_length, double required, double slope_pct) {
    return rect_length >= required && slope_pct > -10.0;
}

}  // namespace

ElfRecord evaluate_elf(const OrientedRect& rect, const GridRaster& dsm,
                       const AircraftConfig& config, const Atmosphere& atm,
                       double surface_factor) {
    const std::vector<ProfilePoint> profile = center_line_profile(dsm, rect);
    const ProfileSlopes slopes = profile_slope(profile);

    ElfRecord rec;
    rec.rect = rect;
    rec.length = rect.length;
    rec.width = rect.width;
    rec.slope_fwd_pct = dominant_slope(slopes);
    rec.slope_rev_pct = -rec.slope_fwd_pct;
    rec.required_length_fwd =
        direction_required_length(config, atm, rec.slope_fwd_pct, surface_factor);
    rec.required_length_rev =
        direction_required_length(config, atm, rec.slope_rev_pct, surface_factor);
    rec.accepted = direction_ok(rect.length, rec.required_length_fwd, rec.slope_fwd_pct) ||
                   direction_ok(rect.length, rec.required_length_rev, rec.slope_rev_pct);

    auto accepted_at = [&](double factor) {
        const double fwd = direction_required_length(config, atm, rec.slope_fwd_pct, factor);
        const double rev = direction_required_length(config, atm, rec.slope_rev_pct, factor);
        return direction_ok(rect.length, fwd, rec.slope_fwd_pct) ||
               direction_ok(rect.length, rev, rec.slope_rev_pct);
    };
    rec.wet115 = accepted_at(kGrassFirmFactor);
    rec.wet160 = accepted_at(kWetShortGrassFactor);
    return rec;
}

}  // namespace elfkit
