#include "elfkit/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace elfkit {

namespace {

void check_spec(const RasterSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) {
        throw std::invalid_argument("raster: width and height must be positive");
    }
    if (!(spec.res_x > 0.0) || !(spec.res_y > 0.0)) {
        throw std::invalid_argument("raster: resolution must be positive");
    }
    if (!std::isfinite(spec.origin_x) || !std::isfinite(spec.origin_y)) {
        throw std::invalid_argument("raster: non-finite origin");
    }
}

}  // namespace

GridRaster::GridRaster(const RasterSpec& spec, double nodata) : spec_(spec), nodata_(nodata) {
    check_spec(spec_);
    values_ = RasterArray::Constant(spec_.height, spec_.width, nodata_);
}

GridRaster::GridRaster(const RasterSpec& spec, RasterArray values, double nodata)
    : spec_(spec), values_(std::move(values)), nodata_(nodata) {
    check_spec(spec_);
    if (values_.rows() != spec_.height || values_.cols() != spec_.width) {
        throw std::invalid_argument("raster: value array shape does not match spec");
    }
}

Vec2 GridRaster::cell_center(Eigen::Index row, Eigen::Index col) const {
    return Vec2(spec_.origin_x + (static_cast<double>(col) + 0.5) * spec_.res_x,
                spec_.origin_y - (static_cast<double>(row) + 0.5) * spec_.res_y);
}

bool GridRaster::covers(double x, double y) const {
    return x >= spec_.origin_x && x <= spec_.origin_x + static_cast<double>(spec_.width) * spec_.res_x &&
           y <= spec_.origin_y && y >= spec_.origin_y - static_cast<double>(spec_.height) * spec_.res_y;
}

bool GridRaster::same_grid(const GridRaster& other, double tol) const {
    return width() == other.width() && height() == other.height() &&
           std::abs(origin_x() - other.origin_x()) <= tol &&
           std::abs(origin_y() - other.origin_y()) <= tol &&
           std::abs(res_x() - other.res_x()) <= tol && std::abs(res_y() - other.res_y()) <= tol;
}

void GridRaster::validate_values() const {
    for (Eigen::Index r = 0; r < height(); ++r) {
        for (Eigen::Index c = 0; c < width(); ++c) {
            const double v = values_(r, c);
            if (!std::isfinite(v) && v != nodata_) {
                throw std::invalid_argument("raster: value neither finite nor nodata");
            }
        }
    }
}

}  // namespace elfkit
