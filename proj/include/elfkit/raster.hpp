#pragma once

#include <Eigen/Dense>

#include "elfkit/geo.hpp"

namespace elfkit {

using RasterArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Geometry of a raster without its values: top-left corner, cell size and
/// pixel counts. res_y is positive; rows advance southward.
struct RasterSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double res_x = 1.0;
    double res_y = 1.0;
    Eigen::Index width = 0;
    Eigen::Index height = 0;
};

/// Single-band 2-D raster with a geotransform and a nodata sentinel.
/// Carrier for DSM, slope, roughness, NDVI and orthophoto bands. Values
/// are stored row-major, row 0 at the northern edge.
class GridRaster {
  public:
    static constexpr double kDefaultNodata = -2147483648.0;

    GridRaster() = default;
    GridRaster(const RasterSpec& spec, double nodata = kDefaultNodata);
    GridRaster(const RasterSpec& spec, RasterArray values, double nodata = kDefaultNodata);

    const RasterSpec& spec() const { return spec_; }
    double origin_x() const { return spec_.origin_x; }
    double origin_y() const { return spec_.origin_y; }
    double res_x() const { return spec_.res_x; }
    double res_y() const { return spec_.res_y; }
    Eigen::Index width() const { return spec_.width; }
    Eigen::Index height() const { return spec_.height; }
    double nodata() const { return nodata_; }

    const RasterArray& values() const { return values_; }
    RasterArray& values() { return values_; }

    double at(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }
    void set(Eigen::Index row, Eigen::Index col, double v) { values_(row, col) = v; }

    bool is_nodata(double v) const { return v == nodata_; }

    /// Map-space center of cell (row, col).
    Vec2 cell_center(Eigen::Index row, Eigen::Index col) const;

    /// True iff (x, y) falls within the raster's outer pixel edges.
    bool covers(double x, double y) const;

    bool same_grid(const GridRaster& other, double tol = 1e-9) const;

    /// Checks the value invariant: every cell finite or exactly nodata.
    void validate_values() const;

  private:
    RasterSpec spec_;
    RasterArray values_;
    double nodata_ = kDefaultNodata;
};

}  // namespace elfkit
