#pragma once

#include "elfkit/geo.hpp"
#include "elfkit/raster.hpp"

namespace elfkit {

/// Inverse-distance-weighting parameters. Defaults follow the original
/// gridding configuration: power 2, radius 1.415 m, 16 nearest points,
/// nodata -2147483648, 1 m output pixels.
struct IdwParams {
    double power = 2.0;
    double radius = 1.415;
    int max_points = 16;
    double nodata = GridRaster::kDefaultNodata;
};

/// Grids a point cloud by inverse distance weighting: each cell gets
/// sum(w_i * z_i) / sum(w_i) with w_i = d_i^-power over the nearest
/// max_points samples within radius of the cell center. A sample closer
/// than 1e-12 m to the center wins outright; cells with no sample in
/// radius become nodata. An empty cloud yields an all-nodata raster.
GridRaster idw_interpolate(const PointCloud& cloud, const RasterSpec& target,
                           const IdwParams& params = {});

/// Convenience: derive a target spec from the cloud's bounding box.
RasterSpec raster_spec_for_cloud(const PointCloud& cloud, double resolution);

/// Bilinear interpolation of the four cell centers around (x, y). Queries
/// outside the cell-center hull clamp to the edge; any nodata corner
/// yields nodata.
double bilinear_sample(const GridRaster& src, double x, double y);

/// Resamples to a new cell size over the same extent.
GridRaster bilinear_resample(const GridRaster& src, double target_resolution);

enum class SlopeUnits { Degrees, Percent };

/// Slope from Horn's 3x3 finite differences. Border cells and cells with
/// nodata anywhere in the window become nodata. Requires square pixels.
GridRaster slope(const GridRaster& dsm, SlopeUnits units);

/// Max minus min over the 3x3 window, center included. Border and nodata
/// handling as for slope.
GridRaster roughness(const GridRaster& dsm);

/// (nir - red) / (nir + red), clamped to [-1, 1]. A zero denominator or a
/// nodata input cell yields nodata. Rasters must share the same grid.
GridRaster ndvi(const GridRaster& nir, const GridRaster& red);

/// Lambertian shaded relief from Horn gradients, scaled to [0, 255].
GridRaster hillshade(const GridRaster& dsm, double azimuth_deg = 315.0,
                     double altitude_deg = 45.0);

}  // namespace elfkit
