#pragma once

#include <string>

#include "elfkit/raster.hpp"

namespace elfkit::io {

/// Binary grid format: a 72-byte header -- magic "ELFR1" (8 bytes,
/// NUL-padded), width and height (uint64), origin_x, origin_y, res_x,
/// res_y, nodata (float64), 8 reserved zero bytes -- followed by the
/// row-major float64 values. Everything little-endian.
void write_grid_binary(const std::string& path, const GridRaster& raster);
GridRaster read_grid_binary(const std::string& path);

/// Esri ASCII grid for interop. Requires square pixels.
void write_grid_ascii(const std::string& path, const GridRaster& raster);
GridRaster read_grid_ascii(const std::string& path);

/// Dispatches on the file extension: ".asc" is ASCII, everything else the
/// binary format.
void write_grid(const std::string& path, const GridRaster& raster);
GridRaster read_grid(const std::string& path);

/// Point cloud as "x y z" text lines, one sample per line; '#' comments.
void write_xyz(const std::string& path, const PointCloud& cloud);
PointCloud read_xyz(const std::string& path);

}  // namespace elfkit::io
