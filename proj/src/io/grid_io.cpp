#include "elfkit/io/grid_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace elfkit::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid I/O assumes a little-endian host");

constexpr char kMagic[8] = {'E', 'L', 'F', 'R', '1', '\0', '\0', '\0'};
constexpr std::size_t kHeaderSize = 72;

void put_u64(char* dst, std::uint64_t v) { std::memcpy(dst, &v, 8); }
void put_f64(char* dst, double v) { std::memcpy(dst, &v, 8); }
std::uint64_t get_u64(const char* src) {
    std::uint64_t v;
    std::memcpy(&v, src, 8);
    return v;
}
double get_f64(const char* src) {
    double v;
    std::memcpy(&v, src, 8);
    return v;
}

}  // namespace

void write_grid_binary(const std::string& path, const GridRaster& raster) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write grid file " + path);
    }
    char header[kHeaderSize] = {};
    std::memcpy(header, kMagic, 8);
    put_u64(header + 8, static_cast<std::uint64_t>(raster.width()));
    put_u64(header + 16, static_cast<std::uint64_t>(raster.height()));
    put_f64(header + 24, raster.origin_x());
    put_f64(header + 32, raster.origin_y());
    put_f64(header + 40, raster.res_x());
    put_f64(header + 48, raster.res_y());
    put_f64(header + 56, raster.nodata());
    out.write(header, kHeaderSize);
    out.write(reinterpret_cast<const char*>(raster.values().data()),
              static_cast<std::streamsize>(sizeof(double)) * raster.width() * raster.height());
    if (!out) {
        throw std::runtime_error("short write on grid file " + path);
    }
}

GridRaster read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open grid file " + path);
    }
    char header[kHeaderSize];
    in.read(header, kHeaderSize);
    if (!in || std::memcmp(header, kMagic, 8) != 0) {
        throw std::runtime_error("grid file " + path + ": bad magic");
    }
    RasterSpec spec;
    spec.width = static_cast<Eigen::Index>(get_u64(header + 8));
    spec.height = static_cast<Eigen::Index>(get_u64(header + 16));
    spec.origin_x = get_f64(header + 24);
    spec.origin_y = get_f64(header + 32);
    spec.res_x = get_f64(header + 40);
    spec.res_y = get_f64(header + 48);
    const double nodata = get_f64(header + 56);
    if (spec.width <= 0 || spec.height <= 0 || spec.width * spec.height > (1LL << 34)) {
        throw std::runtime_error("grid file " + path + ": implausible dimensions");
    }
    RasterArray values(spec.height, spec.width);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(sizeof(double)) * spec.width * spec.height);
    if (!in) {
        throw std::runtime_error("grid file " + path + ": truncated values");
    }
    GridRaster raster(spec, std::move(values), nodata);
    raster.validate_values();
    return raster;
}

void write_grid_ascii(const std::string& path, const GridRaster& raster) {
    if (std::abs(raster.res_x() - raster.res_y()) > 1e-12) {
        throw std::invalid_argument("ascii grid: requires square pixels");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write grid file " + path);
    }
    char buf[64];
    out << "ncols " << raster.width() << '\n';
    out << "nrows " << raster.height() << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", raster.origin_x());
    out << "xllcorner " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g",
                  raster.origin_y() - static_cast<double>(raster.height()) * raster.res_y());
    out << "yllcorner " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", raster.res_x());
    out << "cellsize " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", raster.nodata());
    out << "NODATA_value " << buf << '\n';
    for (Eigen::Index r = 0; r < raster.height(); ++r) {
        for (Eigen::Index c = 0; c < raster.width(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", raster.at(r, c));
            out << buf << (c + 1 == raster.width() ? '\n' : ' ');
        }
    }
    if (!out) {
        throw std::runtime_error("short write on grid file " + path);
    }
}

GridRaster read_grid_ascii(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open grid file " + path);
    }
    RasterSpec spec;
    double yllcorner = 0.0;
    double nodata = GridRaster::kDefaultNodata;
    long long ncols = 0;
    long long nrows = 0;
    for (int i = 0; i < 6; ++i) {
        std::string key;
        in >> key;
        if (key == "ncols") {
            in >> ncols;
        } else if (key == "nrows") {
            in >> nrows;
        } else if (key == "xllcorner") {
            in >> spec.origin_x;
        } else if (key == "yllcorner") {
            in >> yllcorner;
        } else if (key == "cellsize") {
            in >> spec.res_x;
        } else if (key == "NODATA_value") {
            in >> nodata;
        } else {
            throw std::runtime_error("ascii grid " + path + ": unexpected key '" + key + "'");
        }
        if (!in) {
            throw std::runtime_error("ascii grid " + path + ": bad header");
        }
    }
    spec.res_y = spec.res_x;
    spec.width = static_cast<Eigen::Index>(ncols);
    spec.height = static_cast<Eigen::Index>(nrows);
    spec.origin_y = yllcorner + static_cast<double>(nrows) * spec.res_y;
    if (spec.width <= 0 || spec.height <= 0) {
        throw std::runtime_error("ascii grid " + path + ": bad dimensions");
    }
    RasterArray values(spec.height, spec.width);
    for (Eigen::Index r = 0; r < spec.height; ++r) {
        for (Eigen::Index c = 0; c < spec.width; ++c) {
            if (!(in >> values(r, c))) {
                throw std::runtime_error("ascii grid " + path + ": truncated values");
            }
        }
    }
    GridRaster raster(spec, std::move(values), nodata);
    raster.validate_values();
    return raster;
}

void write_grid(const std::string& path, const GridRaster& raster) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".asc") == 0) {
        write_grid_ascii(path, raster);
    } else {
        write_grid_binary(path, raster);
    }
}

GridRaster read_grid(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".asc") == 0) {
        return read_grid_ascii(path);
    }
    return read_grid_binary(path);
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write point cloud " + path);
    }
    char buf[96];
    for (const Vec3& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out << buf;
    }
    if (!out) {
        throw std::runtime_error("short write on point cloud " + path);
    }
}

PointCloud read_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open point cloud " + path);
    }
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream row(line);
        double x, y, z;
        if (!(row >> x >> y >> z)) {
            throw std::runtime_error("point cloud " + path + ": bad line " +
                                     std::to_string(line_no));
        }
        cloud.points.emplace_back(x, y, z);
    }
    return cloud;
}

}  // namespace elfkit::io
