#include <doctest.h>

#include <cmath>
#include <random>

#include "elfkit/raster_ops.hpp"
#include "support/oracles.hpp"

using namespace elfkit;

namespace {

GridRaster make_raster(Eigen::Index width, Eigen::Index height, double res = 1.0) {
    RasterSpec spec;
    spec.width = width;
    spec.height = height;
    spec.res_x = spec.res_y = res;
    spec.origin_y = static_cast<double>(height) * res;
    return GridRaster(spec);
}

GridRaster random_raster(std::mt19937_64& rng, Eigen::Index width, Eigen::Index height,
                         double res = 1.0, double amplitude = 10.0) {
    GridRaster raster = make_raster(width, height, res);
    std::uniform_real_distribution<double> v(-amplitude, amplitude);
    for (Eigen::Index r = 0; r < height; ++r) {
        for (Eigen::Index c = 0; c < width; ++c) {
            raster.set(r, c, v(rng));
        }
    }
    return raster;
}

}  // namespace

TEST_CASE("idw: a sample at the cell center dominates") {
    PointCloud cloud;
    RasterSpec spec;
    spec.width = spec.height = 4;
    spec.origin_y = 4.0;
    cloud.points.emplace_back(1.5, 2.5, 42.0);  // center of cell (1, 1)
    cloud.points.emplace_back(1.6, 2.5, -3.0);
    const GridRaster out = idw_interpolate(cloud, spec);
    CHECK(out.at(1, 1) == 42.0);
}

TEST_CASE("idw: equidistant samples average") {
    PointCloud cloud;
    RasterSpec spec;
    spec.width = spec.height = 2;
    spec.origin_y = 2.0;
    // Cell (0, 0) center is (0.5, 1.5); both samples 0.3 m away.
    cloud.points.emplace_back(0.2, 1.5, 2.0);
    cloud.points.emplace_back(0.8, 1.5, 4.0);
    const GridRaster out = idw_interpolate(cloud, spec);
    CHECK(out.at(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("idw: empty cloud gives all nodata") {
    RasterSpec spec;
    spec.width = spec.height = 3;
    spec.origin_y = 3.0;
    const GridRaster out = idw_interpolate(PointCloud{}, spec);
    for (Eigen::Index r = 0; r < 3; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            CHECK(out.is_nodata(out.at(r, c)));
        }
    }
}

TEST_CASE("idw: interpolated values stay inside the sample range") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.0, 10.0);
    std::uniform_real_distribution<double> z(-5.0, 5.0);
    PointCloud cloud;
    for (int i = 0; i < 30; ++i) {
        cloud.points.emplace_back(pos(rng), pos(rng), z(rng));
    }
    RasterSpec spec;
    spec.width = spec.height = 10;
    spec.origin_y = 10.0;
    const GridRaster out = idw_interpolate(cloud, spec);
    for (Eigen::Index r = 0; r < 10; ++r) {
        for (Eigen::Index c = 0; c < 10; ++c) {
            const double v = out.at(r, c);
            if (!out.is_nodata(v)) {
                CHECK(v >= -5.0);
                CHECK(v <= 5.0);
            }
        }
    }
}

TEST_CASE("idw matches the all-pairs oracle on random clouds") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(0.0, 10.0);
    std::uniform_real_distribution<double> z(0.0, 100.0);
    IdwParams params;
    for (int it = 0; it < 20; ++it) {
        PointCloud cloud;
        for (int i = 0; i < 50; ++i) {
            cloud.points.emplace_back(pos(rng), pos(rng), z(rng));
        }
        RasterSpec spec;
        spec.width = spec.height = 10;
        spec.origin_y = 10.0;
        const GridRaster out = idw_interpolate(cloud, spec, params);
        for (Eigen::Index r = 0; r < 10; ++r) {
            for (Eigen::Index c = 0; c < 10; ++c) {
                const Vec2 center = out.cell_center(r, c);
                const double expect =
                    oracles::idw_value(cloud, center.x(), center.y(), params.power, params.radius,
                                       params.max_points, params.nodata);
                const double got = out.at(r, c);
                if (out.is_nodata(expect)) {
                    CHECK(out.is_nodata(got));
                } else {
                    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("bilinear: constant field stays constant") {
    GridRaster src = make_raster(2, 2);
    src.values().setConstant(7.25);
    const GridRaster out = bilinear_resample(src, 0.25);
    for (Eigen::Index r = 0; r < out.height(); ++r) {
        for (Eigen::Index c = 0; c < out.width(); ++c) {
            CHECK(out.at(r, c) == doctest::Approx(7.25));
        }
    }
}

TEST_CASE("bilinear: linear midpoint") {
    GridRaster src = make_raster(2, 2);
    src.set(0, 0, 0.0);
    src.set(0, 1, 1.0);
    src.set(1, 0, 0.0);
    src.set(1, 1, 1.0);
    // Midpoint between the column centers.
    CHECK(bilinear_sample(src, 1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("bilinear: nodata corner poisons the query") {
    GridRaster src = make_raster(2, 2);
    src.values().setConstant(1.0);
    src.set(0, 1, src.nodata());
    CHECK(src.is_nodata(bilinear_sample(src, 1.0, 1.0)));
}

TEST_CASE("bilinear resample matches the closed-form oracle and src centers") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 20; ++it) {
        const GridRaster src = random_raster(rng, 5, 5);
        const GridRaster out = bilinear_resample(src, 0.2);
        REQUIRE(out.width() == 25);
        REQUIRE(out.height() == 25);
        for (Eigen::Index r = 0; r < out.height(); ++r) {
            for (Eigen::Index c = 0; c < out.width(); ++c) {
                const Vec2 p = out.cell_center(r, c);
                CHECK(out.at(r, c) ==
                      doctest::Approx(oracles::bilinear_value(src, p.x(), p.y())).epsilon(1e-9));
            }
        }
        // Exact reproduction at source cell centers.
        for (Eigen::Index r = 0; r < src.height(); ++r) {
            for (Eigen::Index c = 0; c < src.width(); ++c) {
                const Vec2 p = src.cell_center(r, c);
                CHECK(bilinear_sample(src, p.x(), p.y()) ==
                      doctest::Approx(src.at(r, c)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("slope: constant raster is flat") {
    GridRaster dsm = make_raster(5, 5);
    dsm.values().setConstant(123.0);
    const GridRaster out = slope(dsm, SlopeUnits::Degrees);
    for (Eigen::Index r = 1; r < 4; ++r) {
        for (Eigen::Index c = 1; c < 4; ++c) {
            CHECK(out.at(r, c) == doctest::Approx(0.0));
        }
    }
    CHECK(out.is_nodata(out.at(0, 0)));  // border
}

TEST_CASE("slope: plane z = x gives 45 degrees / 100 percent") {
    GridRaster dsm = make_raster(8, 6);
    for (Eigen::Index r = 0; r < 6; ++r) {
        for (Eigen::Index c = 0; c < 8; ++c) {
            dsm.set(r, c, dsm.cell_center(r, c).x());
        }
    }
    const GridRaster deg = slope(dsm, SlopeUnits::Degrees);
    const GridRaster pct = slope(dsm, SlopeUnits::Percent);
    for (Eigen::Index r = 1; r < 5; ++r) {
        for (Eigen::Index c = 1; c < 7; ++c) {
            CHECK(deg.at(r, c) == doctest::Approx(45.0).epsilon(1e-12));
            CHECK(pct.at(r, c) == doctest::Approx(100.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("slope requires square pixels") {
    RasterSpec spec;
    spec.width = spec.height = 4;
    spec.res_x = 1.0;
    spec.res_y = 2.0;
    spec.origin_y = 8.0;
    const GridRaster dsm(spec);
    CHECK_THROWS_AS(slope(dsm, SlopeUnits::Percent), std::invalid_argument);
}

TEST_CASE("slope and roughness match the hand-rolled kernels on random rasters") {
    std::mt19937_64 rng(47);
    for (int it = 0; it < 25; ++it) {
        const GridRaster dsm = random_raster(rng, 5, 5);
        const GridRaster deg = slope(dsm, SlopeUnits::Degrees);
        const GridRaster pct = slope(dsm, SlopeUnits::Percent);
        const GridRaster rough = roughness(dsm);
        for (Eigen::Index r = 0; r < 5; ++r) {
            for (Eigen::Index c = 0; c < 5; ++c) {
                const double expect_deg = oracles::slope_degrees_at(dsm, r, c, dsm.nodata());
                const double expect_rough = oracles::roughness_at(dsm, r, c, dsm.nodata());
                if (dsm.is_nodata(expect_deg)) {
                    CHECK(deg.is_nodata(deg.at(r, c)));
                    CHECK(rough.is_nodata(rough.at(r, c)));
                } else {
                    CHECK(deg.at(r, c) == doctest::Approx(expect_deg).epsilon(1e-9));
                    CHECK(rough.at(r, c) == doctest::Approx(expect_rough).epsilon(1e-9));
                    // percent == 100 * tan(degrees)
                    CHECK(pct.at(r, c) ==
                          doctest::Approx(100.0 * std::tan(deg.at(r, c) * M_PI / 180.0))
                              .epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("slope and roughness ignore a constant offset") {
    std::mt19937_64 rng(53);
    const GridRaster dsm = random_raster(rng, 6, 6);
    GridRaster lifted = dsm;
    lifted.values() += 500.0;
    const GridRaster s1 = slope(dsm, SlopeUnits::Percent);
    const GridRaster s2 = slope(lifted, SlopeUnits::Percent);
    const GridRaster r1 = roughness(dsm);
    const GridRaster r2 = roughness(lifted);
    for (Eigen::Index r = 1; r < 5; ++r) {
        for (Eigen::Index c = 1; c < 5; ++c) {
            CHECK(s1.at(r, c) == doctest::Approx(s2.at(r, c)).epsilon(1e-9));
            CHECK(r1.at(r, c) == doctest::Approx(r2.at(r, c)).epsilon(1e-9));
        }
    }
}

TEST_CASE("roughness: forced window values") {
    GridRaster dsm = make_raster(3, 3);
    double v = 1.0;
    for (Eigen::Index r = 0; r < 3; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            dsm.set(r, c, v++);
        }
    }
    CHECK(roughness(dsm).at(1, 1) == doctest::Approx(8.0));

    GridRaster flat = make_raster(3, 3);
    flat.values().setConstant(2.0);
    CHECK(roughness(flat).at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("ndvi basics") {
    GridRaster nir = make_raster(2, 2);
    GridRaster red = make_raster(2, 2);
    nir.values().setConstant(60.0);
    red.values().setConstant(20.0);
    CHECK(ndvi(nir, red).at(0, 0) == doctest::Approx(0.5));

    red.values().setConstant(60.0);
    CHECK(ndvi(nir, red).at(0, 0) == doctest::Approx(0.0));

    red.values().setConstant(0.0);
    nir.values().setConstant(1.0);
    CHECK(ndvi(nir, red).at(0, 0) == doctest::Approx(1.0));

    // Zero denominator.
    nir.set(0, 0, 0.0);
    const GridRaster out = ndvi(nir, red);
    CHECK(out.is_nodata(out.at(0, 0)));
}

TEST_CASE("ndvi is antisymmetric and rejects misaligned rasters") {
    std::mt19937_64 rng(61);
    GridRaster a = random_raster(rng, 4, 4, 1.0, 50.0);
    GridRaster b = random_raster(rng, 4, 4, 1.0, 50.0);
    a.values() = a.values().abs() + 1.0;
    b.values() = b.values().abs() + 1.0;
    const GridRaster ab = ndvi(a, b);
    const GridRaster ba = ndvi(b, a);
    for (Eigen::Index r = 0; r < 4; ++r) {
        for (Eigen::Index c = 0; c < 4; ++c) {
            CHECK(ab.at(r, c) == doctest::Approx(-ba.at(r, c)).epsilon(1e-12));
        }
    }

    const GridRaster shifted = make_raster(4, 4, 0.5);
    CHECK_THROWS_AS(ndvi(a, shifted), std::invalid_argument);
}

TEST_CASE("hillshade: flat raster is uniform 255*sin(altitude)") {
    GridRaster dsm = make_raster(5, 5);
    dsm.values().setConstant(100.0);
    const GridRaster shade = hillshade(dsm, 315.0, 45.0);
    const double expect = std::round(255.0 * std::sin(45.0 * M_PI / 180.0));
    for (Eigen::Index r = 1; r < 4; ++r) {
        for (Eigen::Index c = 1; c < 4; ++c) {
            CHECK(shade.at(r, c) == doctest::Approx(expect));
        }
    }
}

TEST_CASE("hillshade: a plane facing the light outshines one facing away") {
    // Light from the northwest (azimuth 315). z = x - y descends to the NW.
    GridRaster toward = make_raster(6, 6);
    GridRaster away = make_raster(6, 6);
    for (Eigen::Index r = 0; r < 6; ++r) {
        for (Eigen::Index c = 0; c < 6; ++c) {
            const Vec2 p = toward.cell_center(r, c);
            toward.set(r, c, 0.2 * (p.x() - p.y()));
            away.set(r, c, 0.2 * (p.y() - p.x()));
        }
    }
    CHECK(hillshade(toward).at(2, 2) > hillshade(away).at(2, 2));
}

TEST_CASE("hillshade matches the closed-form oracle within one grey level") {
    std::mt19937_64 rng(71);
    for (int it = 0; it < 20; ++it) {
        const GridRaster dsm = random_raster(rng, 6, 6, 1.0, 3.0);
        const GridRaster shade = hillshade(dsm);
        for (Eigen::Index r = 0; r < 6; ++r) {
            for (Eigen::Index c = 0; c < 6; ++c) {
                const double expect = oracles::hillshade_at(dsm, r, c, 315.0, 45.0, dsm.nodata());
                if (dsm.is_nodata(expect)) {
                    CHECK(shade.is_nodata(shade.at(r, c)));
                } else {
                    CHECK(std::abs(shade.at(r, c) - expect) <= 1.0);
                }
            }
        }
    }
}
