// elfkit: emergency landing field toolkit.
//
// Subcommands cover the pipeline end to end: raster derivation, ensemble
// segmentation, rectangle search with ground-roll validation, the ground
// roll calculator, dataset generation, and the full pipeline driver.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "elfkit/dataset.hpp"
#include "elfkit/elf_search.hpp"
#include "elfkit/ground_roll.hpp"
#include "elfkit/io/elf_export.hpp"
#include "elfkit/io/geojson.hpp"
#include "elfkit/io/grid_io.hpp"
#include "elfkit/io/keyvalue.hpp"
#include "elfkit/io/prediction_io.hpp"
#include "elfkit/pipeline.hpp"
#include "elfkit/raster_ops.hpp"
#include "elfkit/segmentation.hpp"

namespace {

using namespace elfkit;

AircraftConfig load_aircraft(const std::string& path) {
    if (path.empty()) {
        return da20_c1();
    }
    return io::aircraft_from_config(io::KeyValueConfig::load(path));
}

Atmosphere load_atmosphere(const std::string& path) {
    if (path.empty()) {
        return Atmosphere{};
    }
    return io::atmosphere_from_config(io::KeyValueConfig::load(path));
}

int cmd_groll(const std::string& aircraft_path, double alpha_pct, double surface_factor) {
    const AircraftConfig aircraft = load_aircraft(aircraft_path);
    const Atmosphere atm = load_atmosphere(aircraft_path);
    const double alpha = std::atan(alpha_pct / 100.0);
    const double roll = ground_roll_distance(aircraft, atm, alpha);
    const double required = required_length(roll, surface_factor, alpha_pct);
    std::printf("s_g   = %.3f m\n", roll);
    std::printf("L_req = %.3f m\n", required);
    return 0;
}

struct DeriveArgs {
    std::string op;
    std::string in;
    std::string out;
    std::string nir;
    std::string red;
    std::string units = "percent";
    double resolution = 1.0;
    double azimuth = 315.0;
    double altitude = 45.0;
    double idw_power = 2.0;
    double idw_radius = 1.415;
    int idw_max_points = 16;
};

int cmd_derive(const DeriveArgs& args) {
    if (args.op == "ndvi") {
        io::write_grid(args.out, ndvi(io::read_grid(args.nir), io::read_grid(args.red)));
        return 0;
    }
    if (args.op == "idw") {
        const PointCloud cloud = io::read_xyz(args.in);
        IdwParams params;
        params.power = args.idw_power;
        params.radius = args.idw_radius;
        params.max_points = args.idw_max_points;
        io::write_grid(args.out,
                       idw_interpolate(cloud, raster_spec_for_cloud(cloud, args.resolution), params));
        return 0;
    }
    const GridRaster src = io::read_grid(args.in);
    if (args.op == "slope") {
        const SlopeUnits units =
            args.units == "degrees" ? SlopeUnits::Degrees : SlopeUnits::Percent;
        io::write_grid(args.out, slope(src, units));
    } else if (args.op == "roughness") {
        io::write_grid(args.out, roughness(src));
    } else if (args.op == "hillshade") {
        io::write_grid(args.out, hillshade(src, args.azimuth, args.altitude));
    } else if (args.op == "resample") {
        io::write_grid(args.out, bilinear_resample(src, args.resolution));
    } else {
        throw std::invalid_argument("derive: unknown op '" + args.op + "'");
    }
    return 0;
}

int cmd_segment(const std::string& slope_path, const std::string& stages_text, double threshold,
                const std::string& out_grid, const std::string& out_polygons, bool verbose) {
    const GridRaster slope_pct = io::read_grid(slope_path);

    std::vector<StageSpec> stages;
    std::istringstream in(stages_text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("segment: expected sw:classifier, got '" + item + "'");
        }
        StageSpec stage;
        stage.sw = std::stod(item.substr(0, colon));
        stage.classifier =
            make_classifier(ClassifierHandle::parse(item.substr(colon + 1)), &slope_pct);
        stages.push_back(std::move(stage));
    }

    const PatchGridSpec area = PatchGridSpec::from_raster(slope_pct, stages.back().sw, 0.0);
    RefineStats stats;
    const PredictionGrid grid = hierarchical_refine(area.origin_x, area.origin_y, area.extent_x,
                                                    area.extent_y, stages, threshold, &stats);
    if (!out_grid.empty()) {
        io::write_prediction_file(out_grid, io::prediction_records(grid));
    }
    if (!out_polygons.empty()) {
        io::write_polygon_collection(out_polygons, mask_to_polygons(grid));
    }
    if (verbose) {
        for (std::size_t s = 0; s < stats.stages.size(); ++s) {
            std::printf("stage %zu: sw %.0f m, ran %lld of %lld patches (%.0f m^2)\n", s + 1,
                        stats.stages[s].sw, static_cast<long long>(stats.stages[s].patches_run),
                        static_cast<long long>(stats.stages[s].patches_total),
                        stats.stages[s].area_run_m2);
        }
    }
    return 0;
}

int cmd_search(const std::string& polygons_path, const std::string& dsm_path,
               const std::string& aircraft_path, double surface_factor, double elf_length,
               double elf_width, const std::string& out_prefix) {
    const AircraftConfig aircraft = load_aircraft(aircraft_path);
    const Atmosphere atm = load_atmosphere(aircraft_path);
    const GridRaster dsm = io::read_grid(dsm_path);
    const std::vector<GeoPolygon> polygons = io::read_polygon_collection(polygons_path);

    if (elf_width <= 0.0) {
        elf_width = 3.0 * aircraft.wing_span_m;
    }
    if (elf_length <= 0.0) {
        const double steepest_pct = 18.66;
        elf_length = required_length(
            ground_roll_distance(aircraft, atm, std::atan(steepest_pct / 100.0)), surface_factor,
            steepest_pct);
    }

    std::vector<ElfRecord> records;
    for (const GeoPolygon& polygon : polygons) {
        for (const OrientedRect& rect : find_elfs(polygon, elf_length, elf_width)) {
            records.push_back(evaluate_elf(rect, dsm, aircraft, atm, surface_factor));
        }
    }
    io::sort_records(records);
    io::write_elf_geojson(out_prefix + ".geojson", records);
    io::write_elf_csv(out_prefix + ".csv", records);
    io::write_elf_sql(out_prefix + ".sql", records);

    std::size_t accepted = 0;
    for (const ElfRecord& r : records) {
        accepted += r.accepted ? 1 : 0;
    }
    std::printf("candidates: %zu, accepted: %zu (elf %.3f x %.2f m, factor %.2f)\n",
                records.size(), accepted, elf_length, elf_width, surface_factor);
    return 0;
}

struct DatasetArgs {
    std::string labels_path;
    std::vector<std::string> layer_args;  // NAME=path
    double sw = 8.0;
    double stride = 0.0;
    std::string out_dir;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    std::string verify_layer;
    double max_slope_pct = 10.0;
    std::string verify_policy = "relabel";
};

int cmd_dataset(const DatasetArgs& args) {
    std::vector<LabelPolygon> labels;
    for (const io::LabeledPolygon& lp : io::read_labeled_polygons(args.labels_path)) {
        labels.push_back(LabelPolygon::from_polygon(lp.polygon, lp.label));
    }
    std::map<std::string, GridRaster> layers;
    for (const std::string& spec : args.layer_args) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("dataset: --layer expects NAME=path");
        }
        layers.emplace(spec.substr(0, eq), io::read_grid(spec.substr(eq + 1)));
    }

    ExtractStats stats;
    SampleSet samples = extract_samples(labels, layers, args.sw, args.stride, &stats);
    std::printf("extracted %zu samples (%zu landable), skipped %zu out-of-bounds, %zu nodata\n",
                samples.size(), samples.class_count(1), stats.windows_out_of_bounds,
                stats.windows_with_nodata);

    if (!args.verify_layer.empty()) {
        const VerifyPolicy policy = args.verify_policy == "drop"      ? VerifyPolicy::Drop
                                    : args.verify_policy == "flag"    ? VerifyPolicy::FlagOnly
                                                                      : VerifyPolicy::Relabel;
        const VerifyReport report =
            verify_landable(samples, args.verify_layer, args.max_slope_pct, policy);
        std::printf("slope verification flagged %zu landable samples (policy %s)\n",
                    report.flagged.size(), args.verify_policy.c_str());
    }

    auto [train, test] = balance_split(samples, args.train_fraction, args.seed);
    save_sample_set(args.out_dir, train, test);
    std::printf("train: %zu (%zu/%zu), test: %zu (%zu/%zu) -> %s\n", train.size(),
                train.class_count(0), train.class_count(1), test.size(), test.class_count(0),
                test.class_count(1), args.out_dir.c_str());
    return 0;
}

int cmd_pipeline(const std::string& config_path, const std::string& out_dir, int workers,
                 std::size_t max_tasks) {
    const io::KeyValueConfig cfg = io::KeyValueConfig::load(config_path);
    const std::string dir = !out_dir.empty() ? out_dir : cfg.get_or("output.dir", "out");
    const PipelineResult result = run_pipeline(cfg, dir, workers, max_tasks);
    if (!result.complete) {
        std::printf("pipeline paused after the task budget; rerun to resume\n");
        return 0;
    }
    std::printf("polygons: %zu, elfs: %zu, accepted: %zu -> %s\n", result.polygons,
                result.elfs_total, result.elfs_accepted, dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emergency landing field toolkit"};
    app.require_subcommand(1);

    // groll
    std::string aircraft_path;
    double alpha_pct = 0.0;
    double surface_factor = kGrassFirmFactor;
    auto* groll = app.add_subcommand("groll", "ground roll and required field length");
    groll->add_option("--aircraft", aircraft_path, "aircraft key=value config (default: DA20-C1)");
    groll->add_option("--alpha-pct", alpha_pct, "field slope in percent, uphill positive")
        ->capture_default_str();
    groll->add_option("--surface-factor", surface_factor, "EASA surface factor (grass 1.15)")
        ->capture_default_str();

    // derive
    DeriveArgs derive_args;
    auto* derive = app.add_subcommand("derive", "raster derivations");
    derive->add_option("--op", derive_args.op, "slope|roughness|ndvi|hillshade|idw|resample")
        ->required();
    derive->add_option("--in", derive_args.in, "input raster (.elfr or .asc) or .xyz cloud");
    derive->add_option("--out", derive_args.out, "output raster")->required();
    derive->add_option("--nir", derive_args.nir, "NIR band (ndvi)");
    derive->add_option("--red", derive_args.red, "red band (ndvi)");
    derive->add_option("--units", derive_args.units, "slope units: percent|degrees")
        ->capture_default_str();
    derive->add_option("--resolution", derive_args.resolution, "output resolution in m (idw, resample)")
        ->capture_default_str();
    derive->add_option("--azimuth", derive_args.azimuth, "hillshade light azimuth in degrees")
        ->capture_default_str();
    derive->add_option("--altitude", derive_args.altitude, "hillshade light altitude in degrees")
        ->capture_default_str();
    derive->add_option("--idw-power", derive_args.idw_power, "IDW distance exponent")
        ->capture_default_str();
    derive->add_option("--idw-radius", derive_args.idw_radius, "IDW search radius in m")
        ->capture_default_str();
    derive->add_option("--idw-max-points", derive_args.idw_max_points, "IDW nearest sample cap")
        ->capture_default_str();

    // segment
    std::string slope_path, stages_text = "32:oracle,16:oracle,8:oracle";
    double threshold = 0.99;
    std::string out_grid, out_polygons;
    bool verbose = false;
    auto* segment = app.add_subcommand("segment", "hierarchical ensemble segmentation");
    segment->add_option("--slope", slope_path, "slope raster in percent")->required();
    segment
        ->add_option("--stages", stages_text,
                     "coarse-to-fine stages, e.g. 32:oracle,16:oracle:,8:file=preds8.tsv")
        ->capture_default_str();
    segment->add_option("--threshold", threshold, "refinement confidence threshold")
        ->capture_default_str();
    segment->add_option("--out-grid", out_grid, "prediction grid exchange file");
    segment->add_option("--out-polygons", out_polygons, "landable polygons GeoJSON");
    segment->add_flag("--verbose", verbose, "print per-stage statistics");

    // search
    std::string polygons_path, dsm_path, search_aircraft, out_prefix = "elfs";
    double search_factor = kGrassFirmFactor;
    double elf_length = 0.0;
    double elf_width = 0.0;
    auto* search = app.add_subcommand("search", "rectangle search with ground-roll validation");
    search->add_option("--polygons", polygons_path, "landable polygons GeoJSON")->required();
    search->add_option("--dsm", dsm_path, "DSM raster")->required();
    search->add_option("--aircraft", search_aircraft, "aircraft key=value config");
    search->add_option("--surface-factor", search_factor, "EASA surface factor")
        ->capture_default_str();
    search->add_option("--elf-length", elf_length,
                       "search length in m (default: required length at 18.66% uphill)");
    search->add_option("--elf-width", elf_width, "search width in m (default: 3 x wing span)");
    search->add_option("--out-prefix", out_prefix, "output prefix for .geojson/.csv/.sql")
        ->capture_default_str();

    // dataset
    DatasetArgs dataset_args;
    auto* dataset = app.add_subcommand("dataset", "labeled sample extraction");
    dataset->add_option("--labels", dataset_args.labels_path, "label polygons GeoJSON")->required();
    dataset->add_option("--layer", dataset_args.layer_args, "layer as NAME=raster-path (repeat)")
        ->required();
    dataset->add_option("--sw", dataset_args.sw, "window side in m")->capture_default_str();
    dataset->add_option("--stride", dataset_args.stride, "window stride in m (default sw/2)");
    dataset->add_option("--out", dataset_args.out_dir, "output sample directory")->required();
    dataset->add_option("--train-fraction", dataset_args.train_fraction, "train share per class")
        ->capture_default_str();
    dataset->add_option("--seed", dataset_args.seed, "shuffle seed")->capture_default_str();
    dataset->add_option("--verify-slope", dataset_args.verify_layer,
                        "slope layer name for landable verification");
    dataset->add_option("--max-slope", dataset_args.max_slope_pct, "slope threshold in percent")
        ->capture_default_str();
    dataset->add_option("--verify-policy", dataset_args.verify_policy, "flag|relabel|drop")
        ->capture_default_str();

    // pipeline
    std::string config_path, pipeline_out;
    int workers = 1;
    std::size_t max_tasks = 0;
    auto* pipeline = app.add_subcommand("pipeline", "derive -> segment -> search -> export");
    pipeline->add_option("--config", config_path, "pipeline key=value config")->required();
    pipeline->add_option("--out", pipeline_out, "output directory (default from config)");
    pipeline->add_option("--workers", workers, "worker threads for the polygon search")
        ->capture_default_str();
    pipeline->add_option("--max-tasks", max_tasks,
                         "stop after this many polygon tasks (0 = run to completion)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(groll)) {
            return cmd_groll(aircraft_path, alpha_pct, surface_factor);
        }
        if (app.got_subcommand(derive)) {
            return cmd_derive(derive_args);
        }
        if (app.got_subcommand(segment)) {
            return cmd_segment(slope_path, stages_text, threshold, out_grid, out_polygons,
                               verbose);
        }
        if (app.got_subcommand(search)) {
            return cmd_search(polygons_path, dsm_path, search_aircraft, search_factor, elf_length,
                              elf_width, out_prefix);
        }
        if (app.got_subcommand(dataset)) {
            return cmd_dataset(dataset_args);
        }
        if (app.got_subcommand(pipeline)) {
            return cmd_pipeline(config_path, pipeline_out, workers, max_tasks);
        }
    } catch (const std::exception& e) {
        std::cerr << "elfkit: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
