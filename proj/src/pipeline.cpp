#include "elfkit/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "elfkit/elf_search.hpp"
#include "elfkit/io/elf_export.hpp"
#include "elfkit/io/geojson.hpp"
#include "elfkit/io/grid_io.hpp"
#include "elfkit/io/prediction_io.hpp"
#include "elfkit/jobqueue.hpp"
#include "elfkit/raster_ops.hpp"

namespace elfkit {

namespace {

namespace fs = std::filesystem;

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<StageSpec> parse_stages(const std::string& text, const GridRaster* slope_pct) {
    std::vector<StageSpec> stages;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("stages: expected sw:classifier, got '" + item + "'");
        }
        StageSpec stage;
        stage.sw = std::stod(item.substr(0, colon));
        stage.classifier =
            make_classifier(ClassifierHandle::parse(item.substr(colon + 1)), slope_pct);
        stages.push_back(std::move(stage));
    }
    if (stages.empty()) {
        throw std::invalid_argument("stages: empty stage list");
    }
    return stages;
}

// Keyed per-polygon result files: full-precision fields so the merged
// exports do not depend on which run produced a part.
void write_part(const std::string& path, const std::vector<ElfRecord>& records) {
    std::ofstream out(path + ".tmp");
    if (!out) {
        throw std::runtime_error("cannot write part file " + path);
    }
    for (const ElfRecord& r : records) {
        out << format_g17(r.rect.anchor.x()) << '\t' << format_g17(r.rect.anchor.y()) << '\t'
            << format_g17(r.rect.length) << '\t' << format_g17(r.rect.width) << '\t'
            << format_g17(r.rect.rotation) << '\t' << format_g17(r.slope_fwd_pct) << '\t'
            << format_g17(r.slope_rev_pct) << '\t' << format_g17(r.required_length_fwd) << '\t'
            << format_g17(r.required_length_rev) << '\t' << r.accepted << '\t' << r.wet115 << '\t'
            << r.wet160 << '\n';
    }
    out.close();
    if (!out) {
        throw std::runtime_error("short write on part file " + path);
    }
    fs::rename(path + ".tmp", path);
}

std::vector<ElfRecord> read_part(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open part file " + path);
    }
    std::vector<ElfRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        ElfRecord r;
        double ax, ay;
        if (!(row >> ax >> ay >> r.rect.length >> r.rect.width >> r.rect.rotation >>
              r.slope_fwd_pct >> r.slope_rev_pct >> r.required_length_fwd >>
              r.required_length_rev >> r.accepted >> r.wet115 >> r.wet160)) {
            throw std::runtime_error("corrupt part file " + path);
        }
        r.rect.anchor = Vec2(ax, ay);
        r.length = r.rect.length;
        r.width = r.rect.width;
        records.push_back(r);
    }
    return records;
}

}  // namespace

PipelineResult run_pipeline(const io::KeyValueConfig& cfg, const std::string& out_dir,
                            int workers, std::size_t max_tasks) {
    if (workers < 1) {
        throw std::invalid_argument("pipeline: workers must be at least 1");
    }
    fs::create_directories(out_dir);
    const AircraftConfig aircraft = io::aircraft_from_config(cfg, "aircraft.");
    const Atmosphere atm = io::atmosphere_from_config(cfg, "atmosphere.");

    // Derive.
    GridRaster dsm;
    if (cfg.has("input.dsm")) {
        dsm = io::read_grid(cfg.get("input.dsm"));
    } else if (cfg.has("input.point_cloud")) {
        const PointCloud cloud = io::read_xyz(cfg.get("input.point_cloud"));
        IdwParams idw;
        idw.power = cfg.get_double_or("derive.idw_power", idw.power);
        idw.radius = cfg.get_double_or("derive.idw_radius", idw.radius);
        idw.max_points = static_cast<int>(cfg.get_int_or("derive.idw_max_points", idw.max_points));
        const double resolution = cfg.get_double_or("derive.resolution", 1.0);
        dsm = idw_interpolate(cloud, raster_spec_for_cloud(cloud, resolution), idw);
    } else {
        throw std::invalid_argument("pipeline: config needs input.dsm or input.point_cloud");
    }
    io::write_grid(out_dir + "/dsm.elfr", dsm);

    const GridRaster slope_pct = slope(dsm, SlopeUnits::Percent);
    io::write_grid(out_dir + "/slope.elfr", slope_pct);
    io::write_grid(out_dir + "/hillshade.elfr", hillshade(dsm));
    if (cfg.has("input.nir") && cfg.has("input.red")) {
        io::write_grid(out_dir + "/ndvi.elfr",
                       ndvi(io::read_grid(cfg.get("input.nir")), io::read_grid(cfg.get("input.red"))));
    }

    // Segment.
    const std::vector<StageSpec> stages =
        parse_stages(cfg.get_or("segment.stages", "32:oracle,16:oracle,8:oracle"), &slope_pct);
    const double threshold = cfg.get_double_or("segment.threshold", 0.99);
    const PatchGridSpec area = PatchGridSpec::from_raster(dsm, stages.back().sw, 0.0);

    PipelineResult result;
    const PredictionGrid grid =
        hierarchical_refine(area.origin_x, area.origin_y, area.extent_x, area.extent_y, stages,
                            threshold, &result.refine_stats);
    io::write_prediction_file(out_dir + "/predictions.tsv", io::prediction_records(grid));
    const std::vector<GeoPolygon> polygons = mask_to_polygons(grid);
    io::write_polygon_collection(out_dir + "/landable.geojson", polygons);
    result.polygons = polygons.size();

    // Search, partitioned per polygon through the journaled queue.
    const double surface_factor = cfg.get_double_or("search.surface_factor", kGrassFirmFactor);
    double elf_width = cfg.get_double_or("search.elf_width", 0.0);
    if (elf_width <= 0.0) {
        elf_width = 3.0 * aircraft.wing_span_m;
    }
    double elf_length = cfg.get_double_or("search.elf_length", 0.0);
    if (elf_length <= 0.0) {
        // Shortest usable field: the steepest-uphill assumption.
        const double steepest_pct = cfg.get_double_or("search.max_uphill_pct", 18.66);
        const double alpha = std::atan(steepest_pct / 100.0);
        elf_length = required_length(ground_roll_distance(aircraft, atm, alpha), surface_factor,
                                     steepest_pct);
    }

    fs::create_directories(out_dir + "/parts");
    JobQueue queue(out_dir + "/journal.log");
    if (queue.queued_count() + queue.leased_count() + queue.acked_count() == 0) {
        for (std::size_t i = 0; i < polygons.size(); ++i) {
            queue.enqueue("polygon:" + std::to_string(i));
        }
    } else if (queue.queued_count() + queue.acked_count() != polygons.size()) {
        throw std::runtime_error(
            "pipeline: journal does not match the current polygon set; use a fresh output dir");
    }

    std::atomic<long long> budget(max_tasks == 0 ? -1 : static_cast<long long>(max_tasks));
    std::atomic<bool> failed(false);
    std::string failure;
    std::mutex failure_mutex;

    auto worker_loop = [&](int worker_idx) {
        const std::string worker = "w" + std::to_string(worker_idx);
        while (!failed.load()) {
            if (budget.load() == 0) {
                return;
            }
            std::optional<Task> task;
            try {
                task = queue.lease(worker);
                if (!task) {
                    return;
                }
                if (max_tasks > 0 && budget.fetch_sub(1) <= 0) {
                    // Past the batch budget: leave the lease to expire on
                    // recovery, as a crash would.
                    return;
                }
                const std::size_t idx = std::stoull(task->payload.substr(8));
                const std::vector<OrientedRect> rects =
                    find_elfs(polygons[idx], elf_length, elf_width);
                std::vector<ElfRecord> records;
                records.reserve(rects.size());
                for (const OrientedRect& rect : rects) {
                    records.push_back(evaluate_elf(rect, dsm, aircraft, atm, surface_factor));
                }
                write_part(out_dir + "/parts/poly_" + std::to_string(idx) + ".tsv", records);
                queue.ack(worker, task->id);
            } catch (const std::exception& e) {
                failed.store(true);
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(worker_loop, w);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (failed.load()) {
        throw std::runtime_error("pipeline: polygon task failed: " + failure);
    }

    if (queue.acked_count() != polygons.size()) {
        result.complete = false;  // batch budget exhausted; rerun to finish
        return result;
    }

    // Merge the keyed parts in polygon order and export.
    std::vector<ElfRecord> all;
    for (std::size_t i = 0; i < polygons.size(); ++i) {
        for (ElfRecord& r : read_part(out_dir + "/parts/poly_" + std::to_string(i) + ".tsv")) {
            all.push_back(std::move(r));
        }
    }
    io::sort_records(all);
    io::write_elf_geojson(out_dir + "/elfs.geojson", all);
    io::write_elf_csv(out_dir + "/elfs.csv", all);
    io::write_elf_sql(out_dir + "/elfs.sql", all);

    result.elfs_total = all.size();
    for (const ElfRecord& r : all) {
        if (r.accepted) {
            ++result.elfs_accepted;
        }
    }

    std::ofstream manifest(out_dir + "/run_manifest.txt");
    manifest << "elf_length_m=" << format_g17(elf_length) << '\n';
    manifest << "elf_width_m=" << format_g17(elf_width) << '\n';
    manifest << "surface_factor=" << format_g17(surface_factor) << '\n';
    manifest << "segment.threshold=" << format_g17(threshold) << '\n';
    for (const auto& [key, value] : cfg.entries()) {
        manifest << "config." << key << '=' << value << '\n';
    }
    for (std::size_t s = 0; s < result.refine_stats.stages.size(); ++s) {
        const RefineStageStats& st = result.refine_stats.stages[s];
        manifest << "stage." << s + 1 << ".sw=" << st.sw << '\n';
        manifest << "stage." << s + 1 << ".patches_total=" << st.patches_total << '\n';
        manifest << "stage." << s + 1 << ".patches_run=" << st.patches_run << '\n';
        manifest << "stage." << s + 1 << ".area_run_m2=" << format_g17(st.area_run_m2) << '\n';
    }
    manifest << "polygons=" << result.polygons << '\n';
    manifest << "elfs_total=" << result.elfs_total << '\n';
    manifest << "elfs_accepted=" << result.elfs_accepted << '\n';
    if (!manifest) {
        throw std::runtime_error("pipeline: cannot write run manifest");
    }

    result.complete = true;
    return result;
}

}  // namespace elfkit
