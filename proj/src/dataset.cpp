#include "elfkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "elfkit/raster_ops.hpp"

namespace elfkit {

namespace {

constexpr double kSquareTol = 1e-6;

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is pinned.
void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_blob(const std::string& path, const SampleSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write sample blob " + path);
    }
    for (const std::vector<float>& sample : set.samples) {
        out.write(reinterpret_cast<const char*>(sample.data()),
                  static_cast<std::streamsize>(sample.size() * sizeof(float)));
    }
    if (!out) {
        throw std::runtime_error("short write on sample blob " + path);
    }
}

void write_labels(const std::string& path, const SampleSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write label file " + path);
    }
    for (int label : set.labels) {
        const char byte = static_cast<char>(label);
        out.write(&byte, 1);
    }
    if (!out) {
        throw std::runtime_error("short write on label file " + path);
    }
}

}  // namespace

LabelPolygon LabelPolygon::from_polygon(const GeoPolygon& polygon, int label) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("label polygon: label must be 0 or 1");
    }
    const Ring& ring = polygon.exterior();
    if (ring.size() != 5) {
        throw std::invalid_argument("label polygon: expected a quadrilateral ring");
    }
    const Bounds b = polygon_limits(polygon);
    const double side = b.width();
    if (std::abs(b.height() - side) > kSquareTol) {
        throw std::invalid_argument("label polygon: not square");
    }
    // Axis-aligned check: every vertex sits on the bbox corners.
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const bool on_x = std::abs(ring[i].x() - b.x_min) < kSquareTol ||
                          std::abs(ring[i].x() - b.x_max) < kSquareTol;
        const bool on_y = std::abs(ring[i].y() - b.y_min) < kSquareTol ||
                          std::abs(ring[i].y() - b.y_max) < kSquareTol;
        if (!on_x || !on_y) {
            throw std::invalid_argument("label polygon: must be axis-aligned");
        }
    }
    LabelPolygon lp;
    lp.polygon = polygon;
    lp.label = label;
    lp.side = side;
    return lp;
}

std::size_t SampleSet::class_count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

float SampleSet::sample_value(std::size_t i, Eigen::Index row, Eigen::Index col,
                              Eigen::Index layer) const {
    const Eigen::Index n_layers = static_cast<Eigen::Index>(layer_names.size());
    return samples[i][static_cast<std::size_t>((row * sample_px + col) * n_layers + layer)];
}

SampleSet extract_samples(const std::vector<LabelPolygon>& labels,
                          const std::map<std::string, GridRaster>& layers, double sw,
                          double stride, ExtractStats* stats) {
    if (layers.empty()) {
        throw std::invalid_argument("extract: no layers");
    }
    if (!(sw > 0.0)) {
        throw std::invalid_argument("extract: sw must be positive");
    }
    if (stride <= 0.0) {
        stride = sw / 2.0;
    }

    // Resample every layer to the finest resolution present.
    double res = std::numeric_limits<double>::infinity();
    for (const auto& [name, raster] : layers) {
        if (std::abs(raster.res_x() - raster.res_y()) > 1e-12) {
            throw std::invalid_argument("extract: layer '" + name + "' has non-square pixels");
        }
        res = std::min(res, raster.res_x());
    }
    std::map<std::string, GridRaster> aligned;
    for (const auto& [name, raster] : layers) {
        aligned.emplace(name, raster.res_x() > res + 1e-12 ? bilinear_resample(raster, res)
                                                           : raster);
    }
    const GridRaster& reference = aligned.begin()->second;
    for (const auto& [name, raster] : aligned) {
        if (!raster.same_grid(reference)) {
            throw std::invalid_argument("extract: layer '" + name +
                                        "' is not aligned with the others after resampling");
        }
    }

    SampleSet set;
    for (const auto& [name, raster] : aligned) {
        set.layer_names.push_back(name);
    }
    set.resolution = res;
    set.sw_m = sw;
    set.stride_m = stride;
    set.sample_px = static_cast<Eigen::Index>(std::llround(sw / res));
    if (set.sample_px <= 0) {
        throw std::invalid_argument("extract: sw is below one pixel");
    }
    const Eigen::Index n_layers = static_cast<Eigen::Index>(set.layer_names.size());

    ExtractStats local_stats;
    for (const LabelPolygon& lp : labels) {
        const Bounds b = polygon_limits(lp.polygon);
        const double extent_x = b.width();
        const double extent_y = b.height();
        if (extent_x + 1e-9 < sw || extent_y + 1e-9 < sw) {
            continue;
        }
        const auto nx = static_cast<Eigen::Index>(std::floor((extent_x - sw) / stride + 1e-9)) + 1;
        const auto ny = static_cast<Eigen::Index>(std::floor((extent_y - sw) / stride + 1e-9)) + 1;
        for (Eigen::Index iy = 0; iy < ny; ++iy) {
            for (Eigen::Index ix = 0; ix < nx; ++ix) {
                const double wx = b.x_min + static_cast<double>(ix) * stride;
                const double wy_top = b.y_max - static_cast<double>(iy) * stride;
                const Eigen::Index c0 = static_cast<Eigen::Index>(
                    std::llround((wx - reference.origin_x()) / res));
                const Eigen::Index r0 = static_cast<Eigen::Index>(
                    std::llround((reference.origin_y() - wy_top) / res));
                if (c0 < 0 || r0 < 0 || c0 + set.sample_px > reference.width() ||
                    r0 + set.sample_px > reference.height()) {
                    ++local_stats.windows_out_of_bounds;
                    continue;
                }
                std::vector<float> tensor(
                    static_cast<std::size_t>(set.sample_px * set.sample_px * n_layers));
                bool clean = true;
                for (Eigen::Index r = 0; r < set.sample_px && clean; ++r) {
                    for (Eigen::Index c = 0; c < set.sample_px && clean; ++c) {
                        Eigen::Index layer = 0;
                        for (const auto& [name, raster] : aligned) {
                            const double v = raster.at(r0 + r, c0 + c);
                            if (raster.is_nodata(v)) {
                                clean = false;
                                break;
                            }
                            tensor[static_cast<std::size_t>(
                                (r * set.sample_px + c) * n_layers + layer)] =
                                static_cast<float>(v);
                            ++layer;
                        }
                    }
                }
                if (!clean) {
                    ++local_stats.windows_with_nodata;
                    continue;
                }
                set.samples.push_back(std::move(tensor));
                set.labels.push_back(lp.label);
            }
        }
    }

    set.norm_min_max.assign(static_cast<std::size_t>(n_layers),
                            {std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()});
    for (const std::vector<float>& sample : set.samples) {
        for (std::size_t k = 0; k < sample.size(); ++k) {
            auto& [lo, hi] = set.norm_min_max[k % static_cast<std::size_t>(n_layers)];
            lo = std::min(lo, static_cast<double>(sample[k]));
            hi = std::max(hi, static_cast<double>(sample[k]));
        }
    }
    if (set.samples.empty()) {
        set.norm_min_max.assign(static_cast<std::size_t>(n_layers), {0.0, 0.0});
    }
    if (stats != nullptr) {
        *stats = local_stats;
    }
    return set;
}

VerifyReport verify_landable(SampleSet& samples, const std::string& slope_layer,
                             double max_slope_pct, VerifyPolicy policy) {
    const auto it =
        std::find(samples.layer_names.begin(), samples.layer_names.end(), slope_layer);
    if (it == samples.layer_names.end()) {
        throw std::invalid_argument("verify: slope layer '" + slope_layer + "' not present");
    }
    const Eigen::Index layer = it - samples.layer_names.begin();

    VerifyReport report;
    report.policy = policy;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples.labels[i] != 1) {
            continue;
        }
        float max_slope = -std::numeric_limits<float>::infinity();
        for (Eigen::Index r = 0; r < samples.sample_px; ++r) {
            for (Eigen::Index c = 0; c < samples.sample_px; ++c) {
                max_slope = std::max(max_slope, samples.sample_value(i, r, c, layer));
            }
        }
        if (max_slope > max_slope_pct) {
            report.flagged.push_back(i);
        }
    }

    if (policy == VerifyPolicy::Relabel) {
        for (std::size_t i : report.flagged) {
            samples.labels[i] = 0;
        }
    } else if (policy == VerifyPolicy::Drop) {
        std::vector<std::vector<float>> kept_samples;
        std::vector<int> kept_labels;
        std::size_t next_flagged = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (next_flagged < report.flagged.size() && report.flagged[next_flagged] == i) {
                ++next_flagged;
                continue;
            }
            kept_samples.push_back(std::move(samples.samples[i]));
            kept_labels.push_back(samples.labels[i]);
        }
        samples.samples = std::move(kept_samples);
        samples.labels = std::move(kept_labels);
    }
    return report;
}

std::pair<SampleSet, SampleSet> balance_split(const SampleSet& samples, double train_fraction,
                                              std::uint64_t seed) {
    if (!(train_fraction >= 0.0) || train_fraction > 1.0) {
        throw std::invalid_argument("split: train fraction must lie in [0, 1]");
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        by_class[samples.labels[i] == 1 ? 1 : 0].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty()) {
        throw std::invalid_argument("split: both classes must be non-empty");
    }
    seeded_shuffle(by_class[0], seed);
    seeded_shuffle(by_class[1], seed + 1);
    const std::size_t keep = std::min(by_class[0].size(), by_class[1].size());
    const std::size_t n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(keep) * train_fraction + 1e-9));

    auto assemble = [&](bool train_half) {
        SampleSet out;
        out.layer_names = samples.layer_names;
        out.sample_px = samples.sample_px;
        out.resolution = samples.resolution;
        out.sw_m = samples.sw_m;
        out.stride_m = samples.stride_m;
        out.norm_min_max = samples.norm_min_max;
        out.seed = seed;
        out.split_tag = train_half ? "train" : "test";
        for (int cls = 0; cls < 2; ++cls) {
            const std::size_t begin = train_half ? 0 : n_train;
            const std::size_t end = train_half ? n_train : keep;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = by_class[cls][k];
                out.samples.push_back(samples.samples[i]);
                out.labels.push_back(samples.labels[i]);
            }
        }
        return out;
    };
    return {assemble(true), assemble(false)};
}

double normalize_value(double raw, double min, double max) {
    if (!(max > min)) {
        throw std::invalid_argument("normalize: max must exceed min");
    }
    return (raw - min) / (max - min);
}

double denormalize_value(double normalized, double min, double max) {
    return normalized * (max - min) + min;
}

void save_sample_set(const std::string& dir, const SampleSet& train, const SampleSet& test) {
    if (train.layer_names != test.layer_names || train.sample_px != test.sample_px) {
        throw std::invalid_argument("save: train and test sets are incompatible");
    }
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir + "/manifest.txt");
    if (!manifest) {
        throw std::runtime_error("cannot write manifest in " + dir);
    }
    manifest << "format=elfkit-sampleset-v1\n";
    std::string joined;
    for (const std::string& name : train.layer_names) {
        if (!joined.empty()) {
            joined += ',';
        }
        joined += name;
    }
    manifest << "layers=" << joined << '\n';
    manifest << "sample_px=" << train.sample_px << '\n';
    manifest << "resolution=" << format_g17(train.resolution) << '\n';
    manifest << "sw_m=" << format_g17(train.sw_m) << '\n';
    manifest << "stride_m=" << format_g17(train.stride_m) << '\n';
    manifest << "seed=" << train.seed << '\n';
    for (std::size_t l = 0; l < train.layer_names.size(); ++l) {
        manifest << "norm." << train.layer_names[l] << ".min="
                 << format_g17(train.norm_min_max[l].first) << '\n';
        manifest << "norm." << train.layer_names[l] << ".max="
                 << format_g17(train.norm_min_max[l].second) << '\n';
    }
    for (const SampleSet* set : {&train, &test}) {
        manifest << "split." << set->split_tag << ".count=" << set->size() << '\n';
        manifest << "split." << set->split_tag << ".class0=" << set->class_count(0) << '\n';
        manifest << "split." << set->split_tag << ".class1=" << set->class_count(1) << '\n';
    }
    if (!manifest) {
        throw std::runtime_error("short write on manifest in " + dir);
    }
    write_blob(dir + "/train.f32", train);
    write_labels(dir + "/train.labels", train);
    write_blob(dir + "/test.f32", test);
    write_labels(dir + "/test.labels", test);
}

namespace {

SampleSet load_split(const std::string& dir, const SampleSet& prototype, const std::string& tag,
                     std::size_t count) {
    SampleSet set = prototype;
    set.split_tag = tag;
    const std::size_t values =
        static_cast<std::size_t>(set.sample_px * set.sample_px) * set.layer_names.size();
    std::ifstream blob(dir + "/" + tag + ".f32", std::ios::binary);
    std::ifstream labels(dir + "/" + tag + ".labels", std::ios::binary);
    if (!blob || !labels) {
        throw std::runtime_error("cannot open split files for " + tag + " in " + dir);
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<float> sample(values);
        blob.read(reinterpret_cast<char*>(sample.data()),
                  static_cast<std::streamsize>(values * sizeof(float)));
        char byte = 0;
        labels.read(&byte, 1);
        if (!blob || !labels) {
            throw std::runtime_error("truncated split files for " + tag + " in " + dir);
        }
        set.samples.push_back(std::move(sample));
        set.labels.push_back(byte);
    }
    return set;
}

}  // namespace

std::pair<SampleSet, SampleSet> load_sample_set(const std::string& dir) {
    std::ifstream in(dir + "/manifest.txt");
    if (!in) {
        throw std::runtime_error("cannot open manifest in " + dir);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    if (kv["format"] != "elfkit-sampleset-v1") {
        throw std::runtime_error("manifest in " + dir + ": unknown format");
    }
    SampleSet proto;
    std::istringstream layer_stream(kv["layers"]);
    std::string name;
    while (std::getline(layer_stream, name, ',')) {
        proto.layer_names.push_back(name);
    }
    proto.sample_px = std::stoll(kv["sample_px"]);
    proto.resolution = std::stod(kv["resolution"]);
    proto.sw_m = std::stod(kv["sw_m"]);
    proto.stride_m = std::stod(kv["stride_m"]);
    proto.seed = std::stoull(kv["seed"]);
    for (const std::string& layer : proto.layer_names) {
        proto.norm_min_max.emplace_back(std::stod(kv.at("norm." + layer + ".min")),
                                        std::stod(kv.at("norm." + layer + ".max")));
    }
    const std::size_t n_train = std::stoull(kv.at("split.train.count"));
    const std::size_t n_test = std::stoull(kv.at("split.test.count"));
    return {load_split(dir, proto, "train", n_train), load_split(dir, proto, "test", n_test)};
}

}  // namespace elfkit
