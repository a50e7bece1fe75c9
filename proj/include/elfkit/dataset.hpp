#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elfkit/geo.hpp"
#include "elfkit/raster.hpp"

namespace elfkit {

/// Axis-aligned square labeling polygon. Sides of 32/64/128/256 m are the
/// usual choices; any positive side is allowed.
struct LabelPolygon {
    GeoPolygon polygon;
    int label = 0;  // 0 unlandable, 1 landable
    double side = 0.0;

    /// Builds from a square polygon, deriving and checking the side.
    static LabelPolygon from_polygon(const GeoPolygon& polygon, int label);
};

/// Stack of sw_px x sw_px x layers float32 samples with labels and
/// per-layer normalization constants.
struct SampleSet {
    std::vector<std::string> layer_names;
    Eigen::Index sample_px = 0;
    double resolution = 0.0;
    double sw_m = 0.0;
    double stride_m = 0.0;
    std::string split_tag;
    std::uint64_t seed = 0;

    std::vector<std::vector<float>> samples;  // row-major H x W x C
    std::vector<int> labels;

    // Dataset-global per-layer (min, max); indexed like layer_names.
    std::vector<std::pair<double, double>> norm_min_max;

    std::size_t size() const { return samples.size(); }
    std::size_t class_count(int label) const;
    float sample_value(std::size_t i, Eigen::Index row, Eigen::Index col,
                       Eigen::Index layer) const;
};

struct ExtractStats {
    std::size_t windows_out_of_bounds = 0;
    std::size_t windows_with_nodata = 0;
};

/// Tiles every label square into sw x sw windows at the given stride and
/// cuts one multi-layer sample per window. Layers with coarser resolution
/// are first resampled bilinearly to the finest one. Windows that leave
/// the rasters or touch nodata are skipped and counted.
SampleSet extract_samples(const std::vector<LabelPolygon>& labels,
                          const std::map<std::string, GridRaster>& layers, double sw,
                          double stride = 0.0, ExtractStats* stats = nullptr);

enum class VerifyPolicy { FlagOnly, Relabel, Drop };

struct VerifyReport {
    std::vector<std::size_t> flagged;  // indices into the sample set
    VerifyPolicy policy = VerifyPolicy::FlagOnly;
};

/// Flags landable samples whose max slope exceeds the threshold, then
/// relabels or drops them per policy.
VerifyReport verify_landable(SampleSet& samples, const std::string& slope_layer,
                             double max_slope_pct, VerifyPolicy policy = VerifyPolicy::FlagOnly);

/// Downsamples both classes to equal counts with a seeded shuffle, then
/// splits each class by train_fraction. Deterministic for a fixed seed.
std::pair<SampleSet, SampleSet> balance_split(const SampleSet& samples, double train_fraction,
                                              std::uint64_t seed);

/// Normalization helpers for the stored constants (computed in double, so
/// applying then inverting reproduces the raw float exactly enough).
double normalize_value(double raw, double min, double max);
double denormalize_value(double normalized, double min, double max);

/// Directory container: manifest.txt plus one raw float32 blob and one
/// label byte-string per split.
void save_sample_set(const std::string& dir, const SampleSet& train, const SampleSet& test);
std::pair<SampleSet, SampleSet> load_sample_set(const std::string& dir);

}  // namespace elfkit
