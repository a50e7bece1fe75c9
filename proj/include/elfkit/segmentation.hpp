#pragma once

#include <memory>
#include <string>
#include <vector>

#include "elfkit/geo.hpp"
#include "elfkit/raster.hpp"

namespace elfkit {

/// Square search-window lattice over an area of interest. Windows of side
/// `sw` are placed at multiples of `stride` from the bbox min corner;
/// partial windows at the far edge are dropped.
struct PatchGridSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;  // bbox min corner (southern edge)
    double extent_x = 0.0;
    double extent_y = 0.0;
    double sw = 8.0;
    double stride = 4.0;

    static PatchGridSpec from_polygon(const GeoPolygon& area, double sw, double stride);
    static PatchGridSpec from_raster(const GridRaster& raster, double sw, double stride);

    Eigen::Index cols() const;
    Eigen::Index rows() const;
};

struct PatchFootprint {
    Eigen::Index index = 0;  // row-major over the lattice
    double min_x = 0.0;
    double min_y = 0.0;
    double sw = 0.0;
};

std::vector<PatchFootprint> patch_grid(const PatchGridSpec& spec);

/// Classifier confidence from the winning class probability:
/// (p_max - 0.5) / 0.5. p_max outside [0.5, 1] is an error.
double confidence_from_pmax(double p_max);

struct PatchPrediction {
    int label = 0;       // 0 unlandable, 1 landable
    double p_max = 1.0;  // winning class probability, in [0.5, 1]
};

/// Pluggable patch classifier: the stand-in boundary for trained models.
class PatchClassifier {
  public:
    virtual ~PatchClassifier() = default;
    virtual PatchPrediction classify(const PatchFootprint& patch) const = 0;
};

/// Labels a patch landable iff the max slope inside it stays at or below
/// the threshold; confidence grows with the distance from the threshold.
class SlopeOracleClassifier : public PatchClassifier {
  public:
    SlopeOracleClassifier(const GridRaster& slope_pct, double threshold_pct = 10.0);
    PatchPrediction classify(const PatchFootprint& patch) const override;

  private:
    const GridRaster* slope_pct_;
    double threshold_pct_;
};

/// Serves predictions from a prediction-grid exchange file, keyed by the
/// patch footprint. A missing patch is an error naming its index.
class FilePredictionClassifier : public PatchClassifier {
  public:
    explicit FilePredictionClassifier(const std::string& path);
    PatchPrediction classify(const PatchFootprint& patch) const override;

  private:
    struct Key {
        long long x_nm, y_nm, sw_nm;
        bool operator<(const Key& o) const;
    };
    static Key make_key(double min_x, double min_y, double sw);
    std::vector<std::pair<Key, PatchPrediction>> entries_;
    std::string path_;
};

/// Configuration handle for a classifier stage.
struct ClassifierHandle {
    enum class Kind { SlopeOracle, ExternalFile };
    Kind kind = Kind::SlopeOracle;
    double threshold_pct = 10.0;  // slope oracle
    std::string path;             // external file

    /// Parses "oracle", "oracle:12.5" or "file=preds.tsv".
    static ClassifierHandle parse(const std::string& text);
};

std::shared_ptr<PatchClassifier> make_classifier(const ClassifierHandle& handle,
                                                 const GridRaster* slope_pct);

struct PredictionCell {
    int label = 0;
    double confidence = 0.0;
    int stage = 0;  // 1-based id of the last stage that covered the cell, 0 = uncovered
};

/// Per-patch (label, confidence) lattice produced by a classifier stage or
/// by the cascade. Cell i corresponds to the patch footprint at lattice
/// position i of `spec`.
class PredictionGrid {
  public:
    PredictionGrid() = default;
    explicit PredictionGrid(const PatchGridSpec& spec);

    const PatchGridSpec& spec() const { return spec_; }
    Eigen::Index cols() const { return spec_.cols(); }
    Eigen::Index rows() const { return spec_.rows(); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(cells_.size()); }

    const PredictionCell& cell(Eigen::Index i) const { return cells_[static_cast<std::size_t>(i)]; }
    PredictionCell& cell(Eigen::Index i) { return cells_[static_cast<std::size_t>(i)]; }
    const std::vector<PredictionCell>& cells() const { return cells_; }

    /// Min corner of the stride-sized tile owned by cell i.
    Vec2 cell_min(Eigen::Index i) const;

  private:
    PatchGridSpec spec_;
    std::vector<PredictionCell> cells_;
};

/// Runs one classifier over every patch of the lattice.
PredictionGrid classify_stage(const PatchGridSpec& spec, const PatchClassifier& classifier);

struct StageSpec {
    double sw = 8.0;
    double stride = 0.0;  // 0 = sw / 2
    std::shared_ptr<PatchClassifier> classifier;
};

/// One (stage, label, confidence) contribution to a cell's vote.
struct Contribution {
    int stage = 0;  // 1-based
    int label = 0;
    double confidence = 0.0;
};

struct VoteTally {
    double mass_landable = 0.0;
    double mass_unlandable = 0.0;
    // Equal weighted mass resolves to unlandable: a false landable call is
    // the dangerous mistake.
    int label() const { return mass_landable > mass_unlandable ? 1 : 0; }
};

VoteTally weighted_vote(const std::vector<Contribution>& contributions);

struct RefineStageStats {
    double sw = 0.0;
    Eigen::Index patches_total = 0;
    Eigen::Index patches_run = 0;
    double area_run_m2 = 0.0;
};

struct RefineStats {
    std::vector<RefineStageStats> stages;
};

/// Hierarchical coarse-to-fine cascade. Stage 1 classifies the whole
/// area; each later stage runs only on patches that still cover a cell
/// with average confidence below `threshold` or a current landable vote.
/// A prediction contributes to every finest-lattice cell whose footprint
/// lies inside the predicting patch; final labels come from the
/// confidence-weighted vote, final confidence is the mean over the
/// contributions. Cells the cascade never refined keep their coarse
/// result.
PredictionGrid hierarchical_refine(double area_origin_x, double area_origin_y,
                                   double area_extent_x, double area_extent_y,
                                   const std::vector<StageSpec>& stages, double threshold = 0.99,
                                   RefineStats* stats = nullptr);

/// Traces the landable cells of a finest-stage grid into polygons: cells
/// are stride-sized tiles, components are 4-connected, enclosed unlandable
/// regions become holes.
std::vector<GeoPolygon> mask_to_polygons(const PredictionGrid& grid);

}  // namespace elfkit
