#include "elfkit/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "elfkit/io/prediction_io.hpp"

namespace elfkit {

namespace {

constexpr double kLatticeEps = 1e-9;

Eigen::Index windows_along(double extent, double sw, double stride) {
    if (extent + kLatticeEps < sw) {
        return 0;
    }
    return static_cast<Eigen::Index>(std::floor((extent - sw) / stride + kLatticeEps)) + 1;
}

}  // namespace

PatchGridSpec PatchGridSpec::from_polygon(const GeoPolygon& area, double sw, double stride) {
    const Bounds b = polygon_limits(area);
    PatchGridSpec spec;
    spec.origin_x = b.x_min;
    spec.origin_y = b.y_min;
    spec.extent_x = b.width();
    spec.extent_y = b.height();
    spec.sw = sw;
    spec.stride = stride > 0.0 ? stride : sw / 2.0;
    return spec;
}

PatchGridSpec PatchGridSpec::from_raster(const GridRaster& raster, double sw, double stride) {
    PatchGridSpec spec;
    spec.origin_x = raster.origin_x();
    spec.origin_y = raster.origin_y() - static_cast<double>(raster.height()) * raster.res_y();
    spec.extent_x = static_cast<double>(raster.width()) * raster.res_x();
    spec.extent_y = static_cast<double>(raster.height()) * raster.res_y();
    spec.sw = sw;
    spec.stride = stride > 0.0 ? stride : sw / 2.0;
    return spec;
}

Eigen::Index PatchGridSpec::cols() const { return windows_along(extent_x, sw, stride); }

Eigen::Index PatchGridSpec::rows() const { return windows_along(extent_y, sw, stride); }

std::vector<PatchFootprint> patch_grid(const PatchGridSpec& spec) {
    if (!(spec.sw > 0.0) || !(spec.stride > 0.0)) {
        throw std::invalid_argument("patch grid: sw and stride must be positive");
    }
    const Eigen::Index nx = spec.cols();
    const Eigen::Index ny = spec.rows();
    std::vector<PatchFootprint> patches;
    if (nx <= 0 || ny <= 0) {
        return patches;
    }
    patches.reserve(static_cast<std::size_t>(nx * ny));
    for (Eigen::Index iy = 0; iy < ny; ++iy) {
        for (Eigen::Index ix = 0; ix < nx; ++ix) {
            PatchFootprint p;
            p.index = iy * nx + ix;
            p.min_x = spec.origin_x + static_cast<double>(ix) * spec.stride;
            p.min_y = spec.origin_y + static_cast<double>(iy) * spec.stride;
            p.sw = spec.sw;
            patches.push_back(p);
        }
    }
    return patches;
}

double confidence_from_pmax(double p_max) {
    if (p_max < 0.5 - 1e-12 || p_max > 1.0 + 1e-12) {
        throw std::domain_error("confidence: p_max must lie in [0.5, 1]");
    }
    return std::clamp((p_max - 0.5) / 0.5, 0.0, 1.0);
}

SlopeOracleClassifier::SlopeOracleClassifier(const GridRaster& slope_pct, double threshold_pct)
    : slope_pct_(&slope_pct), threshold_pct_(threshold_pct) {
    if (!(threshold_pct > 0.0)) {
        throw std::invalid_argument("slope oracle: threshold must be positive");
    }
}

PatchPrediction SlopeOracleClassifier::classify(const PatchFootprint& patch) const {
    const GridRaster& s = *slope_pct_;
    // Cells whose centers fall inside the footprint.
    const Eigen::Index c0 = static_cast<Eigen::Index>(
        std::ceil((patch.min_x - s.origin_x()) / s.res_x() - 0.5 - kLatticeEps));
    const Eigen::Index c1 = static_cast<Eigen::Index>(
        std::floor((patch.min_x + patch.sw - s.origin_x()) / s.res_x() - 0.5 + kLatticeEps));
    const Eigen::Index r0 = static_cast<Eigen::Index>(
        std::ceil((s.origin_y() - (patch.min_y + patch.sw)) / s.res_y() - 0.5 - kLatticeEps));
    const Eigen::Index r1 = static_cast<Eigen::Index>(
        std::floor((s.origin_y() - patch.min_y) / s.res_y() - 0.5 + kLatticeEps));

    double max_slope = -1.0;
    for (Eigen::Index r = std::max<Eigen::Index>(0, r0); r <= std::min(r1, s.height() - 1); ++r) {
        for (Eigen::Index c = std::max<Eigen::Index>(0, c0); c <= std::min(c1, s.width() - 1);
             ++c) {
            const double v = s.at(r, c);
            if (!s.is_nodata(v)) {
                max_slope = std::max(max_slope, v);
            }
        }
    }

    PatchPrediction pred;
    if (max_slope < 0.0) {
        // Nothing measurable under the patch: refuse to certify it.
        pred.label = 0;
        pred.p_max = 1.0;
        return pred;
    }
    pred.label = max_slope <= threshold_pct_ ? 1 : 0;
    const double margin = std::min(1.0, std::abs(max_slope - threshold_pct_) / threshold_pct_);
    pred.p_max = 0.5 + 0.5 * margin;
    return pred;
}

bool FilePredictionClassifier::Key::operator<(const Key& o) const {
    if (x_nm != o.x_nm) return x_nm < o.x_nm;
    if (y_nm != o.y_nm) return y_nm < o.y_nm;
    return sw_nm < o.sw_nm;
}

FilePredictionClassifier::Key FilePredictionClassifier::make_key(double min_x, double min_y,
                                                                 double sw) {
    return Key{std::llround(min_x * 1e6), std::llround(min_y * 1e6), std::llround(sw * 1e6)};
}

FilePredictionClassifier::FilePredictionClassifier(const std::string& path) : path_(path) {
    for (const io::PredictionRecord& rec : io::read_prediction_file(path)) {
        PatchPrediction pred;
        pred.label = rec.label;
        pred.p_max = rec.p_max;
        entries_.emplace_back(make_key(rec.min_x, rec.min_y, rec.sw), pred);
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

PatchPrediction FilePredictionClassifier::classify(const PatchFootprint& patch) const {
    const Key key = make_key(patch.min_x, patch.min_y, patch.sw);
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& entry, const Key& k) { return entry.first < k; });
    if (it == entries_.end() || key < it->first) {
        throw std::runtime_error("prediction file " + path_ + " has no entry for patch " +
                                 std::to_string(patch.index));
    }
    return it->second;
}

ClassifierHandle ClassifierHandle::parse(const std::string& text) {
    ClassifierHandle h;
    if (text.rfind("file=", 0) == 0) {
        h.kind = Kind::ExternalFile;
        h.path = text.substr(5);
        if (h.path.empty()) {
            throw std::invalid_argument("classifier: empty prediction file path");
        }
        return h;
    }
    if (text.rfind("oracle", 0) == 0) {
        h.kind = Kind::SlopeOracle;
        if (text.size() > 6 && text[6] == ':') {
            h.threshold_pct = std::stod(text.substr(7));
        } else if (text.size() > 6) {
            throw std::invalid_argument("classifier: cannot parse '" + text + "'");
        }
        return h;
    }
    throw std::invalid_argument("classifier: cannot parse '" + text + "'");
}

std::shared_ptr<PatchClassifier> make_classifier(const ClassifierHandle& handle,
                                                 const GridRaster* slope_pct) {
    switch (handle.kind) {
        case ClassifierHandle::Kind::SlopeOracle:
            if (slope_pct == nullptr) {
                throw std::invalid_argument("classifier: slope oracle needs a slope raster");
            }
            return std::make_shared<SlopeOracleClassifier>(*slope_pct, handle.threshold_pct);
        case ClassifierHandle::Kind::ExternalFile:
            return std::make_shared<FilePredictionClassifier>(handle.path);
    }
    throw std::logic_error("classifier: unknown kind");
}

PredictionGrid::PredictionGrid(const PatchGridSpec& spec) : spec_(spec) {
    cells_.resize(static_cast<std::size_t>(std::max<Eigen::Index>(0, spec.cols() * spec.rows())));
}

Vec2 PredictionGrid::cell_min(Eigen::Index i) const {
    const Eigen::Index nx = spec_.cols();
    const Eigen::Index ix = i % nx;
    const Eigen::Index iy = i / nx;
    return Vec2(spec_.origin_x + static_cast<double>(ix) * spec_.stride,
                spec_.origin_y + static_cast<double>(iy) * spec_.stride);
}

PredictionGrid classify_stage(const PatchGridSpec& spec, const PatchClassifier& classifier) {
    PredictionGrid grid(spec);
    for (const PatchFootprint& patch : patch_grid(spec)) {
        const PatchPrediction pred = classifier.classify(patch);
        if (pred.label != 0 && pred.label != 1) {
            throw std::domain_error("classify: label must be 0 or 1");
        }
        PredictionCell& cell = grid.cell(patch.index);
        cell.label = pred.label;
        cell.confidence = confidence_from_pmax(pred.p_max);
        cell.stage = 1;
    }
    return grid;
}

VoteTally weighted_vote(const std::vector<Contribution>& contributions) {
    VoteTally tally;
    for (const Contribution& c : contributions) {
        (c.label == 1 ? tally.mass_landable : tally.mass_unlandable) += c.confidence;
    }
    return tally;
}

PredictionGrid hierarchical_refine(double area_origin_x, double area_origin_y,
                                   double area_extent_x, double area_extent_y,
                                   const std::vector<StageSpec>& stages, double threshold,
                                   RefineStats* stats) {
    if (stages.empty()) {
        throw std::invalid_argument("hierarchical refine: stage list is empty");
    }
    for (const StageSpec& st : stages) {
        if (!st.classifier) {
            throw std::invalid_argument("hierarchical refine: stage without classifier");
        }
    }

    auto stage_spec = [&](const StageSpec& st) {
        PatchGridSpec spec;
        spec.origin_x = area_origin_x;
        spec.origin_y = area_origin_y;
        spec.extent_x = area_extent_x;
        spec.extent_y = area_extent_y;
        spec.sw = st.sw;
        spec.stride = st.stride > 0.0 ? st.stride : st.sw / 2.0;
        return spec;
    };

    const PatchGridSpec fine = stage_spec(stages.back());
    const Eigen::Index nfx = fine.cols();
    const Eigen::Index nfy = fine.rows();
    const Eigen::Index n_cells = std::max<Eigen::Index>(0, nfx * nfy);
    std::vector<std::vector<Contribution>> acc(static_cast<std::size_t>(n_cells));

    // Fine cells whose whole footprint lies inside [min_x, min_x + sw)^2.
    auto covered_range = [&](double patch_min, double patch_sw, double origin, Eigen::Index count,
                             Eigen::Index* lo, Eigen::Index* hi) {
        const double rel = patch_min - origin;
        *lo = static_cast<Eigen::Index>(std::ceil(rel / fine.stride - kLatticeEps));
        *hi = static_cast<Eigen::Index>(
            std::floor((rel + patch_sw - fine.sw) / fine.stride + kLatticeEps));
        *lo = std::max<Eigen::Index>(0, *lo);
        *hi = std::min(count - 1, *hi);
    };

    auto cell_open = [&](const std::vector<Contribution>& contributions) {
        if (contributions.empty()) {
            return true;
        }
        double sum = 0.0;
        for (const Contribution& c : contributions) {
            sum += c.confidence;
        }
        const double mean = sum / static_cast<double>(contributions.size());
        return mean < threshold || weighted_vote(contributions).label() == 1;
    };

    if (stats != nullptr) {
        stats->stages.clear();
    }

    for (std::size_t s = 0; s < stages.size(); ++s) {
        const PatchGridSpec spec = stage_spec(stages[s]);
        const std::vector<PatchFootprint> patches = patch_grid(spec);

        std::vector<char> open;
        if (s > 0) {
            open.resize(static_cast<std::size_t>(n_cells));
            for (Eigen::Index i = 0; i < n_cells; ++i) {
                open[static_cast<std::size_t>(i)] = cell_open(acc[static_cast<std::size_t>(i)]);
            }
        }

        RefineStageStats stage_stats;
        stage_stats.sw = spec.sw;
        stage_stats.patches_total = static_cast<Eigen::Index>(patches.size());

        for (const PatchFootprint& patch : patches) {
            Eigen::Index cx0, cx1, cy0, cy1;
            covered_range(patch.min_x, patch.sw, fine.origin_x, nfx, &cx0, &cx1);
            covered_range(patch.min_y, patch.sw, fine.origin_y, nfy, &cy0, &cy1);

            bool run = (s == 0);
            if (!run) {
                for (Eigen::Index iy = cy0; iy <= cy1 && !run; ++iy) {
                    for (Eigen::Index ix = cx0; ix <= cx1; ++ix) {
                        if (open[static_cast<std::size_t>(iy * nfx + ix)]) {
                            run = true;
                            break;
                        }
                    }
                }
            }
            if (!run) {
                continue;
            }

            const PatchPrediction pred = stages[s].classifier->classify(patch);
            const Contribution contrib{static_cast<int>(s) + 1, pred.label,
                                       confidence_from_pmax(pred.p_max)};
            ++stage_stats.patches_run;
            for (Eigen::Index iy = cy0; iy <= cy1; ++iy) {
                for (Eigen::Index ix = cx0; ix <= cx1; ++ix) {
                    acc[static_cast<std::size_t>(iy * nfx + ix)].push_back(contrib);
                }
            }
        }

        stage_stats.area_run_m2 =
            static_cast<double>(stage_stats.patches_run) * spec.sw * spec.sw;
        if (stats != nullptr) {
            stats->stages.push_back(stage_stats);
        }
    }

    PredictionGrid out(fine);
    for (Eigen::Index i = 0; i < n_cells; ++i) {
        const std::vector<Contribution>& contributions = acc[static_cast<std::size_t>(i)];
        PredictionCell& cell = out.cell(i);
        if (contributions.empty()) {
            continue;
        }
        cell.label = weighted_vote(contributions).label();
        double sum = 0.0;
        int last_stage = 0;
        for (const Contribution& c : contributions) {
            sum += c.confidence;
            last_stage = std::max(last_stage, c.stage);
        }
        cell.confidence = sum / static_cast<double>(contributions.size());
        cell.stage = last_stage;
    }
    return out;
}

namespace {

struct CornerDir {
    Eigen::Index x, y;  // corner lattice coordinates
    int dir;            // 0 = +x, 1 = +y, 2 = -x, 3 = -y
};

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

}  // namespace

std::vector<GeoPolygon> mask_to_polygons(const PredictionGrid& grid) {
    const Eigen::Index nx = grid.cols();
    const Eigen::Index ny = grid.rows();
    const double s = grid.spec().stride;
    const double ox = grid.spec().origin_x;
    const double oy = grid.spec().origin_y;

    auto landable = [&](Eigen::Index ix, Eigen::Index iy) {
        return ix >= 0 && ix < nx && iy >= 0 && iy < ny && grid.cell(iy * nx + ix).label == 1;
    };

    // 4-connected component labels.
    std::vector<int> comp(static_cast<std::size_t>(std::max<Eigen::Index>(0, nx * ny)), -1);
    int n_comp = 0;
    for (Eigen::Index iy = 0; iy < ny; ++iy) {
        for (Eigen::Index ix = 0; ix < nx; ++ix) {
            if (!landable(ix, iy) || comp[static_cast<std::size_t>(iy * nx + ix)] >= 0) {
                continue;
            }
            std::deque<std::pair<Eigen::Index, Eigen::Index>> frontier{{ix, iy}};
            comp[static_cast<std::size_t>(iy * nx + ix)] = n_comp;
            while (!frontier.empty()) {
                const auto [cx, cy] = frontier.front();
                frontier.pop_front();
                for (int d = 0; d < 4; ++d) {
                    const Eigen::Index mx = cx + kDx[d];
                    const Eigen::Index my = cy + kDy[d];
                    if (landable(mx, my) && comp[static_cast<std::size_t>(my * nx + mx)] < 0) {
                        comp[static_cast<std::size_t>(my * nx + mx)] = n_comp;
                        frontier.push_back({mx, my});
                    }
                }
            }
            ++n_comp;
        }
    }

    std::vector<Ring> exteriors(static_cast<std::size_t>(n_comp));
    std::vector<std::vector<Ring>> holes(static_cast<std::size_t>(n_comp));

    for (int target = 0; target < n_comp; ++target) {
        // Directed boundary edges with the component interior on the left;
        // exterior loops come out counter-clockwise, holes clockwise.
        std::map<std::pair<Eigen::Index, Eigen::Index>, std::vector<CornerDir>> outgoing;
        auto in_comp = [&](Eigen::Index ix, Eigen::Index iy) {
            return ix >= 0 && ix < nx && iy >= 0 && iy < ny &&
                   comp[static_cast<std::size_t>(iy * nx + ix)] == target;
        };
        for (Eigen::Index iy = 0; iy < ny; ++iy) {
            for (Eigen::Index ix = 0; ix < nx; ++ix) {
                if (!in_comp(ix, iy)) {
                    continue;
                }
                if (!in_comp(ix, iy - 1)) {
                    outgoing[{ix, iy}].push_back({ix, iy, 0});
                }
                if (!in_comp(ix + 1, iy)) {
                    outgoing[{ix + 1, iy}].push_back({ix + 1, iy, 1});
                }
                if (!in_comp(ix, iy + 1)) {
                    outgoing[{ix + 1, iy + 1}].push_back({ix + 1, iy + 1, 2});
                }
                if (!in_comp(ix - 1, iy)) {
                    outgoing[{ix, iy + 1}].push_back({ix, iy + 1, 3});
                }
            }
        }

        while (!outgoing.empty()) {
            auto start_it = outgoing.begin();
            CornerDir edge = start_it->second.back();
            start_it->second.pop_back();
            if (start_it->second.empty()) {
                outgoing.erase(start_it);
            }
            std::vector<std::pair<Eigen::Index, Eigen::Index>> corners{{edge.x, edge.y}};
            const std::pair<Eigen::Index, Eigen::Index> start{edge.x, edge.y};
            for (;;) {
                const std::pair<Eigen::Index, Eigen::Index> next{edge.x + kDx[edge.dir],
                                                                 edge.y + kDy[edge.dir]};
                if (next == start) {
                    break;
                }
                corners.push_back(next);
                auto it = outgoing.find(next);
                if (it == outgoing.end()) {
                    throw std::logic_error("mask tracing: open boundary loop");
                }
                // At a pinch corner prefer the sharpest left turn, which
                // keeps diagonal cells disconnected (4-connectivity).
                int pick = -1;
                for (int turn : {1, 0, 3}) {  // left, straight, right
                    const int want = (edge.dir + turn) % 4;
                    for (std::size_t k = 0; k < it->second.size(); ++k) {
                        if (it->second[k].dir == want) {
                            pick = static_cast<int>(k);
                            break;
                        }
                    }
                    if (pick >= 0) {
                        break;
                    }
                }
                if (pick < 0) {
                    throw std::logic_error("mask tracing: no continuation edge");
                }
                edge = it->second[static_cast<std::size_t>(pick)];
                it->second.erase(it->second.begin() + pick);
                if (it->second.empty()) {
                    outgoing.erase(it);
                }
            }

            // Drop collinear intermediate corners, then close the ring.
            Ring ring;
            const std::size_t m = corners.size();
            for (std::size_t i = 0; i < m; ++i) {
                const auto& prev = corners[(i + m - 1) % m];
                const auto& cur = corners[i];
                const auto& nxt = corners[(i + 1) % m];
                const bool collinear = (prev.first == cur.first && cur.first == nxt.first) ||
                                       (prev.second == cur.second && cur.second == nxt.second);
                if (!collinear) {
                    ring.emplace_back(ox + static_cast<double>(cur.first) * s,
                                      oy + static_cast<double>(cur.second) * s);
                }
            }
            ring.push_back(ring.front());

            if (ring_signed_area(ring) > 0.0) {
                exteriors[static_cast<std::size_t>(target)] = std::move(ring);
            } else {
                holes[static_cast<std::size_t>(target)].push_back(std::move(ring));
            }
        }
    }

    std::vector<GeoPolygon> polygons;
    polygons.reserve(static_cast<std::size_t>(n_comp));
    for (int i = 0; i < n_comp; ++i) {
        polygons.emplace_back(std::move(exteriors[static_cast<std::size_t>(i)]),
                              std::move(holes[static_cast<std::size_t>(i)]));
    }
    return polygons;
}

}  // namespace elfkit
