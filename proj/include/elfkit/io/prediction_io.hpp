#pragma once

#include <string>
#include <vector>

#include "elfkit/segmentation.hpp"

namespace elfkit::io {

/// One row of the prediction-grid exchange file.
struct PredictionRecord {
    long long index = 0;
    double min_x = 0.0;
    double min_y = 0.0;
    double sw = 0.0;
    int label = 0;
    double p_max = 1.0;
};

/// Tab-separated with the fixed header
/// "index\tmin_x\tmin_y\tsw\tlabel\tp_max". Doubles are written with 17
/// significant digits so a round trip is bit-exact.
void write_prediction_file(const std::string& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_prediction_file(const std::string& path);

/// Rows for every patch of a classified lattice (p_max reconstructed from
/// the stored confidence).
std::vector<PredictionRecord> prediction_records(const PredictionGrid& grid);

}  // namespace elfkit::io
