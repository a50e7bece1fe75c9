#include "elfkit/io/prediction_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elfkit::io {

namespace {

constexpr char kHeader[] = "index\tmin_x\tmin_y\tsw\tlabel\tp_max";

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_prediction_file(const std::string& path,
                           const std::vector<PredictionRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write prediction file " + path);
    }
    out << kHeader << '\n';
    for (const PredictionRecord& r : records) {
        out << r.index << '\t' << format_g17(r.min_x) << '\t' << format_g17(r.min_y) << '\t'
            << format_g17(r.sw) << '\t' << r.label << '\t' << format_g17(r.p_max) << '\n';
    }
    if (!out) {
        throw std::runtime_error("short write on prediction file " + path);
    }
}

std::vector<PredictionRecord> read_prediction_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open prediction file " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("prediction file " + path + ": bad header");
    }
    std::vector<PredictionRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        PredictionRecord r;
        if (!(row >> r.index >> r.min_x >> r.min_y >> r.sw >> r.label >> r.p_max)) {
            throw std::runtime_error("prediction file " + path + ": bad record at line " +
                                     std::to_string(line_no));
        }
        if (r.label != 0 && r.label != 1) {
            throw std::runtime_error("prediction file " + path + ": label must be 0 or 1 at line " +
                                     std::to_string(line_no));
        }
        records.push_back(r);
    }
    return records;
}

std::vector<PredictionRecord> prediction_records(const PredictionGrid& grid) {
    std::vector<PredictionRecord> records;
    records.reserve(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const PredictionCell& cell = grid.cell(i);
        PredictionRecord r;
        r.index = i;
        const Vec2 min = grid.cell_min(i);
        r.min_x = min.x();
        r.min_y = min.y();
        r.sw = grid.spec().sw;
        r.label = cell.label;
        r.p_max = 0.5 + 0.5 * cell.confidence;
        records.push_back(r);
    }
    return records;
}

}  // namespace elfkit::io
