#pragma once

#include <cstddef>
#include <string>

#include "elfkit/io/keyvalue.hpp"
#include "elfkit/segmentation.hpp"

namespace elfkit {

struct PipelineResult {
    bool complete = false;  // false when a task budget stopped the run early
    std::size_t polygons = 0;
    std::size_t elfs_total = 0;
    std::size_t elfs_accepted = 0;
    RefineStats refine_stats;
};

/// Runs derive -> segment -> search -> export under one configuration.
/// Work is partitioned per landable polygon through a journaled job queue
/// in the output directory, with keyed per-polygon result files, so an
/// interrupted run resumes and converges to byte-identical outputs.
/// `max_tasks` > 0 caps the number of polygon tasks processed in this
/// invocation (batch operation); the run then reports complete = false.
PipelineResult run_pipeline(const io::KeyValueConfig& cfg, const std::string& out_dir,
                            int workers = 1, std::size_t max_tasks = 0);

}  // namespace elfkit
