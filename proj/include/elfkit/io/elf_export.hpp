#pragma once

#include <string>
#include <vector>

#include "elfkit/elf_search.hpp"

namespace elfkit::io {

/// GeoJSON FeatureCollection: one Polygon feature per record with every
/// scalar field as a property. Deterministic: fixed 6-decimal floats,
/// records written in the given order.
void write_elf_geojson(const std::string& path, const std::vector<ElfRecord>& records);

/// CSV with a WKT geometry column.
void write_elf_csv(const std::string& path, const std::vector<ElfRecord>& records);

/// Plain INSERT statements for external relational stores.
void write_elf_sql(const std::string& path, const std::vector<ElfRecord>& records,
                   const std::string& table = "elf");

/// Deterministic export order: by anchor y, x, then rotation and length.
void sort_records(std::vector<ElfRecord>& records);

}  // namespace elfkit::io
