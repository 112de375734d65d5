#pragma once

#include <string>
#include <vector>

#include "pogit/data.hpp"

namespace pogit {

// Column mapping from a delimited data file onto the dataset fields.
// Optional columns are skipped when the name is empty. Covariates lists
// the columns to load as model covariates; when empty, every column not
// otherwise claimed is loaded.
struct ColumnMapping {
  std::string region = "region";
  std::string count = "z";
  std::string time;
  std::string group;
  std::string population;  // offset = log(population)
  std::string complete;
  std::vector<std::string> covariates;
};

struct IngestReport {
  std::vector<std::string> warnings;
};

// Reads a comma-separated data file (header row) and an adjacency file of
// "region_id neighbor_id" pairs. Region ids are remapped to a dense
// 0-based index by ascending file id. One-directional adjacency pairs are
// symmetrized with a warning; adjacency lines naming unknown regions are
// an error, as are missing required fields or non-integer counts (both
// reported with their line numbers).
RawData ingest_dataset(const std::string& data_path,
                       const std::string& adjacency_path,
                       const ColumnMapping& mapping,
                       IngestReport* report = nullptr);

// Writes the dataset back out with the same column layout, for round-trips
// and for persisting simulated data.
void export_dataset(const RawData& raw, const ColumnMapping& mapping,
                    const std::string& data_path,
                    const std::string& adjacency_path);

}  // namespace pogit
