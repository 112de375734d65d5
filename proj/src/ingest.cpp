#include "pogit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pogit/csv.hpp"
#include "pogit/errors.hpp"

namespace pogit {

namespace {

std::string require_field(const CsvTable& table, std::size_t row, int col,
                          const std::string& path) {
  const std::string& field = table.rows[row][static_cast<std::size_t>(col)];
  if (field.empty()) {
    throw DataError(path + ":" + std::to_string(row + 2) +
                    ": missing required field '" +
                    table.header[static_cast<std::size_t>(col)] + "'");
  }
  return field;
}

}  // namespace

RawData ingest_dataset(const std::string& data_path,
                       const std::string& adjacency_path,
                       const ColumnMapping& mapping, IngestReport* report) {
  CsvTable table = read_csv(data_path);
  const int n = static_cast<int>(table.rows.size());
  if (n == 0) throw DataError(data_path + ": no data rows");

  int region_col = table.col(mapping.region);
  int count_col = table.col(mapping.count);
  int time_col = mapping.time.empty() ? -1 : table.col(mapping.time);
  int group_col = mapping.group.empty() ? -1 : table.col(mapping.group);
  int pop_col = mapping.population.empty() ? -1 : table.col(mapping.population);
  int complete_col = mapping.complete.empty() ? -1 : table.col(mapping.complete);

  std::vector<std::string> covariate_names = mapping.covariates;
  if (covariate_names.empty()) {
    std::set<std::string> claimed = {mapping.region, mapping.count};
    for (const auto& opt :
         {mapping.time, mapping.group, mapping.population, mapping.complete}) {
      if (!opt.empty()) claimed.insert(opt);
    }
    for (const auto& name : table.header) {
      if (!claimed.count(name)) covariate_names.push_back(name);
    }
  }

  RawData raw;
  raw.z.resize(n);
  raw.units.region.resize(n);
  raw.units.time.assign(n, 0);
  raw.units.group.assign(n, 0);
  raw.offset = Eigen::VectorXd::Zero(n);
  raw.complete.assign(n, 0);
  for (const auto& name : covariate_names)
    raw.covariates[name] = Eigen::VectorXd::Zero(n);

  std::vector<long long> file_region(n);
  std::map<long long, int> region_index;
  for (int i = 0; i < n; ++i) {
    const int line = i + 2;
    file_region[i] =
        parse_int(require_field(table, i, region_col, data_path), data_path, line);
    region_index.emplace(file_region[i], 0);
    raw.z[i] = static_cast<int>(
        parse_int(require_field(table, i, count_col, data_path), data_path, line));
    if (raw.z[i] < 0)
      throw DataError(data_path + ":" + std::to_string(line) +
                      ": negative count");
    if (time_col >= 0) {
      raw.units.time[i] = static_cast<int>(parse_int(
          require_field(table, i, time_col, data_path), data_path, line));
    }
    if (group_col >= 0) {
      raw.units.group[i] = static_cast<int>(parse_int(
          require_field(table, i, group_col, data_path), data_path, line));
    }
    if (pop_col >= 0) {
      double pop = parse_double(require_field(table, i, pop_col, data_path),
                                data_path, line);
      if (!(pop > 0.0))
        throw DataError(data_path + ":" + std::to_string(line) +
                        ": population must be positive");
      raw.offset[i] = std::log(pop);
    }
    if (complete_col >= 0) {
      long long c = parse_int(require_field(table, i, complete_col, data_path),
                              data_path, line);
      if (c != 0 && c != 1)
        throw DataError(data_path + ":" + std::to_string(line) +
                        ": completeness flag must be 0 or 1");
      raw.complete[i] = static_cast<std::uint8_t>(c);
    }
    for (const auto& name : covariate_names) {
      raw.covariates[name][i] = parse_double(
          require_field(table, i, table.col(name), data_path), data_path, line);
    }
  }

  // Dense region indices by ascending file id.
  int next = 0;
  for (auto& [id, idx] : region_index) idx = next++;
  raw.region_ids.resize(region_index.size());
  for (const auto& [id, idx] : region_index) raw.region_ids[idx] = id;
  for (int i = 0; i < n; ++i)
    raw.units.region[i] = region_index.at(file_region[i]);

  // Adjacency: "region_id neighbor_id" per line.
  std::ifstream adj(adjacency_path);
  if (!adj) throw DataError("cannot open: " + adjacency_path);
  std::vector<std::set<int>> nb(region_index.size());
  std::string line_text;
  int lineno = 0;
  std::vector<std::pair<int, int>> pairs;
  while (std::getline(adj, line_text)) {
    ++lineno;
    std::istringstream ss(line_text);
    long long a, b;
    if (!(ss >> a)) continue;  // blank line
    if (!(ss >> b)) {
      throw DataError(adjacency_path + ":" + std::to_string(lineno) +
                      ": expected two region ids");
    }
    auto ita = region_index.find(a);
    auto itb = region_index.find(b);
    if (ita == region_index.end() || itb == region_index.end()) {
      throw DataError(adjacency_path + ":" + std::to_string(lineno) +
                      ": unknown region id " +
                      std::to_string(ita == region_index.end() ? a : b));
    }
    if (ita->second == itb->second) {
      throw DataError(adjacency_path + ":" + std::to_string(lineno) +
                      ": self-loop at region " + std::to_string(a));
    }
    pairs.emplace_back(ita->second, itb->second);
    nb[ita->second].insert(itb->second);
  }
  int asymmetric = 0;
  for (const auto& [a, b] : pairs) {
    if (!nb[a].count(b) || !nb[b].count(a)) ++asymmetric;
    nb[b].insert(a);
    nb[a].insert(b);
  }
  if (asymmetric > 0 && report) {
    report->warnings.push_back(
        "adjacency: symmetrized " + std::to_string(asymmetric) +
        " one-directional pair(s)");
  }
  std::vector<std::vector<int>> neighbor_lists(nb.size());
  for (std::size_t s = 0; s < nb.size(); ++s)
    neighbor_lists[s].assign(nb[s].begin(), nb[s].end());
  raw.graph = AdjacencyGraph(std::move(neighbor_lists));
  return raw;
}

void export_dataset(const RawData& raw, const ColumnMapping& mapping,
                    const std::string& data_path,
                    const std::string& adjacency_path) {
  CsvTable table;
  table.header.push_back(mapping.region);
  if (!mapping.time.empty()) table.header.push_back(mapping.time);
  if (!mapping.group.empty()) table.header.push_back(mapping.group);
  table.header.push_back(mapping.count);
  if (!mapping.population.empty()) table.header.push_back(mapping.population);
  if (!mapping.complete.empty()) table.header.push_back(mapping.complete);
  std::vector<std::string> covariate_names;
  for (const auto& [name, col] : raw.covariates) covariate_names.push_back(name);
  for (const auto& name : covariate_names) table.header.push_back(name);

  std::vector<long long> ids = raw.region_ids;
  if (ids.empty()) {
    ids.resize(raw.graph.n_regions());
    for (std::size_t s = 0; s < ids.size(); ++s)
      ids[s] = static_cast<long long>(s);
  }
  for (int i = 0; i < raw.n_obs(); ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(ids[raw.units.region[i]]));
    if (!mapping.time.empty()) row.push_back(std::to_string(raw.units.time[i]));
    if (!mapping.group.empty())
      row.push_back(std::to_string(raw.units.group[i]));
    row.push_back(std::to_string(raw.z[i]));
    if (!mapping.population.empty())
      row.push_back(format_double(std::exp(raw.offset[i])));
    if (!mapping.complete.empty())
      row.push_back(std::to_string(static_cast<int>(raw.complete[i])));
    for (const auto& name : covariate_names)
      row.push_back(format_double(raw.covariates.at(name)[i]));
    table.rows.push_back(std::move(row));
  }
  write_csv(data_path, table);

  std::ofstream adj(adjacency_path);
  if (!adj) throw DataError("cannot open for writing: " + adjacency_path);
  for (int s = 0; s < raw.graph.n_regions(); ++s) {
    for (int t : raw.graph.neighbors(s)) {
      if (t > s) adj << ids[s] << ' ' << ids[t] << '\n';
    }
  }
}

}  // namespace pogit
