#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pogit/csv.hpp"
#include "pogit/digest.hpp"
#include "pogit/errors.hpp"
#include "pogit/ingest.hpp"
#include "pogit/manifest.hpp"
#include "pogit/simulation.hpp"

using namespace pogit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "pogit_io_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("toy file round-trips through ingest and export") {
  TempDir dir;
  write_file(dir.file("data.csv"),
             "region,year,z,population,complete,x\n"
             "10,2012,5,1000,0,0.25\n"
             "20,2012,0,2000,1,-0.5\n"
             "30,2012,12,1500,0,1.75\n");
  write_file(dir.file("adj.txt"), "10 20\n20 30\n");

  ColumnMapping mapping;
  mapping.region = "region";
  mapping.time = "year";
  mapping.count = "z";
  mapping.population = "population";
  mapping.complete = "complete";

  RawData a = ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), mapping);
  REQUIRE(a.n_obs() == 3);
  CHECK(a.z[2] == 12);
  CHECK(a.complete[1] == 1);
  CHECK(a.covariates.at("x")[0] == 0.25);
  CHECK(a.graph.n_regions() == 3);
  CHECK(a.graph.n_edges() == 2);
  CHECK(a.region_ids == std::vector<long long>{10, 20, 30});

  export_dataset(a, mapping, dir.file("data2.csv"), dir.file("adj2.txt"));
  RawData b = ingest_dataset(dir.file("data2.csv"), dir.file("adj2.txt"), mapping);
  CHECK(b.z == a.z);
  CHECK(b.units.region == a.units.region);
  CHECK(b.units.time == a.units.time);
  CHECK(b.complete == a.complete);
  CHECK((b.offset - a.offset).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.covariates.at("x") - a.covariates.at("x")).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(b.graph.n_edges() == a.graph.n_edges());
}

TEST_CASE("TB schema file: 557 regions x 3 years gives 1671 observations") {
  TempDir dir;
  TbSchemaConfig cfg;
  cfg.seed = 4;
  SimulatedData sim = simulate_tb_schema(cfg);

  ColumnMapping mapping;
  mapping.time = "year";
  mapping.population = "population";
  export_dataset(sim.observed, mapping, dir.file("tb.csv"), dir.file("tb_adj.txt"));
  RawData raw = ingest_dataset(dir.file("tb.csv"), dir.file("tb_adj.txt"), mapping);
  CHECK(raw.n_obs() == 1671);
  CHECK(raw.graph.n_regions() == 557);
  CHECK(raw.covariates.count("timeliness") == 1);
  CHECK(raw.covariates.count("unemployment") == 1);
}

TEST_CASE("isolated region is accepted as its own component") {
  TempDir dir;
  write_file(dir.file("data.csv"),
             "region,z\n1,3\n2,4\n3,0\n");
  write_file(dir.file("adj.txt"), "1 2\n");
  RawData raw = ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {});
  CHECK(raw.graph.n_regions() == 3);
  CHECK(raw.graph.n_components() == 2);  // {1,2} and {3}
  CHECK(raw.graph.neighbors(2).empty());
}

TEST_CASE("one-directional adjacency is symmetrized with a warning") {
  TempDir dir;
  write_file(dir.file("data.csv"), "region,z\n1,1\n2,2\n");
  // Both directions listed for a symmetric file would be "1 2" and "2 1";
  // a single line is one-directional.
  write_file(dir.file("adj.txt"), "1 2\n");
  IngestReport report;
  RawData raw = ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {},
                               &report);
  CHECK(raw.graph.n_edges() == 1);
  CHECK(!raw.graph.neighbors(0).empty());
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("symmetrized") != std::string::npos);
}

TEST_CASE("ingest errors carry line numbers") {
  TempDir dir;
  SUBCASE("unknown region in adjacency") {
    write_file(dir.file("data.csv"), "region,z\n1,1\n");
    write_file(dir.file("adj.txt"), "1 9\n");
    CHECK_THROWS_WITH_AS(
        ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {}),
        doctest::Contains("unknown region"), DataError);
  }
  SUBCASE("non-integer count") {
    write_file(dir.file("data.csv"), "region,z\n1,1\n2,2.5\n");
    write_file(dir.file("adj.txt"), "1 2\n");
    CHECK_THROWS_WITH_AS(
        ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {}),
        doctest::Contains(":3:"), DataError);
  }
  SUBCASE("missing required field") {
    write_file(dir.file("data.csv"), "region,z,x\n1,1,0.5\n2,,0.25\n");
    write_file(dir.file("adj.txt"), "1 2\n");
    CHECK_THROWS_WITH_AS(
        ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {}),
        doctest::Contains(":3:"), DataError);
  }
  SUBCASE("negative count") {
    write_file(dir.file("data.csv"), "region,z\n1,-4\n");
    write_file(dir.file("adj.txt"), "");
    CHECK_THROWS_AS(ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {}),
                    DataError);
  }
  SUBCASE("ragged row") {
    write_file(dir.file("data.csv"), "region,z\n1,2,9\n");
    write_file(dir.file("adj.txt"), "");
    CHECK_THROWS_WITH_AS(
        ingest_dataset(dir.file("data.csv"), dir.file("adj.txt"), {}),
        doctest::Contains(":2:"), DataError);
  }
}

TEST_CASE("csv doubles survive a write/read round trip losslessly") {
  TempDir dir;
  CsvTable table;
  table.header = {"v"};
  std::vector<double> values = {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23,
                                3.141592653589793};
  for (double v : values) table.rows.push_back({format_double(v)});
  write_csv(dir.file("t.csv"), table);
  CsvTable back = read_csv(dir.file("t.csv"));
  for (std::size_t r = 0; r < values.size(); ++r) {
    CHECK(parse_double(back.rows[r][0], "t.csv", static_cast<int>(r) + 2) ==
          values[r]);
  }
}

TEST_CASE("manifest records digests that match the files") {
  TempDir dir;
  write_file(dir.file("input.txt"), "hello\n");
  RunManifest manifest;
  manifest.command = "fit";
  manifest.seed = 42;
  manifest.input_digests[dir.file("input.txt")] = file_digest(dir.file("input.txt"));
  manifest.outputs = {dir.file("out.csv")};
  manifest.write(dir.path.string());

  std::ifstream in(dir.file("manifest.json"));
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find(file_digest(dir.file("input.txt"))) != std::string::npos);
  CHECK(text.find("\"seed\": 42") != std::string::npos);
}
