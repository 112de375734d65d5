#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pogit {

inline constexpr const char* kVersion = "0.1.0";

// Provenance record written once per command into the output directory.
struct RunManifest {
  std::string command;
  nlohmann::json config;  // snapshot of the parsed configuration
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  double wall_clock_seconds = 0.0;

  void write(const std::string& out_dir) const;  // out_dir/manifest.json
};

}  // namespace pogit
