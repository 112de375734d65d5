#include "pogit/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "pogit/errors.hpp"

namespace pogit {

void RunManifest::write(const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["input_digests"] = input_digests;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  j["wall_clock_seconds"] = wall_clock_seconds;
  std::string path = out_dir + "/manifest.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pogit
