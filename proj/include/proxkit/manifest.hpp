#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace proxkit {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ManifestEntry {
  std::string step;
  std::string path;  // relative to the output directory
  std::string digest;
};

struct RunManifest {
  std::string version = kToolkitVersion;
  std::string config_digest;
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;
  std::map<std::string, double> timings_seconds;

  void add_output(const std::string& step, const std::filesystem::path& out_dir,
                  const std::filesystem::path& file);
  void add_input(const std::string& step, const std::filesystem::path& file);
  void write(const std::filesystem::path& path) const;
};

}  // namespace proxkit
