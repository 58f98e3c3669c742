#include "proxkit/manifest.hpp"

#include <nlohmann/json.hpp>

#include "proxkit/util.hpp"

namespace proxkit {

using nlohmann::json;

void RunManifest::add_output(const std::string& step, const std::filesystem::path& out_dir,
                             const std::filesystem::path& file) {
  outputs.push_back(
      {step, std::filesystem::relative(file, out_dir).generic_string(), hex64(fnv1a64_file(file))});
}

void RunManifest::add_input(const std::string& step, const std::filesystem::path& file) {
  inputs.push_back({step, file.generic_string(), hex64(fnv1a64_file(file))});
}

void RunManifest::write(const std::filesystem::path& path) const {
  json doc;
  doc["version"] = version;
  doc["config_digest"] = config_digest;
  auto dump_entries = [](const std::vector<ManifestEntry>& entries) {
    json arr = json::array();
    for (const auto& e : entries) {
      arr.push_back({{"step", e.step}, {"path", e.path}, {"digest", e.digest}});
    }
    return arr;
  };
  doc["inputs"] = dump_entries(inputs);
  doc["outputs"] = dump_entries(outputs);
  doc["timings_seconds"] = timings_seconds;
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace proxkit
