#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxkit/citeflow.hpp"
#include "proxkit/corpus.hpp"
#include "proxkit/entnorm.hpp"
#include "proxkit/studies.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// Minimal TOML subset: [table] headers (dotted allowed), bare keys, string /
/// integer / float / boolean scalars and single-line arrays of them, comments.
struct TomlValue {
  std::variant<std::string, int64_t, double, bool, std::vector<TomlValue>> v;

  bool is_array() const { return std::holds_alternative<std::vector<TomlValue>>(v); }
};

class TomlTable {
 public:
  bool has(const std::string& dotted_key) const;
  std::string get_string(const std::string& key) const;
  int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;  // accepts integer literals
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_array(const std::string& key) const;
  std::vector<int64_t> get_int_array(const std::string& key) const;
  std::vector<std::string> get_string_array(const std::string& key) const;

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  int64_t get_int_or(const std::string& key, int64_t fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  /// Keys under "prefix." with the prefix stripped.
  std::vector<std::string> keys_under(const std::string& prefix) const;

  std::map<std::string, TomlValue> entries;  // dotted path -> value
};

TomlTable parse_toml(std::string_view text, const std::string& source_name);
TomlTable parse_toml_file(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path config_path;
  std::string config_text;

  // [paths]
  std::filesystem::path papers;
  std::filesystem::path entities;
  std::filesystem::path embeddings;
  std::filesystem::path citations;
  std::filesystem::path abbreviations;  // optional
  std::filesystem::path stoplist;       // optional
  std::filesystem::path output = "out";

  CorpusConfig corpus;

  // [normalize]
  double same_cluster_sim = 0.95;
  double merge_avg_sim = 0.8;
  int min_annual_freq = 5;

  // [entity]
  bool entity_dedup_per_paper = false;

  // [semantic]
  double semantic_q = 0.9;
  std::optional<double> semantic_threshold;  // absent: computed from the corpus
  bool same_year_only = false;

  // [network]
  bool network_weighted = true;
  uint64_t louvain_seed = 42;
  bool shared_partition = false;
  bool dump_graphs = false;

  // [citeflow]
  std::vector<std::string> hardware_terms = kDefaultHardwareTerms;
  EccBaseline ecc_baseline = EccBaseline::AllClassified;

  std::vector<Period> periods;  // defaults to the four technology phases

  StabilityConfig stability;
  PsmConfig psm;

  uint64_t master_seed = 42;
  int workers = 1;

  NormalizationConfig normalization_config() const;  // loads map/stoplist files
  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

std::vector<Period> default_periods(int year_min, int year_max);

}  // namespace proxkit
