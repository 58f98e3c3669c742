#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace proxkit {

/// Knobs for the synthetic corpus generator. The generated files use the
/// exact toolkit input formats; planted ground truth lands in truth.json.
struct FixtureSpec {
  int year_min = 2016;
  int year_max = 2020;
  int academic_per_year = 20;
  int industry_per_year = 12;
  int cooperation_per_year = 4;
  int excluded_per_year = 2;

  std::size_t vocab = 30;      // entity concepts, spread over the four classes
  int surface_variants = 2;    // spelling variants per concept
  int mentions_per_paper = 6;
  std::size_t embedding_dim = 8;

  int refs_min = 4;
  int refs_max = 12;
  double excluded_ref_rate = 0.1;
  // cited-type mix per citing type (academic, industry, cooperation rows)
  std::array<std::array<double, 3>, 3> cite_dist = {{{0.70, 0.15, 0.15},
                                                     {0.35, 0.50, 0.15},
                                                     {0.50, 0.30, 0.20}}};
  bool institution_blind = false;  // one shared cited-type mix for every citer

  // regression planting: academic papers get HHI-driven embeddings against
  // per-year single-vector industry anchors (anchors carry no references)
  bool plant_regression = false;
  double alpha = 0.7;
  double beta_hhi = -0.04;
  double beta_ln_inst = -0.003;
  double beta_ln_auth = -0.001;
  double beta_ln_ref = 0.003;
  double noise_sigma = 0.03;
  double year_effect_scale = 0.01;

  // confounded treatment planting for the PSM study: hardware terms are
  // injected with covariate-dependent probability and treated papers cite
  // academia less
  bool plant_confounding = false;
  double treated_academic_share = 0.35;
  double control_academic_share = 0.65;

  void validate() const;
};

struct FixturePaths {
  std::filesystem::path papers;
  std::filesystem::path entities;
  std::filesystem::path embeddings;
  std::filesystem::path citations;
  std::filesystem::path abbreviations;
  std::filesystem::path stoplist;
  std::filesystem::path config;  // ready-to-run TOML pointing at the files
  std::filesystem::path truth;   // ground-truth sidecar
};

FixturePaths gen_fixture(const FixtureSpec& spec, uint64_t seed,
                         const std::filesystem::path& out_dir);

/// Reads [fixture] keys from a TOML file into a spec (missing keys keep
/// defaults).
FixtureSpec fixture_spec_from_toml(const std::filesystem::path& path);

}  // namespace proxkit
