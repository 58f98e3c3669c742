#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxkit/config.hpp"
#include "proxkit/corpus.hpp"
#include "proxkit/entnorm.hpp"
#include "proxkit/manifest.hpp"

namespace proxkit {

inline const std::vector<std::string> kPipelineSteps = {
    "validate", "normalize", "entity-sim", "semantic-sim", "network",
    "cite-flow", "regress",   "stability",  "psm"};

/// Per-invocation overrides carried from CLI flags.
struct StepOptions {
  std::optional<std::string> entity_class;  // entity-sim: emit only this class
  std::optional<std::string> period;        // regress: only this period
  std::optional<int> psm_ratio;             // psm: only this ratio
};

/// Shared state across the steps of one invocation. Corpus and normalization
/// are computed lazily and reused; each step remains runnable on its own.
class Pipeline {
 public:
  Pipeline(RunConfig config, StepOptions options = {});

  /// Runs one named step (or "all") and writes manifest.json.
  void run(const std::string& step);

  const RunManifest& manifest() const { return manifest_; }
  const LoadReport& load_report() const { return load_report_; }

 private:
  const Corpus& corpus();
  const NormalizedEntities& normalized();

  void step_validate();
  void step_normalize();
  void step_entity_sim();
  void step_semantic_sim();
  void step_network();
  void step_cite_flow();
  void step_regress();
  void step_stability();
  void step_psm();

  void dispatch(const std::string& step);
  void emit(const std::string& step, const std::filesystem::path& file);

  RunConfig config_;
  StepOptions options_;
  RunManifest manifest_;
  std::optional<Corpus> corpus_;
  std::optional<NormalizedEntities> normalized_;
  LoadReport load_report_;
};

}  // namespace proxkit
