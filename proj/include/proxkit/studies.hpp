#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxkit/citeflow.hpp"
#include "proxkit/corpus.hpp"
#include "proxkit/entnorm.hpp"
#include "proxkit/stats.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

struct Period {
  std::string name;
  int first = 0;
  int last = 0;  // inclusive

  bool contains(int year) const { return year >= first && year <= last; }
};

/// One observation set for the semantic-similarity regression: pure Academic
/// and pure Industry papers with an embedding, at least one same-year
/// opposing-side embedded paper, and a defined citation HHI.
struct RegressionSample {
  std::vector<std::string> paper_ids;
  std::vector<double> sem_sim;
  std::vector<double> hhi;
  std::vector<double> ln_inst;
  std::vector<double> ln_auth;
  std::vector<double> ln_ref;
  std::vector<int> years;
  std::vector<PaperType> types;  // Academic or Industry

  std::size_t excluded_not_pure = 0;
  std::size_t excluded_no_embedding = 0;
  std::size_t excluded_no_opposing = 0;
  std::size_t excluded_no_hhi = 0;

  std::size_t size() const { return paper_ids.size(); }
};

RegressionSample build_regression_sample(const Corpus& corpus, double q = 0.9);

/// Intercept + HHI (+ log controls) + institution-type and year dummies.
/// Dummies cover observed levels only, with one reference level dropped per
/// family (the smallest unless overridden).
stats::DesignMatrix build_design(const RegressionSample& sample, bool with_controls,
                                 std::optional<int> reference_year = std::nullopt,
                                 std::optional<PaperType> reference_type = std::nullopt);

struct RegressionModel {
  std::string period_name;
  bool with_controls = false;
  stats::FitResult fit;
};

struct RegressionStudy {
  std::vector<RegressionModel> models;  // two per period, Table-6 style
  std::map<std::string, std::map<std::string, double>> vif_by_period;  // full-controls design
  RegressionSample sample;  // full-range sample the periods were cut from
};

/// The eight-model family: {HHI-only, full controls} x periods.
RegressionStudy run_regression(const Corpus& corpus, const std::vector<Period>& periods,
                               double q = 0.9);

enum class StabilityMetric { EntityAll, EntityMethod, CollabShare };

std::string_view to_string(StabilityMetric m);

struct StabilityConfig {
  std::vector<double> proportions{0.1, 0.3, 0.5, 0.7, 0.9};
  int repetitions = 10;
  uint64_t seed = 0;
  std::vector<StabilityMetric> metrics{StabilityMetric::EntityAll, StabilityMetric::EntityMethod,
                                       StabilityMetric::CollabShare};

  void validate() const;
};

struct StabilityCell {
  StabilityMetric metric;
  double proportion = 0.0;
  int year = 0;
  std::optional<double> cv;  // undefined when the metric mean is 0
};

struct StabilitySummary {
  StabilityMetric metric;
  double proportion = 0.0;
  std::optional<double> mean_cv;
};

struct StabilityComparison {
  StabilityMetric entity_metric;
  double proportion = 0.0;
  double u = 0.0;
  double p = 1.0;  // vs CollabShare CV sample over years
};

struct StabilityReport {
  std::vector<StabilityCell> cells;
  std::vector<StabilitySummary> summaries;
  std::vector<StabilityComparison> comparisons;
};

StabilityReport cv_stability(const Corpus& corpus, const NormalizedEntities& entities,
                             const StabilityConfig& config);

struct PsmConfig {
  std::vector<int> ratios{3, 5};
  std::vector<std::string> hardware_terms = kDefaultHardwareTerms;
  uint64_t seed = 0;  // recorded in outputs; matching itself is deterministic

  void validate() const;
};

inline constexpr std::array<const char*, 4> kPsmCovariates = {"n_institutions", "n_authors",
                                                              "n_references", "year"};

struct PsmUnit {
  std::string paper_id;
  bool treated = false;
  double propensity = 0.0;
  std::array<double, 4> covariates{};  // per kPsmCovariates
  double outcome = 0.0;                // academic-citation proportion
};

struct BalanceRow {
  std::string covariate;
  double smd_pre = 0.0;
  double smd_post = 0.0;
};

struct PsmMatch {
  std::string treated_id;
  std::vector<std::string> control_ids;
};

struct PsmRatioResult {
  int ratio = 0;
  std::vector<PsmMatch> matches;
  std::vector<BalanceRow> balance;
  stats::UTestResult outcome_test;  // treated vs matched controls
  double treated_mean_outcome = 0.0;
  double control_mean_outcome = 0.0;
  std::size_t short_matches = 0;  // treated units matched to fewer than `ratio` controls
};

struct PsmStudy {
  std::vector<PsmUnit> units;
  stats::FitResult propensity_fit;
  std::vector<PsmRatioResult> per_ratio;
};

PsmStudy psm_study(const Corpus& corpus, const PsmConfig& config);

/// Standardized mean difference (mean_T - mean_C) / sqrt((var_T + var_C)/2).
double standardized_mean_difference(const std::vector<double>& treated,
                                    const std::vector<double>& control);

}  // namespace proxkit
