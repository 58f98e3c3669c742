#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxkit/corpus.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// A focal paper's q-quantile similarity to the opposing side of target_year.
struct PaperSimScore {
  std::string paper_id;
  Stratum focal_stratum;
  int target_year = 0;
  double score = 0.0;
};

struct ProportionMatrix {
  Sector focal_side = Sector::Industry;
  double threshold = 0.0;
  double q = 0.9;
  std::vector<int> focal_years;
  std::vector<int> target_years;
  std::vector<std::vector<std::optional<double>>> values;  // missing, not 0, for empty strata
  std::vector<std::vector<int>> denominators;              // embedded focal papers
};

struct TopPair {
  std::string focal_id;
  std::string match_id;
  double similarity = 0.0;
  int match_year = 0;
};

/// Standard cosine, clamped to [-1,1]. Throws on dimension mismatch or a
/// zero vector.
double cosine_embedding(std::span<const float> a, std::span<const float> b);

/// q-quantile of the focal vector's similarities to the opposing vectors.
/// Throws when opposing is empty.
double paper_score(std::span<const float> focal,
                   const std::vector<std::span<const float>>& opposing, double q);

/// Paper slots of embedded pure-side papers, grouped per year (sorted).
std::map<int, std::vector<std::size_t>> embedded_slots_by_year(const Corpus& corpus, Sector side);

/// q-quantile of all academic x industry pairwise similarities. Throws when
/// no cross pair exists.
double global_threshold(const Corpus& corpus, double q, bool same_year_only = false);

ProportionMatrix proportion_matrix(const Corpus& corpus, Sector focal_side, double threshold,
                                   double q, int year_min, int year_max, int workers = 1);

/// Per focal paper of (focal_year, focal_side): its single best opposing-side
/// match published in years <= max_target_year; the k highest-similarity rows.
std::vector<TopPair> top_pairs_export(const Corpus& corpus, int focal_year, Sector focal_side,
                                      std::size_t k, int max_target_year);

/// SemSim per paper against same-year opponents (skipped papers counted).
std::map<std::string, double> same_year_scores(const Corpus& corpus, Sector focal_side, double q,
                                               std::size_t* skipped = nullptr);

}  // namespace proxkit
