#pragma once

#include <map>
#include <optional>
#include <vector>

#include "proxkit/corpus.hpp"
#include "proxkit/entnorm.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// Sparse entity-frequency vector for one (year, sector) cell.
struct StratumBow {
  Stratum stratum;
  std::map<int, int> freqs;  // entity_id -> count; zero entries omitted
  double sumsq = 0.0;        // exact integer sum of squared counts
  double norm = 0.0;         // sqrt(sumsq)
};

struct SimilarityMatrix {
  std::vector<int> row_years;
  std::vector<int> col_years;
  Sector row_side = Sector::Industry;
  Sector col_side = Sector::Academic;
  std::optional<EntityClass> class_filter;
  std::vector<std::vector<double>> values;  // [row][col]
};

struct YearRange {
  int first = 0;
  int last = 0;  // inclusive

  std::vector<int> years() const;
};

/// Frequency of each entity over the stratum's papers (papers whose type
/// matches the side; Cooperation and Excluded papers contribute to neither
/// side). per_paper_dedup counts each entity at most once per paper.
StratumBow build_bow(const Corpus& corpus, const NormalizedEntities& entities, Stratum stratum,
                     std::optional<EntityClass> class_filter = std::nullopt,
                     bool per_paper_dedup = false);

/// Cosine over the union vocabulary; 0 when either norm is 0.
double cosine_bow(const StratumBow& u, const StratumBow& v);

SimilarityMatrix similarity_matrix(const Corpus& corpus, const NormalizedEntities& entities,
                                   YearRange row_years, Sector row_side, YearRange col_years,
                                   Sector col_side,
                                   std::optional<EntityClass> class_filter = std::nullopt,
                                   bool per_paper_dedup = false);

/// Per-year share of Cooperation papers among classified papers. Years with
/// no classified papers are absent and reported.
std::map<int, double> collaboration_share(const Corpus& corpus,
                                          std::vector<int>* empty_years = nullptr);

}  // namespace proxkit
