#include "proxkit/entsim.hpp"

#include <cmath>
#include <set>

namespace proxkit {

std::vector<int> YearRange::years() const {
  std::vector<int> out;
  for (int y = first; y <= last; ++y) out.push_back(y);
  return out;
}

namespace {

PaperType side_paper_type(Sector side) {
  switch (side) {
    case Sector::Academic: return PaperType::Academic;
    case Sector::Industry: return PaperType::Industry;
    default: throw ValidationError("stratum side must be academic or industry");
  }
}

}  // namespace

StratumBow build_bow(const Corpus& corpus, const NormalizedEntities& entities, Stratum stratum,
                     std::optional<EntityClass> class_filter, bool per_paper_dedup) {
  const PaperType wanted = side_paper_type(stratum.side);

  StratumBow bow;
  bow.stratum = stratum;
  std::set<std::pair<std::string, int>> seen;  // (paper, entity) pairs when deduping
  for (const auto& m : entities.mentions) {
    if (m.year != stratum.year) continue;
    if (class_filter && m.cls != *class_filter) continue;
    const PaperRecord* paper = corpus.find(m.paper_id);
    if (paper == nullptr || paper->type != wanted) continue;
    if (per_paper_dedup && !seen.emplace(m.paper_id, m.entity_id).second) continue;
    bow.freqs[m.entity_id] += 1;
  }
  for (const auto& [id, count] : bow.freqs) {
    bow.sumsq += static_cast<double>(count) * static_cast<double>(count);
  }
  bow.norm = std::sqrt(bow.sumsq);
  return bow;
}

double cosine_bow(const StratumBow& u, const StratumBow& v) {
  if (u.sumsq == 0.0 || v.sumsq == 0.0) return 0.0;
  // sparse intersection; entities absent from either side contribute zero
  double dot = 0.0;
  auto iu = u.freqs.begin();
  auto iv = v.freqs.begin();
  while (iu != u.freqs.end() && iv != v.freqs.end()) {
    if (iu->first < iv->first) ++iu;
    else if (iv->first < iu->first) ++iv;
    else {
      dot += static_cast<double>(iu->second) * static_cast<double>(iv->second);
      ++iu;
      ++iv;
    }
  }
  // counts are integers, so sumsq products are exact; one sqrt keeps cells
  // like 4/sqrt(25) exact
  return dot / std::sqrt(u.sumsq * v.sumsq);
}

SimilarityMatrix similarity_matrix(const Corpus& corpus, const NormalizedEntities& entities,
                                   YearRange row_years, Sector row_side, YearRange col_years,
                                   Sector col_side, std::optional<EntityClass> class_filter,
                                   bool per_paper_dedup) {
  SimilarityMatrix m;
  m.row_years = row_years.years();
  m.col_years = col_years.years();
  m.row_side = row_side;
  m.col_side = col_side;
  m.class_filter = class_filter;

  std::vector<StratumBow> rows;
  rows.reserve(m.row_years.size());
  for (int y : m.row_years) {
    rows.push_back(build_bow(corpus, entities, {y, row_side}, class_filter, per_paper_dedup));
  }
  std::vector<StratumBow> cols;
  cols.reserve(m.col_years.size());
  for (int y : m.col_years) {
    cols.push_back(build_bow(corpus, entities, {y, col_side}, class_filter, per_paper_dedup));
  }

  m.values.assign(rows.size(), std::vector<double>(cols.size(), 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m.values[i][j] = cosine_bow(rows[i], cols[j]);
    }
  }
  return m;
}

std::map<int, double> collaboration_share(const Corpus& corpus, std::vector<int>* empty_years) {
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // year -> (coop, classified)
  std::set<int> years_seen;
  for (const auto& p : corpus.papers) {
    years_seen.insert(p.year);
    if (p.type == PaperType::Excluded) continue;
    auto& [coop, classified] = tally[p.year];
    ++classified;
    if (p.type == PaperType::Cooperation) ++coop;
  }
  std::map<int, double> out;
  for (int y : years_seen) {
    auto it = tally.find(y);
    if (it == tally.end() || it->second.second == 0) {
      if (empty_years) empty_years->push_back(y);
      continue;
    }
    out[y] = static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
  }
  return out;
}

}  // namespace proxkit
