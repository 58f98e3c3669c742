#include "proxkit/semsim.hpp"

#include <algorithm>
#include <cmath>

#include "proxkit/kernels.hpp"
#include "proxkit/parallel.hpp"
#include "proxkit/stats.hpp"

namespace proxkit {

namespace {

PaperType side_paper_type(Sector side) {
  switch (side) {
    case Sector::Academic: return PaperType::Academic;
    case Sector::Industry: return PaperType::Industry;
    default: throw ValidationError("focal side must be academic or industry");
  }
}

Sector opposing(Sector side) {
  return side == Sector::Academic ? Sector::Industry : Sector::Academic;
}

double cosine_precomputed(std::span<const float> a, double norm_a, std::span<const float> b,
                          double norm_b) {
  const double cos = kernels::dot(a.data(), b.data(), a.size()) / (norm_a * norm_b);
  return std::clamp(cos, -1.0, 1.0);
}

double norm_checked(const Corpus& corpus, std::size_t slot) {
  const auto v = corpus.embedding(slot);
  const double norm = std::sqrt(kernels::sumsq(v.data(), v.size()));
  if (norm == 0.0) {
    throw ValidationError("zero embedding vector for paper " + corpus.papers[slot].paper_id);
  }
  return norm;
}

std::vector<double> norms_for(const Corpus& corpus, const std::vector<std::size_t>& slots) {
  std::vector<double> norms(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) norms[i] = norm_checked(corpus, slots[i]);
  return norms;
}

}  // namespace

double cosine_embedding(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ValidationError("cosine_embedding: dimension mismatch");
  if (a.empty()) throw ValidationError("cosine_embedding: empty vectors");
  const double na = std::sqrt(kernels::sumsq(a.data(), a.size()));
  const double nb = std::sqrt(kernels::sumsq(b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_embedding: zero vector");
  const double cos = kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
  return std::clamp(cos, -1.0, 1.0);
}

double paper_score(std::span<const float> focal,
                   const std::vector<std::span<const float>>& opposing, double q) {
  if (opposing.empty()) throw ValidationError("paper_score: empty opposing set");
  std::vector<double> sims;
  sims.reserve(opposing.size());
  for (const auto& v : opposing) sims.push_back(cosine_embedding(focal, v));
  if (sims.size() == 1) return sims[0];
  return stats::quantile(std::move(sims), q);
}

std::map<int, std::vector<std::size_t>> embedded_slots_by_year(const Corpus& corpus, Sector side) {
  const PaperType wanted = side_paper_type(side);
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    const auto& p = corpus.papers[i];
    if (p.type == wanted && p.has_embedding) out[p.year].push_back(i);
  }
  return out;  // slots ascend within each year because papers are sorted by id
}

double global_threshold(const Corpus& corpus, double q, bool same_year_only) {
  const auto acad = embedded_slots_by_year(corpus, Sector::Academic);
  const auto indu = embedded_slots_by_year(corpus, Sector::Industry);

  std::vector<double> sims;
  for (const auto& [ya, aslots] : acad) {
    const auto anorms = norms_for(corpus, aslots);
    for (const auto& [yi, islots] : indu) {
      if (same_year_only && ya != yi) continue;
      const auto inorms = norms_for(corpus, islots);
      for (std::size_t i = 0; i < aslots.size(); ++i) {
        const auto va = corpus.embedding(aslots[i]);
        for (std::size_t j = 0; j < islots.size(); ++j) {
          sims.push_back(
              cosine_precomputed(va, anorms[i], corpus.embedding(islots[j]), inorms[j]));
        }
      }
    }
  }
  if (sims.empty()) {
    throw ValidationError("global_threshold: no academic-industry embedded pair exists");
  }
  if (sims.size() == 1) return sims[0];
  return stats::quantile(std::move(sims), q);
}

ProportionMatrix proportion_matrix(const Corpus& corpus, Sector focal_side, double threshold,
                                   double q, int year_min, int year_max, int workers) {
  if (!std::isfinite(threshold)) throw ValidationError("proportion_matrix: non-finite threshold");
  const auto focal_by_year = embedded_slots_by_year(corpus, focal_side);
  const auto target_by_year = embedded_slots_by_year(corpus, opposing(focal_side));

  ProportionMatrix m;
  m.focal_side = focal_side;
  m.threshold = threshold;
  m.q = q;
  for (int y = year_min; y <= year_max; ++y) {
    m.focal_years.push_back(y);
    m.target_years.push_back(y);
  }
  const std::size_t ny = m.focal_years.size();
  m.values.assign(ny, std::vector<std::optional<double>>(ny));
  m.denominators.assign(ny, std::vector<int>(ny, 0));

  // flatten focal papers; each one is scored against every target year once
  struct FocalRef {
    std::size_t slot;
    std::size_t year_idx;
    double norm;
  };
  std::vector<FocalRef> focal;
  for (std::size_t yi = 0; yi < ny; ++yi) {
    auto it = focal_by_year.find(m.focal_years[yi]);
    if (it == focal_by_year.end()) continue;
    // norms validated here so no error can surface inside a worker thread
    for (std::size_t slot : it->second) focal.push_back({slot, yi, norm_checked(corpus, slot)});
  }

  std::vector<std::vector<std::size_t>> target_slots(ny);
  std::vector<std::vector<double>> target_norms(ny);
  for (std::size_t yj = 0; yj < ny; ++yj) {
    auto it = target_by_year.find(m.target_years[yj]);
    if (it != target_by_year.end()) {
      target_slots[yj] = it->second;
      target_norms[yj] = norms_for(corpus, it->second);
    }
  }

  const std::size_t chunk_count =
      std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(focal.size(), 1));
  std::vector<std::vector<std::vector<int>>> exceed(
      chunk_count, std::vector<std::vector<int>>(ny, std::vector<int>(ny, 0)));
  std::vector<std::vector<std::vector<int>>> denom(
      chunk_count, std::vector<std::vector<int>>(ny, std::vector<int>(ny, 0)));

  parallel_for_chunks(focal.size(), static_cast<int>(chunk_count),
                      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                        std::vector<double> sims;
                        for (std::size_t f = begin; f < end; ++f) {
                          const auto v = corpus.embedding(focal[f].slot);
                          const double nv = focal[f].norm;
                          for (std::size_t yj = 0; yj < ny; ++yj) {
                            if (target_slots[yj].empty()) continue;
                            sims.clear();
                            for (std::size_t t = 0; t < target_slots[yj].size(); ++t) {
                              sims.push_back(cosine_precomputed(
                                  v, nv, corpus.embedding(target_slots[yj][t]),
                                  target_norms[yj][t]));
                            }
                            const double score =
                                sims.size() == 1 ? sims[0] : stats::quantile(sims, q);
                            denom[chunk][focal[f].year_idx][yj] += 1;
                            if (score > threshold) exceed[chunk][focal[f].year_idx][yj] += 1;
                          }
                        }
                      });

  for (std::size_t yi = 0; yi < ny; ++yi) {
    for (std::size_t yj = 0; yj < ny; ++yj) {
      int num = 0;
      int den = 0;
      for (std::size_t c = 0; c < chunk_count; ++c) {
        num += exceed[c][yi][yj];
        den += denom[c][yi][yj];
      }
      m.denominators[yi][yj] = den;
      if (den > 0) m.values[yi][yj] = static_cast<double>(num) / static_cast<double>(den);
    }
  }
  return m;
}

std::vector<TopPair> top_pairs_export(const Corpus& corpus, int focal_year, Sector focal_side,
                                      std::size_t k, int max_target_year) {
  if (max_target_year > focal_year) {
    throw ValidationError("top_pairs_export: max_target_year must not exceed focal_year");
  }
  const auto focal_by_year = embedded_slots_by_year(corpus, focal_side);
  const auto target_by_year = embedded_slots_by_year(corpus, opposing(focal_side));

  std::vector<std::size_t> targets;
  for (const auto& [y, slots] : target_by_year) {
    if (y <= max_target_year) targets.insert(targets.end(), slots.begin(), slots.end());
  }
  std::vector<TopPair> out;
  auto fit = focal_by_year.find(focal_year);
  if (fit == focal_by_year.end() || targets.empty()) return out;

  const auto target_norms = norms_for(corpus, targets);
  for (std::size_t slot : fit->second) {
    const auto v = corpus.embedding(slot);
    const double nv = norm_checked(corpus, slot);
    double best = -2.0;
    std::size_t best_t = 0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double s = cosine_precomputed(v, nv, corpus.embedding(targets[t]), target_norms[t]);
      if (s > best ||
          (s == best && corpus.papers[targets[t]].paper_id < corpus.papers[best_t].paper_id)) {
        best = s;
        best_t = t;
      }
    }
    out.push_back({corpus.papers[slot].paper_id, corpus.papers[targets[best_t]].paper_id, best,
                   corpus.papers[targets[best_t]].year});
  }
  std::sort(out.begin(), out.end(), [](const TopPair& a, const TopPair& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.focal_id < b.focal_id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::map<std::string, double> same_year_scores(const Corpus& corpus, Sector focal_side, double q,
                                               std::size_t* skipped) {
  const auto focal_by_year = embedded_slots_by_year(corpus, focal_side);
  const auto target_by_year = embedded_slots_by_year(corpus, opposing(focal_side));

  std::size_t skip_count = 0;
  std::map<std::string, double> out;
  for (const auto& [year, fslots] : focal_by_year) {
    auto tit = target_by_year.find(year);
    if (tit == target_by_year.end() || tit->second.empty()) {
      skip_count += fslots.size();
      continue;
    }
    const auto tnorms = norms_for(corpus, tit->second);
    std::vector<double> sims;
    for (std::size_t slot : fslots) {
      const auto v = corpus.embedding(slot);
      const double nv = norm_checked(corpus, slot);
      sims.clear();
      for (std::size_t t = 0; t < tit->second.size(); ++t) {
        sims.push_back(
            cosine_precomputed(v, nv, corpus.embedding(tit->second[t]), tnorms[t]));
      }
      out[corpus.papers[slot].paper_id] = sims.size() == 1 ? sims[0] : stats::quantile(sims, q);
    }
  }
  if (skipped) *skipped = skip_count;
  return out;
}

}  // namespace proxkit
