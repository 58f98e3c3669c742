#include "proxkit/citeflow.hpp"

#include <algorithm>
#include <set>

#include "proxkit/util.hpp"

namespace proxkit {

void CitationBreakdown::add(PaperType cited_type) {
  if (cited_type == PaperType::Excluded) {
    ++excluded_count;
  } else {
    ++counts[static_cast<std::size_t>(cited_type)];
  }
}

CitationBreakdown citation_breakdown(const Corpus& corpus, int year, PaperType citing_type) {
  CitationBreakdown out;
  for (const auto& e : corpus.citations) {
    const PaperRecord* citing = corpus.find(e.citing_id);
    if (citing == nullptr || citing->year != year || citing->type != citing_type) continue;
    out.add(e.cited_type);
  }
  return out;
}

std::optional<std::array<double, 3>> citation_proportions(const Corpus& corpus, int year,
                                                          PaperType citing_type) {
  const CitationBreakdown b = citation_breakdown(corpus, year, citing_type);
  const long total = b.total_classified();
  if (total == 0) return std::nullopt;
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = static_cast<double>(b.counts[i]) / static_cast<double>(total);
  }
  return out;
}

std::optional<double> hhi(const CitationBreakdown& breakdown) {
  const long total = breakdown.total_classified();
  if (total == 0) return std::nullopt;
  double sum = 0.0;
  for (long c : breakdown.counts) {
    const double share = static_cast<double>(c) / static_cast<double>(total);
    sum += share * share;
  }
  return sum;
}

std::optional<double> paper_hhi(const Corpus& corpus, const std::string& paper_id) {
  CitationBreakdown b;
  for (std::size_t slot : corpus.citation_slots(paper_id)) {
    b.add(corpus.citations[slot].cited_type);
  }
  return hhi(b);
}

std::optional<double> ecc(const Corpus& corpus, int year, Sector side, EccBaseline baseline) {
  const PaperType self =
      side == Sector::Academic ? PaperType::Academic : PaperType::Industry;
  const PaperType other =
      side == Sector::Academic ? PaperType::Industry : PaperType::Academic;
  if (side == Sector::Excluded) throw ValidationError("ecc: side must be academic or industry");

  const CitationBreakdown own = citation_breakdown(corpus, year, self);
  if (own.total_classified() == 0) return std::nullopt;

  CitationBreakdown base = own;
  {
    const CitationBreakdown opp = citation_breakdown(corpus, year, other);
    for (std::size_t i = 0; i < 3; ++i) base.counts[i] += opp.counts[i];
    if (baseline == EccBaseline::AllClassified) {
      const CitationBreakdown coop = citation_breakdown(corpus, year, PaperType::Cooperation);
      for (std::size_t i = 0; i < 3; ++i) base.counts[i] += coop.counts[i];
    }
  }
  if (base.total_classified() == 0) return std::nullopt;

  auto share = [](const CitationBreakdown& b, PaperType t) {
    return static_cast<double>(b.counts[static_cast<std::size_t>(t)]) /
           static_cast<double>(b.total_classified());
  };
  const double self_gap = share(own, self) - share(base, self);
  const double cross_gap = share(own, other) - share(base, other);
  return self_gap - cross_gap;
}

ComputeDemandFlag flag_compute_demand(const std::string& paper_id,
                                      const std::vector<std::string>& texts,
                                      const std::vector<std::string>& terms) {
  if (terms.empty()) throw ValidationError("flag_compute_demand: empty term list");
  std::set<std::string> wanted;  // lowercase term and its trailing-s plural
  std::map<std::string, std::string> back;
  for (const auto& t : terms) {
    const std::string lower = to_lower(trim(t));
    if (lower.empty()) continue;
    wanted.insert(lower);
    back[lower] = lower;
    back[lower + "s"] = lower;
    wanted.insert(lower + "s");
  }
  std::set<std::string> matched;
  for (const auto& text : texts) {
    for (const auto& token : tokenize(text)) {
      if (wanted.count(token) > 0) matched.insert(back[token]);
    }
  }
  ComputeDemandFlag out;
  out.paper_id = paper_id;
  out.matched_terms.assign(matched.begin(), matched.end());
  out.high_demand = !out.matched_terms.empty();
  return out;
}

ComputeDemandFlag flag_paper_compute_demand(const Corpus& corpus, const PaperRecord& paper,
                                            const std::vector<std::string>& terms) {
  std::vector<std::string> texts;
  texts.push_back(paper.title);
  if (paper.abstract) texts.push_back(*paper.abstract);
  for (const auto& m : corpus.mentions) {
    if (m.paper_id == paper.paper_id) texts.push_back(m.surface);
  }
  return flag_compute_demand(paper.paper_id, texts, terms);
}

std::map<std::string, ComputeDemandFlag> flag_corpus_compute_demand(
    const Corpus& corpus, const std::vector<std::string>& terms) {
  std::map<std::string, std::vector<std::string>> texts;
  for (const auto& p : corpus.papers) {
    auto& t = texts[p.paper_id];
    t.push_back(p.title);
    if (p.abstract) t.push_back(*p.abstract);
  }
  for (const auto& m : corpus.mentions) texts[m.paper_id].push_back(m.surface);
  std::map<std::string, ComputeDemandFlag> out;
  for (const auto& [id, t] : texts) out.emplace(id, flag_compute_demand(id, t, terms));
  return out;
}

}  // namespace proxkit
