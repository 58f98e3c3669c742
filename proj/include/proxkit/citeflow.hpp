#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxkit/corpus.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// Reference counts over the three classified categories; excluded references
/// are tallied separately and never enter a denominator.
struct CitationBreakdown {
  std::array<long, 3> counts{0, 0, 0};  // indexed by PaperType Academic/Industry/Cooperation
  long excluded_count = 0;

  long total_classified() const { return counts[0] + counts[1] + counts[2]; }
  void add(PaperType cited_type);
};

enum class EccBaseline { AllClassified, PureOnly };

struct ComputeDemandFlag {
  std::string paper_id;
  bool high_demand = false;
  std::vector<std::string> matched_terms;  // sorted, lowercase
};

/// Reference counts of papers of (year, citing_type).
CitationBreakdown citation_breakdown(const Corpus& corpus, int year, PaperType citing_type);

/// Shares over {Academic, Industry, Cooperation}; nullopt when the stratum
/// made no classified reference.
std::optional<std::array<double, 3>> citation_proportions(const Corpus& corpus, int year,
                                                          PaperType citing_type);

/// Herfindahl-Hirschman concentration of the breakdown; nullopt on zero total.
std::optional<double> hhi(const CitationBreakdown& breakdown);

/// HHI of one paper's classified references.
std::optional<double> paper_hhi(const Corpus& corpus, const std::string& paper_id);

/// Excess self-citation of `side` for papers published in `year`:
/// [P(Li|Li) - P(Li)] - [P(Lj|Li) - P(Lj)]. nullopt when the side made no
/// classified reference that year or the baseline is empty.
std::optional<double> ecc(const Corpus& corpus, int year, Sector side,
                          EccBaseline baseline = EccBaseline::AllClassified);

/// Whole-token, case-insensitive matching with a trailing-s plural allowance
/// on each term.
ComputeDemandFlag flag_compute_demand(const std::string& paper_id,
                                      const std::vector<std::string>& texts,
                                      const std::vector<std::string>& terms);

/// Flags a corpus paper from its title, abstract, and entity surfaces.
ComputeDemandFlag flag_paper_compute_demand(const Corpus& corpus, const PaperRecord& paper,
                                            const std::vector<std::string>& terms);

/// One pass over the whole corpus; keyed by paper_id.
std::map<std::string, ComputeDemandFlag> flag_corpus_compute_demand(
    const Corpus& corpus, const std::vector<std::string>& terms);

inline const std::vector<std::string> kDefaultHardwareTerms = {"GPU", "TPU", "CUDA", "CPU"};

}  // namespace proxkit
