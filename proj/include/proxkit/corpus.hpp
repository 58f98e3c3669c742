#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "proxkit/types.hpp"

namespace proxkit {

struct Affiliation {
  int author_index = 0;
  std::string institution_id;
  std::string category;  // raw category string as supplied
};

struct PaperRecord {
  std::string paper_id;
  int year = 0;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<Affiliation> affiliations;
  PaperType type = PaperType::Excluded;  // re-derived from raw categories at load
  bool has_embedding = false;

  int n_authors() const;
  int n_institutions() const;
};

struct CitationEdge {
  std::string citing_id;
  std::string cited_key;
  int cited_year = 0;
  PaperType cited_type = PaperType::Excluded;
};

struct EntityMention {
  std::string paper_id;
  std::string surface;
  EntityClass cls = EntityClass::Method;
  int year = 0;  // denormalized from the paper
};

struct CorpusConfig {
  int year_min = 2000;
  int year_max = 2022;
  std::size_t embedding_dim = 0;  // 0: take from the CSV header; required for binary files
  std::map<std::string, Sector> category_overrides;  // lowercase keys
};

struct LoadReport {
  std::size_t papers_loaded = 0;
  std::size_t papers_dropped_year = 0;
  std::size_t mentions_loaded = 0;
  std::size_t mentions_dropped_dangling = 0;
  std::size_t embeddings_loaded = 0;
  std::size_t embeddings_dropped_dangling = 0;
  std::size_t citations_loaded = 0;
  std::size_t citations_dropped_dangling = 0;
  std::size_t citations_dropped_order = 0;  // cited_year > citing year
  std::vector<std::string> warnings;

  std::size_t total_dropped() const {
    return papers_dropped_year + mentions_dropped_dangling + embeddings_dropped_dangling +
           citations_dropped_dangling + citations_dropped_order;
  }
};

/// Immutable after load; safe to share across parallel analysis workers.
struct Corpus {
  std::vector<PaperRecord> papers;  // sorted by paper_id
  std::vector<EntityMention> mentions;
  std::vector<CitationEdge> citations;

  std::size_t embedding_dim = 0;
  std::vector<float> embedding_data;          // row-major, aligned to paper slots
  std::vector<std::ptrdiff_t> embedding_row;  // per paper: row index or -1

  std::unordered_map<std::string, std::size_t> paper_index;
  std::unordered_map<std::string, std::vector<std::size_t>> citations_by_paper;

  const PaperRecord* find(const std::string& paper_id) const;
  std::span<const float> embedding(std::size_t paper_slot) const;
  std::span<const float> embedding_of(const std::string& paper_id) const;
  std::span<const std::size_t> citation_slots(const std::string& paper_id) const;

  std::map<PaperType, std::size_t> type_counts() const;
};

/// education/healthcare -> Academic, company -> Industry, anything else -> Excluded.
/// Comparison is case-insensitive after trimming; overrides take precedence.
Sector classify_institution(std::string_view raw_category,
                            const std::map<std::string, Sector>& overrides = {});

/// Paper type from per-author sectors (first listed institution per author).
/// Excluded authors are ignored when at least one classified author exists.
PaperType classify_paper(std::span<const Sector> author_sectors);

/// Per-author sector sequence from the paper's affiliations: the first listed
/// institution of each author, ordered by author index.
std::vector<Sector> author_sectors(const PaperRecord& paper,
                                   const std::map<std::string, Sector>& overrides = {});

Corpus load_corpus(const std::filesystem::path& paper_path,
                   const std::filesystem::path& entity_path,
                   const std::filesystem::path& embedding_path,
                   const std::filesystem::path& citation_path, const CorpusConfig& config,
                   LoadReport* report = nullptr);

}  // namespace proxkit
