#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "proxkit/corpus.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// A normalized knowledge entity: one cluster of surface forms.
struct EntityCluster {
  int entity_id = -1;
  std::string canonical;  // most frequent member, lexicographic tie-break
  EntityClass cls = EntityClass::Method;
  std::set<std::string> members;
  std::map<int, int> year_freq;

  int total_freq() const;
  int max_annual_freq() const;
};

struct NormalizationConfig {
  std::unordered_map<std::string, std::string> abbreviations;  // lowercase short -> full
  std::unordered_set<std::string> stoplist;                    // lowercase surfaces
  double same_cluster_sim = 0.95;
  double merge_avg_sim = 0.8;
  int min_annual_freq = 5;

  void validate() const;
};

struct NormalizeReport {
  std::size_t mentions_in = 0;
  std::size_t mentions_filtered = 0;  // stoplisted or empty after trimming
  std::size_t clusters_before_prune = 0;
  std::size_t clusters_after_prune = 0;
  std::size_t mentions_out = 0;
};

/// Lowercase + trim, expand abbreviations, then drop stoplisted surfaces.
/// Returns mentions whose surfaces survived, with normalized surfaces.
std::vector<EntityMention> expand_and_filter(const std::vector<EntityMention>& mentions,
                                             const NormalizationConfig& config,
                                             std::size_t* filtered_count = nullptr);

/// 1 - Levenshtein(a,b) / max(|a|,|b|). Throws on empty input.
double edit_similarity(std::string_view a, std::string_view b);

/// Two-phase agglomeration within each entity class: single-link joining of
/// pairs above same_cluster_sim, then greedy merging of cluster pairs whose
/// average cross-similarity exceeds merge_avg_sim (highest average first,
/// lexicographic tie-break on the clusters' smallest members).
std::vector<EntityCluster> cluster_entities(const std::vector<EntityMention>& mentions,
                                            const NormalizationConfig& config);

/// Drops clusters whose best year count is below min_annual_freq.
std::vector<EntityCluster> prune_rare(std::vector<EntityCluster> clusters, int min_annual_freq,
                                      std::size_t* dropped = nullptr);

/// One resolved mention: a raw mention attributed to its entity cluster.
struct ResolvedMention {
  std::string paper_id;
  int entity_id = -1;
  EntityClass cls = EntityClass::Method;
  int year = 0;
};

/// Everything downstream modules need from normalization.
struct NormalizedEntities {
  std::vector<EntityCluster> clusters;  // sorted by entity_id
  std::map<std::pair<EntityClass, std::string>, int> surface_to_id;
  std::vector<ResolvedMention> mentions;
  NormalizeReport report;

  const EntityCluster* find(int entity_id) const;
  /// Applies the same normalization as expand_and_filter before lookup.
  std::optional<int> resolve(EntityClass cls, std::string_view raw_surface,
                             const NormalizationConfig& config) const;
};

NormalizedEntities normalize(const std::vector<EntityMention>& raw,
                             const NormalizationConfig& config);

/// Plain-text config inputs: "short=>full" lines for the map, one term per
/// line for the stoplist. '#' starts a comment.
std::unordered_map<std::string, std::string> load_abbreviation_map(
    const std::filesystem::path& path);
std::unordered_set<std::string> load_stoplist(const std::filesystem::path& path);

/// JSONL round-trip of normalized clusters.
void write_clusters_jsonl(const std::filesystem::path& path,
                          const std::vector<EntityCluster>& clusters);
std::vector<EntityCluster> read_clusters_jsonl(const std::filesystem::path& path);

}  // namespace proxkit
