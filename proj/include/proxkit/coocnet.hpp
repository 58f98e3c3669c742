#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "proxkit/corpus.hpp"
#include "proxkit/entnorm.hpp"
#include "proxkit/types.hpp"

namespace proxkit {

/// Weighted entity co-occurrence graph. No self-loops; edge weights are
/// strictly positive; degree sums to 2m.
struct CoocGraph {
  std::vector<int> node_ids;  // sorted entity ids; dense index = position
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // both directions
  std::vector<double> degree;
  double m = 0.0;  // total edge weight

  std::size_t size() const { return node_ids.size(); }
  std::size_t edge_count() const;
  std::optional<std::size_t> index_of(int entity_id) const;
};

struct Partition {
  std::vector<int> community;  // by dense node index; ids contiguous from 0

  int community_count() const;
};

struct LccReport {
  int year = 0;
  std::size_t full_lcc_size = 0;
  std::map<PaperType, std::optional<double>> per_type_missing;
};

struct CommonNodeReport {
  int year = 0;
  std::vector<int> common_nodes;  // sorted entity ids
  std::map<PaperType, std::size_t> edge_scale;
};

struct LouvainResult {
  Partition partition;
  double q = 0.0;
  std::vector<double> level_q;  // modularity after each aggregation level
  uint64_t seed = 0;
};

/// Distinct entities of each paper form a clique; weight = number of papers
/// inducing the pair. Unweighted mode keeps every existing edge at weight 1.
CoocGraph build_graph(const std::vector<std::vector<int>>& paper_entities, bool weighted = true);

/// Entity sets per paper for one year, optionally restricted to / excluding a
/// type. Only classified papers (Academic, Industry, Cooperation) take part.
std::vector<std::vector<int>> paper_entity_sets(const Corpus& corpus,
                                                const NormalizedEntities& entities, int year,
                                                std::optional<PaperType> only = std::nullopt,
                                                std::optional<PaperType> exclude = std::nullopt);

/// Maximum-cardinality component; ties broken by smallest member entity id.
std::vector<int> largest_connected_component(const CoocGraph& g);

/// Induced subgraph on the given entity ids.
CoocGraph subgraph(const CoocGraph& g, const std::set<int>& keep_ids);

/// Leave-one-type-out LCC shrinkage for one year.
LccReport missing_proportion(const Corpus& corpus, const NormalizedEntities& entities, int year,
                             bool weighted = true);

/// Eq-style set operations over three per-type graphs of one year.
CommonNodeReport common_nodes_and_edges(const CoocGraph& g_academic,
                                        const CoocGraph& g_industry,
                                        const CoocGraph& g_cooperation);

/// Newman modularity of the partition over the weighted graph. Throws on m=0
/// or a partition that does not cover every node.
double modularity(const CoocGraph& g, const Partition& p);

/// Two-phase Louvain with seeded visit order. Deterministic per seed.
LouvainResult louvain(const CoocGraph& g, uint64_t seed);

}  // namespace proxkit
