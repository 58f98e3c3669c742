#include "proxkit/coocnet.hpp"

#include <algorithm>
#include <numeric>

#include "proxkit/rng.hpp"

namespace proxkit {

std::size_t CoocGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nbrs : adj) twice += nbrs.size();
  return twice / 2;
}

std::optional<std::size_t> CoocGraph::index_of(int entity_id) const {
  auto it = std::lower_bound(node_ids.begin(), node_ids.end(), entity_id);
  if (it == node_ids.end() || *it != entity_id) return std::nullopt;
  return static_cast<std::size_t>(it - node_ids.begin());
}

int Partition::community_count() const {
  int max_id = -1;
  for (int c : community) max_id = std::max(max_id, c);
  return max_id + 1;
}

CoocGraph build_graph(const std::vector<std::vector<int>>& paper_entities, bool weighted) {
  std::set<int> node_set;
  std::map<std::pair<int, int>, int> pair_count;
  for (const auto& raw : paper_entities) {
    std::vector<int> ents(raw);
    std::sort(ents.begin(), ents.end());
    ents.erase(std::unique(ents.begin(), ents.end()), ents.end());
    for (int e : ents) node_set.insert(e);
    for (std::size_t i = 0; i < ents.size(); ++i) {
      for (std::size_t j = i + 1; j < ents.size(); ++j) {
        pair_count[{ents[i], ents[j]}] += 1;
      }
    }
  }

  CoocGraph g;
  g.node_ids.assign(node_set.begin(), node_set.end());
  g.adj.assign(g.node_ids.size(), {});
  g.degree.assign(g.node_ids.size(), 0.0);
  for (const auto& [pair, count] : pair_count) {
    const std::size_t u = *g.index_of(pair.first);
    const std::size_t v = *g.index_of(pair.second);
    const double w = weighted ? static_cast<double>(count) : 1.0;
    g.adj[u].emplace_back(v, w);
    g.adj[v].emplace_back(u, w);
    g.degree[u] += w;
    g.degree[v] += w;
    g.m += w;
  }
  return g;
}

std::vector<std::vector<int>> paper_entity_sets(const Corpus& corpus,
                                                const NormalizedEntities& entities, int year,
                                                std::optional<PaperType> only,
                                                std::optional<PaperType> exclude) {
  std::map<std::string, std::vector<int>> per_paper;
  for (const auto& m : entities.mentions) {
    if (m.year != year) continue;
    const PaperRecord* paper = corpus.find(m.paper_id);
    if (paper == nullptr || paper->type == PaperType::Excluded) continue;
    if (only && paper->type != *only) continue;
    if (exclude && paper->type == *exclude) continue;
    per_paper[m.paper_id].push_back(m.entity_id);
  }
  std::vector<std::vector<int>> out;
  out.reserve(per_paper.size());
  for (auto& [id, ents] : per_paper) out.push_back(std::move(ents));
  return out;
}

std::vector<int> largest_connected_component(const CoocGraph& g) {
  const std::size_t n = g.size();
  std::vector<int> comp(n, -1);
  int comp_count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = comp_count++;
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : g.adj[u]) {
        (void)w;
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
      }
    }
  }
  std::vector<std::size_t> size(static_cast<std::size_t>(comp_count), 0);
  for (std::size_t i = 0; i < n; ++i) ++size[static_cast<std::size_t>(comp[i])];
  // best = largest size; components are discovered in ascending order of their
  // smallest node index (= smallest entity id), so the first maximum wins ties
  int best = -1;
  std::size_t best_size = 0;
  for (int c = 0; c < comp_count; ++c) {
    if (size[static_cast<std::size_t>(c)] > best_size) {
      best_size = size[static_cast<std::size_t>(c)];
      best = c;
    }
  }
  std::vector<int> out;
  if (best < 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] == best) out.push_back(g.node_ids[i]);
  }
  return out;
}

CoocGraph subgraph(const CoocGraph& g, const std::set<int>& keep_ids) {
  CoocGraph out;
  std::vector<std::size_t> keep_idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (keep_ids.count(g.node_ids[i]) > 0) {
      keep_idx.push_back(i);
      out.node_ids.push_back(g.node_ids[i]);
    }
  }
  std::vector<std::ptrdiff_t> remap(g.size(), -1);
  for (std::size_t i = 0; i < keep_idx.size(); ++i) remap[keep_idx[i]] = static_cast<std::ptrdiff_t>(i);
  out.adj.assign(out.node_ids.size(), {});
  out.degree.assign(out.node_ids.size(), 0.0);
  for (std::size_t i = 0; i < keep_idx.size(); ++i) {
    for (const auto& [v, w] : g.adj[keep_idx[i]]) {
      if (remap[v] < 0) continue;
      out.adj[i].emplace_back(static_cast<std::size_t>(remap[v]), w);
      out.degree[i] += w;
      if (keep_idx[i] < v) out.m += w;
    }
  }
  return out;
}

LccReport missing_proportion(const Corpus& corpus, const NormalizedEntities& entities, int year,
                             bool weighted) {
  LccReport report;
  report.year = year;
  const CoocGraph full = build_graph(paper_entity_sets(corpus, entities, year), weighted);
  const std::size_t full_lcc = largest_connected_component(full).size();
  report.full_lcc_size = full_lcc;
  for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
    if (full_lcc == 0) {
      report.per_type_missing[t] = std::nullopt;
      continue;
    }
    const CoocGraph without =
        build_graph(paper_entity_sets(corpus, entities, year, std::nullopt, t), weighted);
    const std::size_t lcc = largest_connected_component(without).size();
    const double missing = 1.0 - static_cast<double>(lcc) / static_cast<double>(full_lcc);
    report.per_type_missing[t] = std::clamp(missing, 0.0, 1.0);
  }
  return report;
}

CommonNodeReport common_nodes_and_edges(const CoocGraph& g_academic, const CoocGraph& g_industry,
                                        const CoocGraph& g_cooperation) {
  CommonNodeReport report;
  std::set<int> acad(g_academic.node_ids.begin(), g_academic.node_ids.end());
  std::set<int> indu(g_industry.node_ids.begin(), g_industry.node_ids.end());
  for (int id : g_cooperation.node_ids) {
    if (acad.count(id) > 0 && indu.count(id) > 0) report.common_nodes.push_back(id);
  }
  const std::set<int> common(report.common_nodes.begin(), report.common_nodes.end());
  auto count_edges = [&common](const CoocGraph& g) {
    std::size_t count = 0;
    for (std::size_t u = 0; u < g.size(); ++u) {
      if (common.count(g.node_ids[u]) == 0) continue;
      for (const auto& [v, w] : g.adj[u]) {
        (void)w;
        if (u < v && common.count(g.node_ids[v]) > 0) ++count;
      }
    }
    return count;
  };
  report.edge_scale[PaperType::Academic] = count_edges(g_academic);
  report.edge_scale[PaperType::Industry] = count_edges(g_industry);
  report.edge_scale[PaperType::Cooperation] = count_edges(g_cooperation);
  return report;
}

double modularity(const CoocGraph& g, const Partition& p) {
  if (g.m <= 0.0) throw ValidationError("modularity: graph has no edges");
  if (p.community.size() != g.size()) {
    throw ValidationError("modularity: partition does not cover every node");
  }
  const int nc = p.community_count();
  for (int c : p.community) {
    if (c < 0 || c >= nc) throw ValidationError("modularity: invalid community id");
  }
  std::vector<double> internal(static_cast<std::size_t>(nc), 0.0);  // ordered-pair sums
  std::vector<double> total(static_cast<std::size_t>(nc), 0.0);
  for (std::size_t u = 0; u < g.size(); ++u) {
    const auto cu = static_cast<std::size_t>(p.community[u]);
    total[cu] += g.degree[u];
    for (const auto& [v, w] : g.adj[u]) {
      if (p.community[v] == p.community[u]) internal[cu] += w;
    }
  }
  const double two_m = 2.0 * g.m;
  double q = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    q += internal[ci] / two_m - (total[ci] / two_m) * (total[ci] / two_m);
  }
  return q;
}

namespace {

/// Aggregated level graph in ordered-matrix convention: loop[i] holds A_ii
/// (internal ordered-pair weight), so k_i = loop[i] + sum of incident weights
/// and 2m is invariant across levels.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> loop;
  std::vector<double> k;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

double level_modularity(const LevelGraph& lg, const std::vector<int>& comm, int nc) {
  std::vector<double> internal(static_cast<std::size_t>(nc), 0.0);
  std::vector<double> total(static_cast<std::size_t>(nc), 0.0);
  for (std::size_t u = 0; u < lg.size(); ++u) {
    const auto cu = static_cast<std::size_t>(comm[u]);
    total[cu] += lg.k[u];
    internal[cu] += lg.loop[u];
    for (const auto& [v, w] : lg.adj[u]) {
      if (comm[v] == comm[u]) internal[cu] += w;
    }
  }
  double q = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    q += internal[ci] / lg.two_m - (total[ci] / lg.two_m) * (total[ci] / lg.two_m);
  }
  return q;
}

/// One local-move phase. comm is updated in place (community ids are node
/// indices of this level). Returns true when at least one node moved.
bool local_moves(const LevelGraph& lg, std::vector<int>& comm, Rng& rng) {
  const std::size_t n = lg.size();
  std::vector<double> sigma_tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) sigma_tot[static_cast<std::size_t>(comm[i])] += lg.k[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  bool any_move = false;
  bool moved = true;
  std::map<int, double> weight_to;  // candidate community -> k_i_in
  while (moved) {
    moved = false;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const std::size_t i = order[idx];
      const int old_c = comm[i];
      weight_to.clear();
      weight_to[old_c] = 0.0;  // staying isolated must be a candidate
      for (const auto& [v, w] : lg.adj[i]) weight_to[comm[v]] += w;

      sigma_tot[static_cast<std::size_t>(old_c)] -= lg.k[i];
      const double base = weight_to[old_c] -
                          sigma_tot[static_cast<std::size_t>(old_c)] * lg.k[i] / lg.two_m;
      int best_c = old_c;
      double best_gain = base;
      for (const auto& [c, k_in] : weight_to) {
        if (c == old_c) continue;
        const double gain = k_in - sigma_tot[static_cast<std::size_t>(c)] * lg.k[i] / lg.two_m;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_c = c;
        }
      }
      sigma_tot[static_cast<std::size_t>(best_c)] += lg.k[i];
      if (best_c != old_c) {
        comm[i] = best_c;
        moved = true;
        any_move = true;
      }
    }
  }
  return any_move;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm, int nc) {
  LevelGraph out;
  out.adj.assign(static_cast<std::size_t>(nc), {});
  out.loop.assign(static_cast<std::size_t>(nc), 0.0);
  out.k.assign(static_cast<std::size_t>(nc), 0.0);
  out.two_m = lg.two_m;
  std::map<std::pair<int, int>, double> cross;
  for (std::size_t u = 0; u < lg.size(); ++u) {
    const int cu = comm[u];
    out.loop[static_cast<std::size_t>(cu)] += lg.loop[u];
    for (const auto& [v, w] : lg.adj[u]) {
      const int cv = comm[v];
      if (cu == cv) {
        out.loop[static_cast<std::size_t>(cu)] += w;  // both directions land here: ordered sum
      } else if (cu < cv) {
        cross[{cu, cv}] += w;  // each edge contributes once, from its lower-community endpoint
      }
    }
  }
  for (auto& [pair, w] : cross) {
    const auto a = static_cast<std::size_t>(pair.first);
    const auto b = static_cast<std::size_t>(pair.second);
    out.adj[a].emplace_back(b, w);
    out.adj[b].emplace_back(a, w);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.k[i] = out.loop[i];
    for (const auto& [v, w] : out.adj[i]) {
      (void)v;
      out.k[i] += w;
    }
  }
  return out;
}

}  // namespace

LouvainResult louvain(const CoocGraph& g, uint64_t seed) {
  if (g.m <= 0.0) throw ValidationError("louvain: graph has no edges");

  LevelGraph lg;
  lg.adj = g.adj;
  lg.loop.assign(g.size(), 0.0);
  lg.k = g.degree;
  lg.two_m = 2.0 * g.m;

  Rng rng(seed);
  std::vector<int> node_to_final(g.size());
  std::iota(node_to_final.begin(), node_to_final.end(), 0);

  LouvainResult result;
  result.seed = seed;

  while (true) {
    std::vector<int> comm(lg.size());
    std::iota(comm.begin(), comm.end(), 0);
    const bool improved = local_moves(lg, comm, rng);

    // renumber communities contiguously, ordered by smallest member index
    std::map<int, int> renumber;
    for (std::size_t i = 0; i < comm.size(); ++i) renumber.emplace(comm[i], 0);
    int next = 0;
    std::vector<std::pair<int, std::size_t>> firsts;  // (community, first member)
    {
      std::map<int, std::size_t> first_member;
      for (std::size_t i = 0; i < comm.size(); ++i) first_member.emplace(comm[i], i);
      firsts.reserve(first_member.size());
      for (const auto& [c, i] : first_member) firsts.emplace_back(c, i);
      std::sort(firsts.begin(), firsts.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
      for (const auto& [c, i] : firsts) {
        (void)i;
        renumber[c] = next++;
      }
    }
    for (auto& c : comm) c = renumber[c];
    const int nc = next;

    for (auto& f : node_to_final) f = comm[static_cast<std::size_t>(f)];
    result.level_q.push_back(level_modularity(lg, comm, nc));

    if (!improved || nc == static_cast<int>(lg.size())) break;
    lg = aggregate(lg, comm, nc);
  }

  result.partition.community = node_to_final;
  result.q = modularity(g, result.partition);
  return result;
}

}  // namespace proxkit
