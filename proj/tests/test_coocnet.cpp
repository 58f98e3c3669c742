#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxkit/coocnet.hpp"
#include "proxkit/rng.hpp"
#include "testutil.hpp"

using namespace proxkit;
using testutil::CorpusBuilder;

namespace {

std::vector<std::vector<double>> dense_adjacency(const CoocGraph& g) {
  std::vector<std::vector<double>> w(g.size(), std::vector<double>(g.size(), 0.0));
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (const auto& [v, weight] : g.adj[u]) w[u][v] = weight;
  }
  return w;
}

double best_partition_q(const CoocGraph& g) {
  const auto w = dense_adjacency(g);
  double best = -1e9;
  oracles::enumerate_partitions(g.size(), [&](const std::vector<int>& assign) {
    best = std::max(best, oracles::modularity_dense(w, assign));
  });
  return best;
}

CoocGraph random_graph(Rng& rng, std::size_t n, double edge_p, int max_weight) {
  std::vector<std::vector<int>> papers;
  // one synthetic "paper" per edge gives arbitrary weighted graphs
  for (std::size_t i = 0; i < n; ++i) {
    papers.push_back({static_cast<int>(i)});  // make every node exist
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.unit() < edge_p) {
        const int w = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_weight)));
        for (int k = 0; k < w; ++k) papers.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return build_graph(papers);
}

}  // namespace

TEST_CASE("build_graph: clique expansion and weight accumulation") {
  {
    const auto g = build_graph({{1, 2, 3}});
    CHECK(g.size() == 3);
    CHECK(g.edge_count() == 3);
    CHECK(g.m == doctest::Approx(3.0));
    for (double k : g.degree) CHECK(k == doctest::Approx(2.0));
  }
  {
    const auto g = build_graph({{1, 2}, {1, 2}});
    CHECK(g.edge_count() == 1);
    CHECK(g.m == doctest::Approx(2.0));  // weight 2 on the single edge
  }
  {
    const auto g = build_graph({{7}});
    CHECK(g.size() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.m == 0.0);
  }
  {
    // duplicate mentions within one paper do not multiply weight
    const auto g = build_graph({{1, 2, 2, 1}});
    CHECK(g.edge_count() == 1);
    CHECK(g.m == doctest::Approx(1.0));
  }
  {
    // unweighted switch keeps edges at 1
    const auto g = build_graph({{1, 2}, {1, 2}, {2, 3}}, false);
    CHECK(g.m == doctest::Approx(2.0));
  }
}

TEST_CASE("degree sum equals 2m on random graphs") {
  Rng rng(404);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_graph(rng, 2 + rng.below(20), 0.3, 3);
    double sum = 0.0;
    for (double k : g.degree) sum += k;
    CHECK(sum == doctest::Approx(2.0 * g.m).epsilon(1e-12));
  }
}

TEST_CASE("largest_connected_component: pinned cases and union-find oracle") {
  {
    const auto g = build_graph({{1, 2}, {2, 3}, {3, 4}});
    CHECK(largest_connected_component(g).size() == 4);
  }
  {
    const auto g = build_graph({{1, 2, 3}, {10, 11}});
    const auto lcc = largest_connected_component(g);
    CHECK(lcc == std::vector<int>{1, 2, 3});
  }
  {
    CHECK(largest_connected_component(build_graph({})).empty());
  }
  {
    // tie: two components of size 2; smallest entity id wins
    const auto g = build_graph({{5, 6}, {1, 2}});
    CHECK(largest_connected_component(g) == std::vector<int>{1, 2});
  }
  Rng rng(50);
  for (int rep = 0; rep < 30; ++rep) {
    const auto g = random_graph(rng, 50, 0.04, 1);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t u = 0; u < g.size(); ++u) {
      for (const auto& [v, w] : g.adj[u]) {
        if (u < v) edges.emplace_back(u, v);
      }
    }
    CHECK(largest_connected_component(g).size() ==
          oracles::lcc_size_union_find(g.size(), edges));
  }
}

TEST_CASE("missing_proportion: trivial cases and rebuild oracle") {
  CorpusBuilder b;
  // academic paper connects 1-2-3; industry connects 3-4; no cooperation papers
  b.paper("a1", 2020, PaperType::Academic)
      .mention("a1", "e1", EntityClass::Method)
      .mention("a1", "e2", EntityClass::Method)
      .mention("a1", "e3", EntityClass::Method);
  b.paper("i1", 2020, PaperType::Industry)
      .mention("i1", "e3", EntityClass::Method)
      .mention("i1", "e4", EntityClass::Method);
  const Corpus corpus = b.build();
  NormalizationConfig cfg;
  cfg.min_annual_freq = 0;
  const auto entities = normalize(corpus.mentions, cfg);

  const auto report = missing_proportion(corpus, entities, 2020);
  CHECK(report.full_lcc_size == 4);
  // no cooperation papers: removing them changes nothing
  CHECK(*report.per_type_missing.at(PaperType::Cooperation) == 0.0);
  // removing industry drops node e4: LCC 3 of 4
  CHECK(*report.per_type_missing.at(PaperType::Industry) == doctest::Approx(0.25));
  // removing academic leaves only the 3-4 edge: LCC 2 of 4
  CHECK(*report.per_type_missing.at(PaperType::Academic) == doctest::Approx(0.5));

  // a year with no papers: empty graph, missing proportions undefined
  const auto empty = missing_proportion(corpus, entities, 2019);
  CHECK(empty.full_lcc_size == 0);
  CHECK_FALSE(empty.per_type_missing.at(PaperType::Academic).has_value());
}

TEST_CASE("missing_proportion: removing the only contributing type gives 1") {
  CorpusBuilder b;
  b.paper("a1", 2020, PaperType::Academic)
      .mention("a1", "e1", EntityClass::Method)
      .mention("a1", "e2", EntityClass::Method);
  const Corpus corpus = b.build();
  NormalizationConfig cfg;
  cfg.min_annual_freq = 0;
  const auto entities = normalize(corpus.mentions, cfg);
  const auto report = missing_proportion(corpus, entities, 2020);
  CHECK(*report.per_type_missing.at(PaperType::Academic) == 1.0);
}

TEST_CASE("lcc monotone under paper-subset removal (random corpora)") {
  Rng rng(2718);
  for (int rep = 0; rep < 20; ++rep) {
    CorpusBuilder b;
    const int n_papers = 10 + static_cast<int>(rng.below(15));
    for (int i = 0; i < n_papers; ++i) {
      const PaperType t = static_cast<PaperType>(rng.below(3));
      const std::string id = "p" + std::to_string(i);
      b.paper(id, 2020, t);
      for (std::size_t m = 0, n = 1 + rng.below(4); m < n; ++m) {
        b.mention(id, "e" + std::to_string(rng.below(12)), EntityClass::Method);
      }
    }
    const Corpus corpus = b.build();
    NormalizationConfig cfg;
    cfg.min_annual_freq = 0;
    const auto entities = normalize(corpus.mentions, cfg);
    const auto report = missing_proportion(corpus, entities, 2020);
    for (const auto& [t, missing] : report.per_type_missing) {
      REQUIRE(missing.has_value());
      CHECK(*missing >= 0.0);
      CHECK(*missing <= 1.0);
    }
  }
}

TEST_CASE("common_nodes_and_edges: set-operation cases") {
  const auto ga = build_graph({{1, 2}, {2, 3}});
  const auto gi = build_graph({{2, 3}, {3, 4}});
  const auto gc = build_graph({{2, 3, 5}});
  const auto r = common_nodes_and_edges(ga, gi, gc);
  CHECK(r.common_nodes == std::vector<int>{2, 3});
  CHECK(r.edge_scale.at(PaperType::Academic) == 1);  // 2-3
  CHECK(r.edge_scale.at(PaperType::Industry) == 1);
  CHECK(r.edge_scale.at(PaperType::Cooperation) == 1);

  const auto disjoint = common_nodes_and_edges(build_graph({{1, 2}}), build_graph({{3, 4}}),
                                               build_graph({{5, 6}}));
  CHECK(disjoint.common_nodes.empty());
  CHECK(disjoint.edge_scale.at(PaperType::Academic) == 0);

  const auto same = build_graph({{1, 2}, {2, 3}, {1, 3}});
  const auto identical = common_nodes_and_edges(same, same, same);
  CHECK(identical.common_nodes == std::vector<int>{1, 2, 3});
  for (const auto& [t, e] : identical.edge_scale) CHECK(e == same.edge_count());
}

TEST_CASE("modularity: pinned values") {
  // two disjoint triangles, partitioned by triangle
  const auto g2 = build_graph({{0, 1, 2}, {3, 4, 5}});
  Partition by_triangle{{0, 0, 0, 1, 1, 1}};
  CHECK(modularity(g2, by_triangle) == doctest::Approx(0.5).epsilon(1e-12));

  // all nodes in one community: exactly 0
  Partition one{{0, 0, 0, 0, 0, 0}};
  CHECK(modularity(g2, one) == doctest::Approx(0.0).epsilon(1e-12));

  // singleton communities on a triangle: -1/3
  const auto tri = build_graph({{0, 1, 2}});
  Partition singletons{{0, 1, 2}};
  CHECK(modularity(tri, singletons) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(modularity(build_graph({{7}}), Partition{{0}}), ValidationError);
}

TEST_CASE("modularity: all-in-one gives 0 and dense oracle agrees on random graphs") {
  Rng rng(31415);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = random_graph(rng, 2 + rng.below(10), 0.5, 4);
    if (g.m == 0.0) continue;
    Partition one;
    one.community.assign(g.size(), 0);
    CHECK(std::abs(modularity(g, one)) < 1e-9);

    Partition random_p;
    const int nc = 1 + static_cast<int>(rng.below(4));
    for (std::size_t i = 0; i < g.size(); ++i) {
      random_p.community.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(nc))));
    }
    // normalize ids to be contiguous
    std::map<int, int> renumber;
    for (int& c : random_p.community) {
      auto [it, inserted] = renumber.emplace(c, static_cast<int>(renumber.size()));
      c = it->second;
    }
    CHECK(modularity(g, random_p) ==
          doctest::Approx(oracles::modularity_dense(dense_adjacency(g), random_p.community))
              .epsilon(1e-10));
  }
}

TEST_CASE("louvain: recovers disjoint cliques and matches the exhaustive optimum") {
  const auto g = build_graph({{0, 1, 2}, {3, 4, 5}});
  const auto result = louvain(g, 7);
  CHECK(result.q == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(result.partition.community[0] == result.partition.community[1]);
  CHECK(result.partition.community[0] == result.partition.community[2]);
  CHECK(result.partition.community[3] == result.partition.community[4]);
  CHECK(result.partition.community[0] != result.partition.community[3]);
  CHECK(result.q == doctest::Approx(best_partition_q(g)).epsilon(1e-9));
}

TEST_CASE("louvain: K4 collapses to a single community with Q = 0") {
  const auto g = build_graph({{0, 1, 2, 3}});
  const auto result = louvain(g, 3);
  CHECK(result.q == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(best_partition_q(g) == doctest::Approx(0.0).epsilon(1e-12));
  for (int c : result.partition.community) CHECK(c == result.partition.community[0]);
}

TEST_CASE("louvain: determinism, Q consistency, never above the exhaustive optimum") {
  Rng rng(161803);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_graph(rng, 3 + rng.below(6), 0.5, 3);
    if (g.m == 0.0) continue;
    const uint64_t seed = rng.next_u64();
    const auto a = louvain(g, seed);
    const auto b = louvain(g, seed);
    CHECK(a.partition.community == b.partition.community);
    CHECK(a.q == b.q);

    // reported Q equals modularity of the returned partition
    CHECK(a.q == doctest::Approx(modularity(g, a.partition)).epsilon(1e-9));

    // Q non-decreasing across levels
    for (std::size_t l = 1; l < a.level_q.size(); ++l) {
      CHECK(a.level_q[l] >= a.level_q[l - 1] - 1e-9);
    }
    CHECK(a.q <= best_partition_q(g) + 1e-9);
  }
}

TEST_CASE("louvain: disjoint-clique family hits the exhaustive optimum") {
  Rng rng(5150);
  for (int rep = 0; rep < 10; ++rep) {
    // 2-3 cliques of size 2-3 over at most 8 nodes
    std::vector<std::vector<int>> papers;
    int next = 0;
    const int n_cliques = 2 + static_cast<int>(rng.below(2));
    for (int c = 0; c < n_cliques; ++c) {
      std::vector<int> clique;
      const int size = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < size; ++i) clique.push_back(next++);
      papers.push_back(clique);
    }
    const auto g = build_graph(papers);
    const auto result = louvain(g, 42 + rep);
    CHECK(result.q >= best_partition_q(g) - 1e-9);
    CHECK(result.q <= best_partition_q(g) + 1e-9);
  }
}

TEST_CASE("subgraph keeps only edges inside the node set") {
  const auto g = build_graph({{1, 2, 3}, {3, 4}});
  const auto sub = subgraph(g, {1, 2, 4});
  CHECK(sub.node_ids == std::vector<int>{1, 2, 4});
  CHECK(sub.edge_count() == 1);  // only 1-2 survives
  CHECK(sub.m == doctest::Approx(1.0));
}

TEST_CASE("louvain rejects empty graphs") {
  CHECK_THROWS_AS(louvain(build_graph({{9}}), 1), ValidationError);
}
