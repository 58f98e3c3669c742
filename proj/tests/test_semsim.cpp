#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxkit/rng.hpp"
#include "proxkit/semsim.hpp"
#include "proxkit/stats.hpp"
#include "testutil.hpp"

using namespace proxkit;
using testutil::CorpusBuilder;

namespace {

std::vector<float> vecf(std::initializer_list<double> values) {
  std::vector<float> out;
  for (double v : values) out.push_back(static_cast<float>(v));
  return out;
}

}  // namespace

TEST_CASE("cosine_embedding: pinned examples and errors") {
  const auto a = vecf({1, 2, 3});
  const auto b = vecf({3, 2, 1});
  CHECK(cosine_embedding(a, a) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(cosine_embedding(a, b) == doctest::Approx(10.0 / 14.0).epsilon(1e-7));
  CHECK(cosine_embedding(vecf({1, 0}), vecf({0, 1})) == 0.0);
  CHECK_THROWS_AS(cosine_embedding(vecf({1, 0}), vecf({1, 0, 0})), ValidationError);
  CHECK_THROWS_AS(cosine_embedding(vecf({0, 0}), vecf({1, 0})), ValidationError);
}

TEST_CASE("cosine_embedding: symmetry, scale invariance, clamping") {
  Rng rng(88);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<float> a(16);
    std::vector<float> b(16);
    for (auto& x : a) x = static_cast<float>(rng.normal());
    for (auto& x : b) x = static_cast<float>(rng.normal());
    const double ab = cosine_embedding(a, b);
    CHECK(ab == cosine_embedding(b, a));
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
    std::vector<float> a5(a);
    for (auto& x : a5) x *= 5.0f;
    CHECK(cosine_embedding(a5, b) == doctest::Approx(ab).epsilon(1e-6));
  }
}

TEST_CASE("paper_score: quantile of opposing similarities") {
  // opposing vectors arranged so the similarities are 0.1, 0.2, ..., 1.0
  const std::vector<float> focal = vecf({1, 0});
  std::vector<std::vector<float>> storage;
  for (int i = 1; i <= 10; ++i) {
    const double c = i / 10.0;
    storage.push_back(vecf({c, std::sqrt(1.0 - c * c)}));
  }
  std::vector<std::span<const float>> opposing;
  for (const auto& v : storage) opposing.emplace_back(v.data(), v.size());

  CHECK(paper_score(focal, opposing, 0.9) == doctest::Approx(0.91).epsilon(1e-6));
  CHECK(paper_score(focal, {opposing[3]}, 0.9) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK_THROWS_AS(paper_score(focal, {}, 0.9), ValidationError);

  // constant similarities collapse to that constant for any q
  std::vector<std::span<const float>> same(5, opposing[6]);
  for (double q : {0.1, 0.5, 0.9}) {
    CHECK(paper_score(focal, same, q) == doctest::Approx(0.7).epsilon(1e-6));
  }

  // monotone in q
  double prev = -2.0;
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double s = paper_score(focal, opposing, q);
    CHECK(s >= prev - 1e-12);
    prev = s;
  }
}

TEST_CASE("global_threshold: identical cross pairs and error cases") {
  {
    CorpusBuilder b;
    b.paper("a1", 2020, PaperType::Academic).embedding("a1", vecf({1, 0}));
    b.paper("a2", 2020, PaperType::Academic).embedding("a2", vecf({2, 0}));
    b.paper("i1", 2020, PaperType::Industry).embedding("i1", vecf({0.5, 0}));
    const Corpus c = b.build();
    CHECK(global_threshold(c, 0.9) == doctest::Approx(1.0).epsilon(1e-7));
  }
  {
    CorpusBuilder b;
    b.paper("a1", 2020, PaperType::Academic).embedding("a1", vecf({1, 0}));
    const Corpus c = b.build();
    CHECK_THROWS_AS(global_threshold(c, 0.9), ValidationError);
  }
}

TEST_CASE("global_threshold: same-year switch changes the pair set") {
  CorpusBuilder b;
  b.paper("a1", 2019, PaperType::Academic).embedding("a1", vecf({1, 0}));
  b.paper("i1", 2019, PaperType::Industry).embedding("i1", vecf({1, 0}));      // same-year sim 1
  b.paper("i2", 2020, PaperType::Industry).embedding("i2", vecf({0, 1}));      // cross-year sim 0
  const Corpus c = b.build();
  CHECK(global_threshold(c, 0.5, true) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(global_threshold(c, 0.5, false) == doctest::Approx(0.5).epsilon(1e-7));
}

namespace {

/// Exhaustive reference for one proportion cell.
std::optional<double> proportion_cell_oracle(const Corpus& c, Sector side, int y1, int y2,
                                             double threshold, double q) {
  const PaperType focal_type =
      side == Sector::Academic ? PaperType::Academic : PaperType::Industry;
  const PaperType target_type =
      side == Sector::Academic ? PaperType::Industry : PaperType::Academic;
  std::vector<std::size_t> focal;
  std::vector<std::size_t> target;
  for (std::size_t i = 0; i < c.papers.size(); ++i) {
    if (!c.papers[i].has_embedding) continue;
    if (c.papers[i].type == focal_type && c.papers[i].year == y1) focal.push_back(i);
    if (c.papers[i].type == target_type && c.papers[i].year == y2) target.push_back(i);
  }
  if (focal.empty() || target.empty()) return std::nullopt;
  int over = 0;
  for (std::size_t f : focal) {
    std::vector<double> sims;
    for (std::size_t t : target) sims.push_back(cosine_embedding(c.embedding(f), c.embedding(t)));
    const double score = sims.size() == 1 ? sims[0] : stats::quantile(sims, q);
    if (score > threshold) ++over;
  }
  return static_cast<double>(over) / static_cast<double>(focal.size());
}

Corpus random_embedded_corpus(Rng& rng, int papers_per_cell, std::size_t dim) {
  CorpusBuilder b;
  int counter = 0;
  for (int year : {2019, 2020, 2021}) {
    for (PaperType t : {PaperType::Academic, PaperType::Industry}) {
      for (int i = 0; i < papers_per_cell; ++i) {
        const std::string id = (t == PaperType::Academic ? "a" : "i") + std::to_string(counter++);
        b.paper(id, year, t);
        std::vector<float> v(dim);
        for (auto& x : v) x = static_cast<float>(rng.normal());
        b.embedding(id, std::move(v));
      }
    }
  }
  return b.build();
}

}  // namespace

TEST_CASE("proportion_matrix: threshold extremes and missing cells") {
  Rng rng(31);
  const Corpus c = random_embedded_corpus(rng, 4, 6);

  const auto all = proportion_matrix(c, Sector::Academic, -1.0, 0.9, 2019, 2021);
  const auto none = proportion_matrix(c, Sector::Academic, 1.0, 0.9, 2019, 2021);
  for (std::size_t i = 0; i < all.values.size(); ++i) {
    for (std::size_t j = 0; j < all.values[i].size(); ++j) {
      REQUIRE(all.values[i][j].has_value());
      CHECK(*all.values[i][j] == 1.0);  // every score beats -1
      CHECK(*none.values[i][j] == 0.0);  // strict inequality at 1
    }
  }

  // a year with no focal papers yields missing cells, not zeros
  const auto wide = proportion_matrix(c, Sector::Academic, 0.0, 0.9, 2018, 2021);
  CHECK_FALSE(wide.values[0][1].has_value());
  CHECK(wide.denominators[0][1] == 0);
}

TEST_CASE("proportion_matrix: exhaustive oracle equivalence, antitone in threshold") {
  Rng rng(17);
  const Corpus c = random_embedded_corpus(rng, 5, 8);

  for (Sector side : {Sector::Academic, Sector::Industry}) {
    const auto m = proportion_matrix(c, side, 0.1, 0.9, 2019, 2021);
    for (std::size_t i = 0; i < m.focal_years.size(); ++i) {
      for (std::size_t j = 0; j < m.target_years.size(); ++j) {
        const auto expected = proportion_cell_oracle(c, side, m.focal_years[i],
                                                     m.target_years[j], 0.1, 0.9);
        REQUIRE(m.values[i][j].has_value() == expected.has_value());
        if (expected) CHECK(*m.values[i][j] == doctest::Approx(*expected).epsilon(1e-12));
      }
    }

    const auto higher = proportion_matrix(c, side, 0.4, 0.9, 2019, 2021);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      for (std::size_t j = 0; j < m.values[i].size(); ++j) {
        CHECK(*higher.values[i][j] <= *m.values[i][j] + 1e-15);
      }
    }
  }
}

TEST_CASE("proportion_matrix: worker count does not change results") {
  Rng rng(99);
  const Corpus c = random_embedded_corpus(rng, 6, 8);
  const auto one = proportion_matrix(c, Sector::Industry, 0.2, 0.9, 2019, 2021, 1);
  const auto four = proportion_matrix(c, Sector::Industry, 0.2, 0.9, 2019, 2021, 4);
  for (std::size_t i = 0; i < one.values.size(); ++i) {
    for (std::size_t j = 0; j < one.values[i].size(); ++j) {
      CHECK(one.values[i][j] == four.values[i][j]);
    }
  }
}

TEST_CASE("top_pairs_export: argmax against brute force") {
  CorpusBuilder b;
  b.paper("a1", 2021, PaperType::Academic).embedding("a1", vecf({1, 0, 0}));
  b.paper("a2", 2021, PaperType::Academic).embedding("a2", vecf({0, 1, 0}));
  b.paper("i1", 2019, PaperType::Industry).embedding("i1", vecf({0.9, 0.1, 0}));
  b.paper("i2", 2020, PaperType::Industry).embedding("i2", vecf({0.1, 0.9, 0}));
  b.paper("i3", 2021, PaperType::Industry).embedding("i3", vecf({1, 0, 0}));
  const Corpus c = b.build();

  // i3 is excluded by max_target_year=2020; a1 matches i1, a2 matches i2
  const auto pairs = top_pairs_export(c, 2021, Sector::Academic, 10, 2020);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) {
    CHECK(p.match_year <= 2020);
    double best = -2.0;
    std::string best_id;
    for (const char* cand : {"i1", "i2"}) {
      const double s = cosine_embedding(c.embedding_of(p.focal_id), c.embedding_of(cand));
      if (s > best) {
        best = s;
        best_id = cand;
      }
    }
    CHECK(p.match_id == best_id);
    CHECK(p.similarity == doctest::Approx(best).epsilon(1e-9));
  }
  // k smaller than candidates trims the list by similarity
  const auto top1 = top_pairs_export(c, 2021, Sector::Academic, 1, 2020);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].similarity >= pairs[1].similarity);

  // single opposing paper is everyone's match
  const auto only = top_pairs_export(c, 2021, Sector::Academic, 10, 2019);
  for (const auto& p : only) CHECK(p.match_id == "i1");
}

TEST_CASE("same_year_scores: skipped papers are counted") {
  CorpusBuilder b;
  b.paper("a1", 2019, PaperType::Academic).embedding("a1", vecf({1, 0}));
  b.paper("a2", 2020, PaperType::Academic).embedding("a2", vecf({1, 0}));
  b.paper("i1", 2019, PaperType::Industry).embedding("i1", vecf({0.6, 0.8}));
  const Corpus c = b.build();
  std::size_t skipped = 0;
  const auto scores = same_year_scores(c, Sector::Academic, 0.9, &skipped);
  CHECK(scores.size() == 1);
  CHECK(skipped == 1);  // a2 has no same-year industry counterpart
  CHECK(scores.at("a1") == doctest::Approx(0.6).epsilon(1e-6));
}
