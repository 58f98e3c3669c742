#include "proxkit/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxkit/config.hpp"
#include "proxkit/rng.hpp"
#include "proxkit/types.hpp"
#include "proxkit/util.hpp"

namespace proxkit {

using nlohmann::json;

void FixtureSpec::validate() const {
  if (year_min > year_max) throw ValidationError("fixture: empty year range");
  if (academic_per_year < 0 || industry_per_year < 0 || cooperation_per_year < 0 ||
      excluded_per_year < 0) {
    throw ValidationError("fixture: negative paper count");
  }
  if (mentions_per_paper > 0 && vocab == 0) {
    throw ValidationError("fixture: mentions requested but vocabulary is empty");
  }
  if (surface_variants < 1 || surface_variants > 3) {
    throw ValidationError("fixture: surface_variants must be 1..3");
  }
  if (embedding_dim < 2) throw ValidationError("fixture: embedding_dim must be at least 2");
  if (refs_min < 0 || refs_max < refs_min) throw ValidationError("fixture: bad reference range");
  if (plant_regression && industry_per_year < 1) {
    throw ValidationError("fixture: regression planting needs industry anchors every year");
  }
}

namespace {

struct Paper {
  std::string id;
  int year;
  PaperType type;
  std::string title;
  std::string abstract;
  std::vector<Affiliation> affiliations;
  bool treated = false;
  bool has_embedding = false;
  std::vector<float> embedding;
  int n_refs = 0;
  std::array<long, 3> ref_counts{0, 0, 0};  // A/I/C
  long ref_excluded = 0;
};

std::string stem(Rng& rng, std::size_t len) {
  static const char* alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(26)];
  return s;
}

std::size_t levenshtein_plain(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, prev[j] + (a[i] == b[j] ? 0 : 1)});
    }
    prev.swap(cur);
  }
  return prev[b.size()];
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

FixturePaths gen_fixture(const FixtureSpec& spec, uint64_t seed,
                         const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  Rng rng(seed);

  // entity concepts: 20-char base names kept pairwise far apart so only the
  // planted variants can cluster
  std::vector<std::string> concepts;
  while (concepts.size() < spec.vocab) {
    const std::string candidate = stem(rng, 10) + "-" + stem(rng, 9);
    bool ok = true;
    for (const auto& existing : concepts) {
      if (levenshtein_plain(candidate, existing) < 6) {
        ok = false;
        break;
      }
    }
    if (ok) concepts.push_back(candidate);
  }
  auto concept_class = [](std::size_t c) { return kEntityClasses[c % 4]; };
  auto concept_surface = [&concepts](std::size_t c, int variant) {
    std::string s = concepts[c];
    if (variant == 1) return s + "s";             // edit distance 1: joins in phase 1
    if (variant == 2) return s.substr(0, s.size() - 2) + "qz";  // distance 2: phase 2
    return s;
  };

  // papers
  std::vector<Paper> papers;
  int counter = 0;
  std::map<int, double> year_effects;
  {
    Rng year_rng(seed ^ 0xabcdef1234567890ULL);
    for (int y = spec.year_min; y <= spec.year_max; ++y) {
      year_effects[y] = spec.year_effect_scale * (2.0 * year_rng.unit() - 1.0);
    }
  }

  for (int y = spec.year_min; y <= spec.year_max; ++y) {
    struct TypePlan {
      PaperType type;
      int count;
    };
    const TypePlan plans[] = {{PaperType::Academic, spec.academic_per_year},
                              {PaperType::Industry, spec.industry_per_year},
                              {PaperType::Cooperation, spec.cooperation_per_year},
                              {PaperType::Excluded, spec.excluded_per_year}};
    for (const auto& plan : plans) {
      for (int i = 0; i < plan.count; ++i) {
        Paper p;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "p%06d", counter++);
        p.id = buf;
        p.year = y;
        p.type = plan.type;

        const int n_auth = 1 + static_cast<int>(rng.below(4));
        auto add_author = [&](int idx, const char* pool, const char* category) {
          char inst[16];
          std::snprintf(inst, sizeof(inst), "%s%02d", pool, static_cast<int>(rng.below(8)));
          p.affiliations.push_back({idx, inst, category});
        };
        switch (plan.type) {
          case PaperType::Academic:
            for (int a = 0; a < n_auth; ++a) add_author(a, "edu_", "education");
            break;
          case PaperType::Industry:
            for (int a = 0; a < n_auth; ++a) add_author(a, "com_", "company");
            break;
          case PaperType::Cooperation: {
            const int total = std::max(2, n_auth);
            add_author(0, "edu_", "education");
            add_author(1, "com_", "company");
            for (int a = 2; a < total; ++a) {
              add_author(a, rng.below(2) == 0 ? "edu_" : "com_",
                         rng.below(2) == 0 ? "education" : "company");
            }
            break;
          }
          case PaperType::Excluded:
            for (int a = 0; a < n_auth; ++a) add_author(a, "gov_", "government");
            break;
        }

        p.n_refs = spec.refs_min + static_cast<int>(rng.below(
                                       static_cast<uint64_t>(spec.refs_max - spec.refs_min + 1)));
        p.title = "study " + p.id + " of " + concepts[rng.below(spec.vocab)];
        p.abstract = "results for " + concepts[rng.below(spec.vocab)] + " against " +
                     concepts[rng.below(spec.vocab)];
        papers.push_back(std::move(p));
      }
    }
  }

  // treatment (hardware term in the title)
  const double mid_refs = (spec.refs_min + spec.refs_max) / 2.0;
  for (auto& p : papers) {
    if (p.type == PaperType::Excluded) continue;
    double treat_p = 0.08;
    if (spec.plant_confounding) {
      std::set<int> authors;
      std::set<std::string> insts;
      for (const auto& a : p.affiliations) {
        authors.insert(a.author_index);
        insts.insert(a.institution_id);
      }
      // assignment loads on every covariate hard enough that each pre-match
      // SMD clears the post-match noise floor, while the treated share stays
      // small enough that 1:5 matching keeps donor headroom
      treat_p = sigmoid(-4.0 + 0.20 * (p.year - spec.year_min) +
                        0.35 * (static_cast<double>(authors.size()) - 2.5) +
                        0.40 * (static_cast<double>(insts.size()) - 1.5) +
                        0.16 * (p.n_refs - mid_refs));
    }
    if (rng.unit() < treat_p) {
      p.treated = true;
      p.title += " on gpu clusters";
    }
  }

  // references
  std::string citations = "citing_id,cited_key,cited_year,cited_category\n";
  long ext_counter = 0;
  for (auto& p : papers) {
    if (spec.plant_regression && p.type == PaperType::Industry) {
      p.n_refs = 0;  // anchors stay out of the regression sample (no HHI)
      continue;
    }
    std::array<double, 3> dist{};
    if (spec.institution_blind) {
      dist = {0.5, 0.3, 0.2};
    } else if (spec.plant_confounding && p.type != PaperType::Excluded) {
      const double acad =
          p.treated ? spec.treated_academic_share : spec.control_academic_share;
      dist = {acad, (1.0 - acad) * 0.6, (1.0 - acad) * 0.4};
    } else {
      const std::size_t row = p.type == PaperType::Excluded
                                  ? 0
                                  : static_cast<std::size_t>(p.type);
      dist = spec.cite_dist[row];
    }
    bool all_academic = false;
    if (spec.plant_regression && p.type == PaperType::Academic) {
      all_academic = rng.unit() < 0.5;  // bimodal HHI: 1 vs roughly 1/3
    }
    for (int r = 0; r < p.n_refs; ++r) {
      PaperType cited;
      if (rng.unit() < spec.excluded_ref_rate && !spec.plant_regression) {
        cited = PaperType::Excluded;
      } else if (all_academic) {
        cited = PaperType::Academic;
      } else {
        const double u = rng.unit();
        const double total = dist[0] + dist[1] + dist[2];
        if (u < dist[0] / total) cited = PaperType::Academic;
        else if (u < (dist[0] + dist[1]) / total) cited = PaperType::Industry;
        else cited = PaperType::Cooperation;
      }
      if (cited == PaperType::Excluded) ++p.ref_excluded;
      else ++p.ref_counts[static_cast<std::size_t>(cited)];
      char key[24];
      std::snprintf(key, sizeof(key), "ext_%08ld", ext_counter++);
      const int cited_year = p.year - static_cast<int>(rng.below(6));
      citations += p.id + "," + key + "," + std::to_string(cited_year) + "," +
                   std::string(to_string(cited)) + "\n";
    }
  }

  // embeddings
  for (auto& p : papers) {
    if (spec.plant_regression) {
      if (p.type == PaperType::Industry) {
        p.embedding.assign(spec.embedding_dim, 0.0f);
        p.embedding[0] = 1.0f;  // shared per-year anchor direction
        p.has_embedding = true;
      } else if (p.type == PaperType::Academic) {
        const long classified = p.ref_counts[0] + p.ref_counts[1] + p.ref_counts[2];
        double hhi = 0.0;
        for (long c : p.ref_counts) {
          const double share = static_cast<double>(c) / static_cast<double>(classified);
          hhi += share * share;
        }
        std::set<int> authors;
        std::set<std::string> insts;
        for (const auto& a : p.affiliations) {
          authors.insert(a.author_index);
          insts.insert(a.institution_id);
        }
        const double s = spec.alpha + spec.beta_hhi * hhi +
                         spec.beta_ln_inst * std::log(static_cast<double>(insts.size())) +
                         spec.beta_ln_auth * std::log(static_cast<double>(authors.size())) +
                         spec.beta_ln_ref * std::log(static_cast<double>(p.n_refs)) +
                         year_effects[p.year] + spec.noise_sigma * rng.normal();
        const double clamped = std::clamp(s, -0.999, 0.999);
        p.embedding.assign(spec.embedding_dim, 0.0f);
        p.embedding[0] = static_cast<float>(clamped);
        p.embedding[1] = static_cast<float>(std::sqrt(1.0 - clamped * clamped));
        p.has_embedding = true;
      }
    } else {
      if (rng.unit() < 0.05) continue;  // a few papers stay unembedded
      p.embedding.resize(spec.embedding_dim);
      for (auto& v : p.embedding) v = static_cast<float>(rng.normal());
      p.has_embedding = true;
    }
  }

  // entity mentions
  std::string entities;
  for (const auto& p : papers) {
    for (int m = 0; m < spec.mentions_per_paper; ++m) {
      json obj;
      const double special = rng.unit();
      if (special < 0.03) {
        obj["surface"] = "model";  // stoplisted
        obj["class"] = "method";
      } else if (special < 0.05) {
        obj["surface"] = "NLP";  // expands, then stoplisted
        obj["class"] = "method";
      } else {
        const std::size_t c = rng.below(spec.vocab);
        const int variant = static_cast<int>(rng.below(static_cast<uint64_t>(spec.surface_variants)));
        obj["surface"] = concept_surface(c, variant);
        obj["class"] = std::string(to_string(concept_class(c)));
      }
      obj["paper_id"] = p.id;
      entities += obj.dump();
      entities += '\n';
    }
  }

  // serialize papers
  std::string papers_jsonl;
  for (const auto& p : papers) {
    json obj;
    obj["paper_id"] = p.id;
    obj["year"] = p.year;
    obj["title"] = p.title;
    obj["abstract"] = p.abstract;
    json affs = json::array();
    for (const auto& a : p.affiliations) {
      affs.push_back({{"author_index", a.author_index},
                      {"institution_id", a.institution_id},
                      {"category", a.category}});
    }
    obj["affiliations"] = affs;
    papers_jsonl += obj.dump();
    papers_jsonl += '\n';
  }

  std::string embeddings = "paper_id";
  for (std::size_t d = 0; d < spec.embedding_dim; ++d) embeddings += ",d" + std::to_string(d);
  embeddings += '\n';
  for (const auto& p : papers) {
    if (!p.has_embedding) continue;
    embeddings += p.id;
    for (float v : p.embedding) {
      embeddings += ',';
      embeddings += format_double(static_cast<double>(v));
    }
    embeddings += '\n';
  }

  FixturePaths paths;
  paths.papers = out_dir / "papers.jsonl";
  paths.entities = out_dir / "entities.jsonl";
  paths.embeddings = out_dir / "embeddings.csv";
  paths.citations = out_dir / "citations.csv";
  paths.abbreviations = out_dir / "abbrev.txt";
  paths.stoplist = out_dir / "stoplist.txt";
  paths.config = out_dir / "config.toml";
  paths.truth = out_dir / "truth.json";

  write_file(paths.papers, papers_jsonl);
  write_file(paths.entities, entities);
  write_file(paths.embeddings, embeddings);
  write_file(paths.citations, citations);
  write_file(paths.abbreviations, "nlp => natural language processing\n");
  write_file(paths.stoplist, "model\nnatural language processing\n");

  std::string config;
  config += "[paths]\n";
  config += "papers = \"papers.jsonl\"\n";
  config += "entities = \"entities.jsonl\"\n";
  config += "embeddings = \"embeddings.csv\"\n";
  config += "citations = \"citations.csv\"\n";
  config += "abbreviations = \"abbrev.txt\"\n";
  config += "stoplist = \"stoplist.txt\"\n";
  config += "output = \"out\"\n\n";
  config += "[corpus]\n";
  config += "year_min = " + std::to_string(spec.year_min) + "\n";
  config += "year_max = " + std::to_string(spec.year_max) + "\n\n";
  config += "[normalize]\n";
  config += "same_cluster_sim = 0.95\n";
  config += "merge_avg_sim = 0.8\n";
  config += "min_annual_freq = 3\n\n";
  config += "[semantic]\n";
  config += "quantile = 0.9\n\n";
  config += "[network]\n";
  config += "louvain_seed = " + std::to_string(seed) + "\n\n";
  config += "[stability]\n";
  config += "seed = " + std::to_string(seed + 1) + "\n";
  config += "repetitions = 10\n\n";
  config += "[psm]\n";
  config += "ratios = [3, 5]\n";
  config += "seed = " + std::to_string(seed + 2) + "\n\n";
  config += "[run]\n";
  config += "seed = " + std::to_string(seed) + "\n";
  config += "workers = 1\n";
  write_file(paths.config, config);

  json truth;
  truth["seed"] = seed;
  truth["papers"] = papers.size();
  truth["year_min"] = spec.year_min;
  truth["year_max"] = spec.year_max;
  truth["vocab"] = spec.vocab;
  truth["institution_blind"] = spec.institution_blind;
  if (spec.plant_regression) {
    truth["regression"] = {{"alpha", spec.alpha},
                           {"beta_hhi", spec.beta_hhi},
                           {"beta_ln_institutions", spec.beta_ln_inst},
                           {"beta_ln_authors", spec.beta_ln_auth},
                           {"beta_ln_references", spec.beta_ln_ref},
                           {"noise_sigma", spec.noise_sigma}};
    json ye = json::object();
    for (const auto& [y, g] : year_effects) ye[std::to_string(y)] = g;
    truth["year_effects"] = ye;
  }
  if (spec.plant_confounding) {
    std::size_t treated = 0;
    for (const auto& p : papers) treated += p.treated ? 1 : 0;
    truth["psm"] = {{"treated", treated},
                    {"treated_academic_share", spec.treated_academic_share},
                    {"control_academic_share", spec.control_academic_share}};
  }
  write_file(paths.truth, truth.dump(2) + "\n");
  return paths;
}

FixtureSpec fixture_spec_from_toml(const std::filesystem::path& path) {
  const TomlTable t = parse_toml_file(path);
  FixtureSpec s;
  s.year_min = static_cast<int>(t.get_int_or("fixture.year_min", s.year_min));
  s.year_max = static_cast<int>(t.get_int_or("fixture.year_max", s.year_max));
  s.academic_per_year =
      static_cast<int>(t.get_int_or("fixture.academic_per_year", s.academic_per_year));
  s.industry_per_year =
      static_cast<int>(t.get_int_or("fixture.industry_per_year", s.industry_per_year));
  s.cooperation_per_year =
      static_cast<int>(t.get_int_or("fixture.cooperation_per_year", s.cooperation_per_year));
  s.excluded_per_year =
      static_cast<int>(t.get_int_or("fixture.excluded_per_year", s.excluded_per_year));
  s.vocab = static_cast<std::size_t>(t.get_int_or("fixture.vocab", static_cast<int64_t>(s.vocab)));
  s.surface_variants =
      static_cast<int>(t.get_int_or("fixture.surface_variants", s.surface_variants));
  s.mentions_per_paper =
      static_cast<int>(t.get_int_or("fixture.mentions_per_paper", s.mentions_per_paper));
  s.embedding_dim = static_cast<std::size_t>(
      t.get_int_or("fixture.embedding_dim", static_cast<int64_t>(s.embedding_dim)));
  s.refs_min = static_cast<int>(t.get_int_or("fixture.refs_min", s.refs_min));
  s.refs_max = static_cast<int>(t.get_int_or("fixture.refs_max", s.refs_max));
  s.excluded_ref_rate = t.get_double_or("fixture.excluded_ref_rate", s.excluded_ref_rate);
  s.institution_blind = t.get_bool_or("fixture.institution_blind", s.institution_blind);
  s.plant_regression = t.get_bool_or("fixture.plant_regression", s.plant_regression);
  s.alpha = t.get_double_or("fixture.alpha", s.alpha);
  s.beta_hhi = t.get_double_or("fixture.beta_hhi", s.beta_hhi);
  s.noise_sigma = t.get_double_or("fixture.noise_sigma", s.noise_sigma);
  s.plant_confounding = t.get_bool_or("fixture.plant_confounding", s.plant_confounding);
  return s;
}

}  // namespace proxkit
