#include "proxkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "proxkit/citeflow.hpp"
#include "proxkit/coocnet.hpp"
#include "proxkit/entsim.hpp"
#include "proxkit/kernels.hpp"
#include "proxkit/semsim.hpp"
#include "proxkit/stats.hpp"
#include "proxkit/studies.hpp"
#include "proxkit/util.hpp"

namespace proxkit {

using nlohmann::json;

namespace {

int log_level() {
  const char* env = std::getenv("PROXKIT_LOG");
  if (env == nullptr) return 1;
  const std::string v = to_lower(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "proxkit: %s\n", msg.c_str());
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

double normal_two_sided_p(double statistic, double se) {
  if (se <= 0.0) return 1.0;
  const double z = std::abs(statistic / se);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

Pipeline::Pipeline(RunConfig config, StepOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  manifest_.config_digest = hex64(fnv1a64(config_.config_text));
}

const Corpus& Pipeline::corpus() {
  if (!corpus_) {
    corpus_ = load_corpus(config_.papers, config_.entities, config_.embeddings,
                          config_.citations, config_.corpus, &load_report_);
    log_info("corpus: " + std::to_string(corpus_->papers.size()) + " papers, " +
             std::to_string(corpus_->mentions.size()) + " mentions, " +
             std::to_string(corpus_->citations.size()) + " references");
    for (const auto& w : load_report_.warnings) log_info("warning: " + w);
  }
  return *corpus_;
}

const NormalizedEntities& Pipeline::normalized() {
  if (!normalized_) {
    normalized_ = normalize(corpus().mentions, config_.normalization_config());
    log_info("normalize: " + std::to_string(normalized_->clusters.size()) + " entities (" +
             std::to_string(normalized_->report.clusters_before_prune) + " before pruning)");
  }
  return *normalized_;
}

void Pipeline::emit(const std::string& step, const std::filesystem::path& file) {
  manifest_.add_output(step, config_.output, file);
}

namespace {

json base_params(const RunConfig& config) {
  json p;
  p["version"] = kToolkitVersion;
  p["config_digest"] = hex64(fnv1a64(config.config_text));
  p["seed"] = config.master_seed;
  p["quantile_rule"] = "linear-interpolation (type 7)";
  return p;
}

}  // namespace

void Pipeline::step_validate() {
  const Corpus& c = corpus();
  const auto counts = c.type_counts();

  json doc;
  doc["papers_loaded"] = load_report_.papers_loaded;
  doc["papers_dropped_year"] = load_report_.papers_dropped_year;
  doc["mentions_loaded"] = load_report_.mentions_loaded;
  doc["mentions_dropped_dangling"] = load_report_.mentions_dropped_dangling;
  doc["embeddings_loaded"] = load_report_.embeddings_loaded;
  doc["embeddings_dropped_dangling"] = load_report_.embeddings_dropped_dangling;
  doc["citations_loaded"] = load_report_.citations_loaded;
  doc["citations_dropped_dangling"] = load_report_.citations_dropped_dangling;
  doc["citations_dropped_order"] = load_report_.citations_dropped_order;
  doc["total_dropped"] = load_report_.total_dropped();
  doc["embedding_dim"] = c.embedding_dim;
  doc["type_counts"] = {{"academic", counts.at(PaperType::Academic)},
                        {"industry", counts.at(PaperType::Industry)},
                        {"cooperation", counts.at(PaperType::Cooperation)},
                        {"excluded", counts.at(PaperType::Excluded)}};
  doc["warnings"] = load_report_.warnings;

  const auto path = config_.output / "validate_report.json";
  write_file(path, doc.dump(2) + "\n");
  emit("validate", path);
}

void Pipeline::step_normalize() {
  const auto& n = normalized();
  const auto path = config_.output / "entities_normalized.jsonl";
  write_clusters_jsonl(path, n.clusters);
  emit("normalize", path);

  json report;
  report["mentions_in"] = n.report.mentions_in;
  report["mentions_filtered"] = n.report.mentions_filtered;
  report["clusters_before_prune"] = n.report.clusters_before_prune;
  report["clusters_after_prune"] = n.report.clusters_after_prune;
  report["mentions_out"] = n.report.mentions_out;
  report["same_cluster_sim"] = config_.same_cluster_sim;
  report["merge_avg_sim"] = config_.merge_avg_sim;
  report["min_annual_freq"] = config_.min_annual_freq;
  const auto rpath = config_.output / "normalize_report.json";
  write_file(rpath, report.dump(2) + "\n");
  emit("normalize", rpath);
}

namespace {

std::string matrix_csv(const std::vector<int>& row_years, const std::vector<int>& col_years,
                       const std::vector<std::vector<double>>& values) {
  std::string out = "year";
  for (int y : col_years) out += "," + std::to_string(y);
  out += '\n';
  for (std::size_t i = 0; i < row_years.size(); ++i) {
    out += std::to_string(row_years[i]);
    for (std::size_t j = 0; j < col_years.size(); ++j) {
      out += "," + format_double(values[i][j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void Pipeline::step_entity_sim() {
  const Corpus& c = corpus();
  const auto& n = normalized();
  const YearRange range{config_.corpus.year_min, config_.corpus.year_max};

  struct Filter {
    std::string name;
    std::optional<EntityClass> cls;
  };
  std::vector<Filter> filters = {{"all", std::nullopt},
                                 {"method", EntityClass::Method},
                                 {"tool", EntityClass::Tool},
                                 {"dataset", EntityClass::Dataset},
                                 {"metric", EntityClass::Metric}};
  if (options_.entity_class) {
    const std::string wanted = to_lower(*options_.entity_class);
    std::erase_if(filters, [&](const Filter& f) { return f.name != wanted; });
    if (filters.empty()) {
      throw ConfigError("--class", "unknown entity class '" + *options_.entity_class + "'");
    }
  }

  for (const auto& filter : filters) {
    const auto m = similarity_matrix(c, n, range, Sector::Industry, range, Sector::Academic,
                                     filter.cls, config_.entity_dedup_per_paper);
    const auto path = config_.output / ("entity_sim_" + filter.name + ".csv");
    write_file(path, matrix_csv(m.row_years, m.col_years, m.values));
    emit("entity-sim", path);

    json params = base_params(config_);
    params["row_side"] = "industry";
    params["col_side"] = "academic";
    params["class_filter"] = filter.name;
    params["count_unit"] = config_.entity_dedup_per_paper ? "papers" : "mentions";
    const auto meta = config_.output / ("entity_sim_" + filter.name + ".meta.json");
    write_file(meta, params.dump(2) + "\n");
    emit("entity-sim", meta);
  }

  if (!options_.entity_class) {
    std::vector<int> empty_years;
    const auto share = collaboration_share(c, &empty_years);
    std::string csv = "year,collaboration_share\n";
    for (const auto& [year, value] : share) {
      csv += std::to_string(year) + "," + format_double(value) + "\n";
    }
    const auto path = config_.output / "collab_share.csv";
    write_file(path, csv);
    emit("entity-sim", path);
    if (!empty_years.empty()) {
      log_info("collab-share: " + std::to_string(empty_years.size()) +
               " year(s) without classified papers omitted");
    }
  }
}

void Pipeline::step_semantic_sim() {
  const Corpus& c = corpus();
  double threshold;
  if (config_.semantic_threshold) {
    threshold = *config_.semantic_threshold;
  } else {
    threshold = global_threshold(c, config_.semantic_q, config_.same_year_only);
    log_info("semantic threshold (q=" + format_double(config_.semantic_q) +
             "): " + format_double(threshold));
  }

  for (Sector side : {Sector::Academic, Sector::Industry}) {
    const auto m = proportion_matrix(c, side, threshold, config_.semantic_q,
                                     config_.corpus.year_min, config_.corpus.year_max,
                                     config_.workers);
    std::string csv = "year";
    for (int y : m.target_years) csv += "," + std::to_string(y);
    csv += '\n';
    for (std::size_t i = 0; i < m.focal_years.size(); ++i) {
      csv += std::to_string(m.focal_years[i]);
      for (std::size_t j = 0; j < m.target_years.size(); ++j) {
        csv += "," + opt_field(m.values[i][j]);
      }
      csv += '\n';
    }
    const std::string name =
        side == Sector::Academic ? "semantic_prop_academic" : "semantic_prop_industry";
    const auto path = config_.output / (name + ".csv");
    write_file(path, csv);
    emit("semantic-sim", path);

    json params = base_params(config_);
    params["focal_side"] = std::string(to_string(side));
    params["threshold"] = threshold;
    params["threshold_source"] = config_.semantic_threshold ? "config" : "computed";
    params["q"] = config_.semantic_q;
    params["same_year_only"] = config_.same_year_only;
    params["missing_cells"] = "empty fields";
    params["denominator"] = "embedded focal papers of the focal year";
    params["kernel_backend"] = std::string(kernels::backend());
    const auto meta = config_.output / (name + ".meta.json");
    write_file(meta, params.dump(2) + "\n");
    emit("semantic-sim", meta);
  }

  // best earlier-industry match per focal academic paper of the last year
  const int focal_year = config_.corpus.year_max;
  const auto pairs = top_pairs_export(c, focal_year, Sector::Academic, 50, focal_year);
  std::string csv = "focal_id,match_id,similarity,match_year\n";
  for (const auto& p : pairs) {
    csv += csv_escape(p.focal_id) + "," + csv_escape(p.match_id) + "," +
           format_double(p.similarity) + "," + std::to_string(p.match_year) + "\n";
  }
  const auto path = config_.output / "top_pairs.csv";
  write_file(path, csv);
  emit("semantic-sim", path);
}

void Pipeline::step_network() {
  const Corpus& c = corpus();
  const auto& n = normalized();

  std::string lcc_csv = "year,full_lcc,missing_academic,missing_industry,missing_cooperation\n";
  std::string common_csv = "year,type,common_nodes,common_edge_scale\n";
  std::string mod_csv = "year,type,modularity_q,seed\n";

  for (int year = config_.corpus.year_min; year <= config_.corpus.year_max; ++year) {
    const auto report = missing_proportion(c, n, year, config_.network_weighted);
    lcc_csv += std::to_string(year) + "," + std::to_string(report.full_lcc_size);
    for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
      lcc_csv += "," + opt_field(report.per_type_missing.at(t));
    }
    lcc_csv += '\n';

    std::map<PaperType, CoocGraph> graphs;
    for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
      graphs.emplace(t, build_graph(paper_entity_sets(c, n, year, t), config_.network_weighted));
    }

    // common-node analysis runs on the LCC of each per-type subgraph
    std::map<PaperType, CoocGraph> lccs;
    for (const auto& [t, g] : graphs) {
      const auto nodes = largest_connected_component(g);
      lccs.emplace(t, subgraph(g, std::set<int>(nodes.begin(), nodes.end())));
    }
    const auto common = common_nodes_and_edges(lccs.at(PaperType::Academic),
                                               lccs.at(PaperType::Industry),
                                               lccs.at(PaperType::Cooperation));
    for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
      common_csv += std::to_string(year) + "," + std::string(to_string(t)) + "," +
                    std::to_string(common.common_nodes.size()) + "," +
                    std::to_string(common.edge_scale.at(t)) + "\n";
    }

    std::optional<LouvainResult> shared;
    if (config_.shared_partition) {
      const auto full = build_graph(paper_entity_sets(c, n, year), config_.network_weighted);
      if (full.m > 0.0) {
        shared = louvain(full, config_.louvain_seed ^ (static_cast<uint64_t>(year) << 16));
        // carry entity -> community over to the per-type graphs below
        std::map<int, int> assignment;
        for (std::size_t i = 0; i < full.size(); ++i) {
          assignment[full.node_ids[i]] = shared->partition.community[i];
        }
        for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
          const auto& g = graphs.at(t);
          std::string q_field;
          if (g.m > 0.0) {
            // restrict the shared assignment to this graph's nodes; entities
            // absent from the full graph become singletons
            Partition p;
            std::map<int, int> renumber;
            p.community.reserve(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
              auto it = assignment.find(g.node_ids[i]);
              const int comm = it == assignment.end() ? -1 - static_cast<int>(i) : it->second;
              auto [rit, inserted] = renumber.emplace(comm, static_cast<int>(renumber.size()));
              p.community.push_back(rit->second);
            }
            q_field = format_double(modularity(g, p));
          }
          mod_csv += std::to_string(year) + "," + std::string(to_string(t)) + "," + q_field +
                     "," + std::to_string(shared->seed) + "\n";
        }
      }
    }
    if (!config_.shared_partition) {
      for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
        const auto& g = graphs.at(t);
        const uint64_t seed = config_.louvain_seed ^ (static_cast<uint64_t>(year) << 16) ^
                              static_cast<uint64_t>(t);
        std::string q_field;
        if (g.m > 0.0) {
          const auto result = louvain(g, seed);
          q_field = format_double(result.q);
        }
        mod_csv += std::to_string(year) + "," + std::string(to_string(t)) + "," + q_field + "," +
                   std::to_string(seed) + "\n";
      }
    }

    if (config_.dump_graphs) {
      for (const auto& [t, g] : graphs) {
        std::string edges = "entity_a,entity_b,weight\n";
        for (std::size_t u = 0; u < g.size(); ++u) {
          for (const auto& [v, w] : g.adj[u]) {
            if (u < v) {
              edges += std::to_string(g.node_ids[u]) + "," + std::to_string(g.node_ids[v]) +
                       "," + format_double(w) + "\n";
            }
          }
        }
        const auto path = config_.output / ("network_edges_" + std::to_string(year) + "_" +
                                            std::string(to_string(t)) + ".csv");
        write_file(path, edges);
        emit("network", path);
      }
    }
  }

  const auto lcc_path = config_.output / "network_lcc.csv";
  write_file(lcc_path, lcc_csv);
  emit("network", lcc_path);
  const auto common_path = config_.output / "network_common_edges.csv";
  write_file(common_path, common_csv);
  emit("network", common_path);
  const auto mod_path = config_.output / "network_modularity.csv";
  write_file(mod_path, mod_csv);
  emit("network", mod_path);

  json params = base_params(config_);
  params["weighted"] = config_.network_weighted;
  params["shared_partition"] = config_.shared_partition;
  params["louvain_seed"] = config_.louvain_seed;
  params["common_nodes_scope"] = "per-type LCC subgraphs";
  const auto meta = config_.output / "network.meta.json";
  write_file(meta, params.dump(2) + "\n");
  emit("network", meta);
}

void Pipeline::step_cite_flow() {
  const Corpus& c = corpus();

  std::string prop_csv = "year,citing_type,p_academic,p_industry,p_cooperation\n";
  std::string ecc_csv = "year,side,ecc\n";
  for (int year = config_.corpus.year_min; year <= config_.corpus.year_max; ++year) {
    for (PaperType t : {PaperType::Academic, PaperType::Industry, PaperType::Cooperation}) {
      const auto props = citation_proportions(c, year, t);
      prop_csv += std::to_string(year) + "," + std::string(to_string(t));
      if (props) {
        for (double v : *props) prop_csv += "," + format_double(v);
      } else {
        prop_csv += ",,,";
      }
      prop_csv += '\n';
    }
    for (Sector side : {Sector::Academic, Sector::Industry}) {
      const auto value = ecc(c, year, side, config_.ecc_baseline);
      ecc_csv += std::to_string(year) + "," + std::string(to_string(side)) + "," +
                 opt_field(value) + "\n";
    }
  }

  const auto flags = flag_corpus_compute_demand(c, config_.hardware_terms);
  std::string paper_csv = "paper_id,hhi,n_classified_refs,high_compute_flag\n";
  for (const auto& p : c.papers) {
    if (p.type == PaperType::Excluded) continue;
    CitationBreakdown b;
    for (std::size_t slot : c.citation_slots(p.paper_id)) b.add(c.citations[slot].cited_type);
    const auto h = hhi(b);
    paper_csv += csv_escape(p.paper_id) + "," + opt_field(h) + "," +
                 std::to_string(b.total_classified()) + "," +
                 (flags.at(p.paper_id).high_demand ? "1" : "0") + "\n";
  }

  const auto prop_path = config_.output / "citation_proportions.csv";
  write_file(prop_path, prop_csv);
  emit("cite-flow", prop_path);
  const auto ecc_path = config_.output / "ecc.csv";
  write_file(ecc_path, ecc_csv);
  emit("cite-flow", ecc_path);
  const auto paper_path = config_.output / "paper_citations.csv";
  write_file(paper_path, paper_csv);
  emit("cite-flow", paper_path);

  json params = base_params(config_);
  params["ecc_baseline"] =
      config_.ecc_baseline == EccBaseline::AllClassified ? "all" : "pure";
  params["hardware_terms"] = config_.hardware_terms;
  const auto meta = config_.output / "cite_flow.meta.json";
  write_file(meta, params.dump(2) + "\n");
  emit("cite-flow", meta);
}

void Pipeline::step_regress() {
  const Corpus& c = corpus();
  std::vector<Period> periods = config_.periods;
  if (options_.period) {
    std::erase_if(periods, [&](const Period& p) { return p.name != *options_.period; });
    if (periods.empty()) throw ConfigError("--period", "unknown period '" + *options_.period + "'");
  }
  const auto study = run_regression(c, periods, config_.semantic_q);

  // long form: one row per model term
  std::string long_csv = "period,model,term,coefficient,robust_se,p_value,stars\n";
  // Table-6 shape: one column per model
  std::vector<std::string> model_labels;
  std::set<std::string> term_set;
  std::map<std::string, std::map<std::string, std::string>> cells;  // term -> label -> text
  std::map<std::string, std::string> obs_row;
  std::map<std::string, std::string> r2_row;

  for (const auto& model : study.models) {
    const std::string label =
        model.period_name + (model.with_controls ? " (controls)" : " (hhi-only)");
    model_labels.push_back(label);
    for (std::size_t i = 0; i < model.fit.names.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      const double coef = model.fit.coef[idx];
      const double se = model.fit.robust_se[idx];
      const double p = normal_two_sided_p(coef, se);
      const std::string star = stats::stars(p);
      long_csv += model.period_name + "," +
                  (model.with_controls ? "controls" : "hhi-only") + "," + model.fit.names[i] +
                  "," + format_double(coef) + "," + format_double(se) + "," + format_double(p) +
                  "," + star + "\n";
      if (model.fit.names[i].rfind("year_", 0) == 0) continue;  // keep the table compact
      term_set.insert(model.fit.names[i]);
      cells[model.fit.names[i]][label] =
          format_double(coef) + star + " (" + format_double(se) + ")";
    }
    obs_row[label] = std::to_string(model.fit.n_obs);
    r2_row[label] = format_double(model.fit.r_squared);
  }

  std::string table_csv = "term";
  for (const auto& label : model_labels) table_csv += "," + csv_escape(label);
  table_csv += '\n';
  // fixed display order: hhi, controls, intercept, then dummies
  std::vector<std::string> ordered = {"hhi", "ln_institutions", "ln_authors", "ln_references",
                                      "intercept"};
  for (const auto& t : term_set) {
    if (std::find(ordered.begin(), ordered.end(), t) == ordered.end()) ordered.push_back(t);
  }
  for (const auto& term : ordered) {
    if (term_set.count(term) == 0) continue;
    table_csv += term;
    for (const auto& label : model_labels) {
      auto it = cells[term].find(label);
      table_csv += "," + csv_escape(it == cells[term].end() ? "" : it->second);
    }
    table_csv += '\n';
  }
  table_csv += "year_fixed_effects";
  for (std::size_t i = 0; i < model_labels.size(); ++i) table_csv += ",yes";
  table_csv += "\ninstitution_type_effects";
  for (std::size_t i = 0; i < model_labels.size(); ++i) table_csv += ",yes";
  table_csv += "\nobservations";
  for (const auto& label : model_labels) table_csv += "," + obs_row[label];
  table_csv += "\nr_squared";
  for (const auto& label : model_labels) table_csv += "," + r2_row[label];
  table_csv += '\n';

  std::string vif_csv = "period,term,vif\n";
  for (const auto& [period, vifs] : study.vif_by_period) {
    for (const auto& [term, value] : vifs) {
      vif_csv += period + "," + term + "," +
                 (std::isinf(value) ? "inf" : format_double(value)) + "\n";
    }
  }

  const auto table_path = config_.output / "regression_table.csv";
  write_file(table_path, table_csv);
  emit("regress", table_path);
  const auto long_path = config_.output / "regression_terms.csv";
  write_file(long_path, long_csv);
  emit("regress", long_path);
  const auto vif_path = config_.output / "vif.csv";
  write_file(vif_path, vif_csv);
  emit("regress", vif_path);

  json params = base_params(config_);
  params["robust_se"] = "HC1";
  params["stars"] = "*** p<0.01, ** p<0.05, * p<0.1";
  params["sem_sim"] = "same-year opposing-side q-quantile";
  params["kernel_backend"] = std::string(kernels::backend());
  params["q"] = config_.semantic_q;
  params["sample_size"] = study.sample.size();
  params["excluded_not_pure"] = study.sample.excluded_not_pure;
  params["excluded_no_embedding"] = study.sample.excluded_no_embedding;
  params["excluded_no_opposing"] = study.sample.excluded_no_opposing;
  params["excluded_no_hhi"] = study.sample.excluded_no_hhi;
  const auto meta = config_.output / "regression.meta.json";
  write_file(meta, params.dump(2) + "\n");
  emit("regress", meta);
}

void Pipeline::step_stability() {
  const Corpus& c = corpus();
  const auto& n = normalized();
  const auto report = cv_stability(c, n, config_.stability);

  std::string cv_csv = "metric,proportion,year,cv\n";
  for (const auto& cell : report.cells) {
    cv_csv += std::string(to_string(cell.metric)) + "," + format_double(cell.proportion) + "," +
              std::to_string(cell.year) + "," + opt_field(cell.cv) + "\n";
  }
  std::string summary_csv = "metric,proportion,mean_cv,u_test_p_vs_collab\n";
  for (const auto& s : report.summaries) {
    std::string p_field;
    for (const auto& cmp : report.comparisons) {
      if (cmp.entity_metric == s.metric && cmp.proportion == s.proportion) {
        p_field = format_double(cmp.p);
      }
    }
    summary_csv += std::string(to_string(s.metric)) + "," + format_double(s.proportion) + "," +
                   opt_field(s.mean_cv) + "," + p_field + "\n";
  }

  const auto cv_path = config_.output / "stability_cv.csv";
  write_file(cv_path, cv_csv);
  emit("stability", cv_path);
  const auto summary_path = config_.output / "stability_summary.csv";
  write_file(summary_path, summary_csv);
  emit("stability", summary_path);

  json params = base_params(config_);
  params["stability_seed"] = config_.stability.seed;
  params["repetitions"] = config_.stability.repetitions;
  params["proportions"] = config_.stability.proportions;
  params["cv"] = "sample standard deviation / mean";
  const auto meta = config_.output / "stability.meta.json";
  write_file(meta, params.dump(2) + "\n");
  emit("stability", meta);
}

void Pipeline::step_psm() {
  const Corpus& c = corpus();
  PsmConfig psm_config = config_.psm;
  if (options_.psm_ratio) psm_config.ratios = {*options_.psm_ratio};
  const auto study = psm_study(c, psm_config);

  std::string balance_csv = "ratio,covariate,smd_pre,smd_post\n";
  std::string outcome_csv =
      "ratio,u_statistic,z,p_value,treated_mean,control_mean,n_matched_treated,"
      "n_matched_controls,short_matches\n";
  for (const auto& rr : study.per_ratio) {
    for (const auto& row : rr.balance) {
      balance_csv += std::to_string(rr.ratio) + "," + row.covariate + "," +
                     format_double(row.smd_pre) + "," +
                     (std::isnan(row.smd_post) ? "" : format_double(row.smd_post)) + "\n";
    }
    std::size_t matched_treated = 0;
    std::size_t matched_controls = 0;
    for (const auto& m : rr.matches) {
      if (!m.control_ids.empty()) ++matched_treated;
      matched_controls += m.control_ids.size();
    }
    outcome_csv += std::to_string(rr.ratio) + "," + format_double(rr.outcome_test.u_statistic) +
                   "," + format_double(rr.outcome_test.z) + "," +
                   format_double(rr.outcome_test.p_value) + "," +
                   format_double(rr.treated_mean_outcome) + "," +
                   format_double(rr.control_mean_outcome) + "," +
                   std::to_string(matched_treated) + "," + std::to_string(matched_controls) +
                   "," + std::to_string(rr.short_matches) + "\n";
  }

  std::string prop_csv = "term,coefficient,se\n";
  for (std::size_t i = 0; i < study.propensity_fit.names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    prop_csv += study.propensity_fit.names[i] + "," +
                format_double(study.propensity_fit.coef[idx]) + "," +
                format_double(study.propensity_fit.robust_se[idx]) + "\n";
  }

  const auto balance_path = config_.output / "psm_balance.csv";
  write_file(balance_path, balance_csv);
  emit("psm", balance_path);
  const auto outcome_path = config_.output / "psm_outcome.csv";
  write_file(outcome_path, outcome_csv);
  emit("psm", outcome_path);
  const auto prop_path = config_.output / "psm_propensity.csv";
  write_file(prop_path, prop_csv);
  emit("psm", prop_path);

  json params = base_params(config_);
  params["ratios"] = psm_config.ratios;
  params["hardware_terms"] = psm_config.hardware_terms;
  params["matching"] = "greedy nearest neighbor without replacement, treated by descending propensity";
  params["outcome"] = "per-paper academic-citation proportion";
  const auto meta = config_.output / "psm.meta.json";
  write_file(meta, params.dump(2) + "\n");
  emit("psm", meta);
}

void Pipeline::dispatch(const std::string& step) {
  if (step == "validate") step_validate();
  else if (step == "normalize") step_normalize();
  else if (step == "entity-sim") step_entity_sim();
  else if (step == "semantic-sim") step_semantic_sim();
  else if (step == "network") step_network();
  else if (step == "cite-flow") step_cite_flow();
  else if (step == "regress") step_regress();
  else if (step == "stability") step_stability();
  else if (step == "psm") step_psm();
  else throw ConfigError("subcommand", "unknown step '" + step + "'");
}

void Pipeline::run(const std::string& step) {
  config_.validate();
  std::filesystem::create_directories(config_.output);

  for (const auto* input : {&config_.papers, &config_.entities, &config_.embeddings,
                            &config_.citations}) {
    manifest_.add_input("corpus", *input);
  }
  if (!config_.abbreviations.empty()) manifest_.add_input("normalize", config_.abbreviations);
  if (!config_.stoplist.empty()) manifest_.add_input("normalize", config_.stoplist);

  std::vector<std::string> steps;
  if (step == "all") steps = kPipelineSteps;
  else steps.push_back(step);

  for (const auto& s : steps) {
    const auto start = std::chrono::steady_clock::now();
    log_info("step " + s);
    dispatch(s);
    const auto end = std::chrono::steady_clock::now();
    manifest_.timings_seconds[s] =
        std::chrono::duration_cast<std::chrono::duration<double>>(end - start).count();
  }
  manifest_.write(config_.output / "manifest.json");
}

}  // namespace proxkit
