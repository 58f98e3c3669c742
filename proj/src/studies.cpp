#include "proxkit/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "proxkit/entsim.hpp"
#include "proxkit/rng.hpp"
#include "proxkit/semsim.hpp"

namespace proxkit {

RegressionSample build_regression_sample(const Corpus& corpus, double q) {
  std::size_t skipped_acad = 0;
  std::size_t skipped_indu = 0;
  const auto acad_scores = same_year_scores(corpus, Sector::Academic, q, &skipped_acad);
  const auto indu_scores = same_year_scores(corpus, Sector::Industry, q, &skipped_indu);
  // same_year_scores already drops papers with no same-year opposing side
  RegressionSample s;
  s.excluded_no_opposing = skipped_acad + skipped_indu;
  for (const auto& p : corpus.papers) {
    if (p.type != PaperType::Academic && p.type != PaperType::Industry) {
      ++s.excluded_not_pure;
      continue;
    }
    if (!p.has_embedding) {
      ++s.excluded_no_embedding;
      continue;
    }
    const auto& scores = p.type == PaperType::Academic ? acad_scores : indu_scores;
    const auto sit = scores.find(p.paper_id);
    if (sit == scores.end()) continue;  // counted in excluded_no_opposing
    const auto h = paper_hhi(corpus, p.paper_id);
    if (!h) {
      ++s.excluded_no_hhi;
      continue;
    }
    const auto n_refs = corpus.citation_slots(p.paper_id).size();
    s.paper_ids.push_back(p.paper_id);
    s.sem_sim.push_back(sit->second);
    s.hhi.push_back(*h);
    s.ln_inst.push_back(std::log(static_cast<double>(p.n_institutions())));
    s.ln_auth.push_back(std::log(static_cast<double>(p.n_authors())));
    s.ln_ref.push_back(std::log(static_cast<double>(n_refs)));
    s.years.push_back(p.year);
    s.types.push_back(p.type);
  }
  return s;
}

stats::DesignMatrix build_design(const RegressionSample& sample, bool with_controls,
                                 std::optional<int> reference_year,
                                 std::optional<PaperType> reference_type) {
  const std::size_t n = sample.size();
  std::set<int> year_levels(sample.years.begin(), sample.years.end());
  std::set<PaperType> type_levels(sample.types.begin(), sample.types.end());

  const int ref_year = reference_year.value_or(year_levels.empty() ? 0 : *year_levels.begin());
  const PaperType ref_type =
      reference_type.value_or(type_levels.empty() ? PaperType::Academic : *type_levels.begin());
  if (reference_year && year_levels.count(*reference_year) == 0) {
    throw ValidationError("build_design: reference year not present in sample");
  }
  if (reference_type && type_levels.count(*reference_type) == 0) {
    throw ValidationError("build_design: reference type not present in sample");
  }

  stats::DesignMatrix X;
  X.names.push_back("intercept");
  X.names.push_back("hhi");
  if (with_controls) {
    X.names.push_back("ln_institutions");
    X.names.push_back("ln_authors");
    X.names.push_back("ln_references");
  }
  std::vector<PaperType> type_dummies;
  for (PaperType t : type_levels) {
    if (t == ref_type) continue;
    type_dummies.push_back(t);
    X.names.push_back(std::string("insttype_") + std::string(to_string(t)));
  }
  std::vector<int> year_dummies;
  for (int y : year_levels) {
    if (y == ref_year) continue;
    year_dummies.push_back(y);
    X.names.push_back("year_" + std::to_string(y));
  }

  X.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(X.names.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index c = 0;
    X.values(row, c++) = 1.0;
    X.values(row, c++) = sample.hhi[i];
    if (with_controls) {
      X.values(row, c++) = sample.ln_inst[i];
      X.values(row, c++) = sample.ln_auth[i];
      X.values(row, c++) = sample.ln_ref[i];
    }
    for (PaperType t : type_dummies) X.values(row, c++) = sample.types[i] == t ? 1.0 : 0.0;
    for (int y : year_dummies) X.values(row, c++) = sample.years[i] == y ? 1.0 : 0.0;
  }
  return X;
}

namespace {

RegressionSample restrict_to_period(const RegressionSample& s, const Period& period) {
  RegressionSample out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!period.contains(s.years[i])) continue;
    out.paper_ids.push_back(s.paper_ids[i]);
    out.sem_sim.push_back(s.sem_sim[i]);
    out.hhi.push_back(s.hhi[i]);
    out.ln_inst.push_back(s.ln_inst[i]);
    out.ln_auth.push_back(s.ln_auth[i]);
    out.ln_ref.push_back(s.ln_ref[i]);
    out.years.push_back(s.years[i]);
    out.types.push_back(s.types[i]);
  }
  return out;
}

}  // namespace

RegressionStudy run_regression(const Corpus& corpus, const std::vector<Period>& periods,
                               double q) {
  RegressionStudy study;
  study.sample = build_regression_sample(corpus, q);

  for (const auto& period : periods) {
    const RegressionSample sub = restrict_to_period(study.sample, period);
    if (sub.size() == 0) {
      throw ValidationError("run_regression: empty sample for period " + period.name);
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(sub.size()));
    for (std::size_t i = 0; i < sub.size(); ++i) y[static_cast<Eigen::Index>(i)] = sub.sem_sim[i];

    for (bool with_controls : {false, true}) {
      const auto X = build_design(sub, with_controls);
      RegressionModel model;
      model.period_name = period.name;
      model.with_controls = with_controls;
      model.fit = stats::ols_robust(X, y);
      study.models.push_back(std::move(model));
      if (with_controls) {
        study.vif_by_period[period.name] = stats::vif(build_design(sub, true));
      }
    }
  }
  return study;
}

std::string_view to_string(StabilityMetric m) {
  switch (m) {
    case StabilityMetric::EntityAll: return "entity-all";
    case StabilityMetric::EntityMethod: return "entity-method";
    case StabilityMetric::CollabShare: return "collaboration-share";
  }
  return "?";
}

void StabilityConfig::validate() const {
  for (double r : proportions) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("stability proportions must lie in (0,1]");
  }
  if (repetitions < 2) throw ValidationError("stability repetitions must be at least 2");
  if (metrics.empty()) throw ValidationError("stability metric set must be non-empty");
}

namespace {

struct YearMetrics {
  // per year: entity-all sim, entity-method sim, collab share (optional)
  std::map<int, double> entity_all;
  std::map<int, double> entity_method;
  std::map<int, std::optional<double>> collab;
};

/// Metric values for the papers selected by `keep` (indexed by paper slot).
YearMetrics metrics_on_subsample(const Corpus& corpus, const NormalizedEntities& entities,
                                 const std::vector<char>& keep) {
  struct Bows {
    std::map<int, int> acad_all, indu_all, acad_method, indu_method;
  };
  std::map<int, Bows> by_year;
  for (const auto& m : entities.mentions) {
    const auto pit = corpus.paper_index.find(m.paper_id);
    if (pit == corpus.paper_index.end() || !keep[pit->second]) continue;
    const PaperType t = corpus.papers[pit->second].type;
    auto& b = by_year[m.year];
    if (t == PaperType::Academic) {
      b.acad_all[m.entity_id] += 1;
      if (m.cls == EntityClass::Method) b.acad_method[m.entity_id] += 1;
    } else if (t == PaperType::Industry) {
      b.indu_all[m.entity_id] += 1;
      if (m.cls == EntityClass::Method) b.indu_method[m.entity_id] += 1;
    }
  }
  std::map<int, std::pair<std::size_t, std::size_t>> coop_tally;  // year -> (coop, classified)
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    if (!keep[i]) continue;
    const auto& p = corpus.papers[i];
    if (p.type == PaperType::Excluded) continue;
    auto& [coop, classified] = coop_tally[p.year];
    ++classified;
    if (p.type == PaperType::Cooperation) ++coop;
  }

  auto cos_sparse = [](const std::map<int, int>& a, const std::map<int, int>& b) {
    StratumBow u;
    StratumBow v;
    u.freqs = a;
    v.freqs = b;
    for (const auto& [id, c] : a) u.sumsq += static_cast<double>(c) * c;
    for (const auto& [id, c] : b) v.sumsq += static_cast<double>(c) * c;
    return cosine_bow(u, v);
  };

  YearMetrics out;
  for (const auto& [year, b] : by_year) {
    out.entity_all[year] = cos_sparse(b.acad_all, b.indu_all);
    out.entity_method[year] = cos_sparse(b.acad_method, b.indu_method);
  }
  for (const auto& [year, tally] : coop_tally) {
    if (tally.second == 0) out.collab[year] = std::nullopt;
    else out.collab[year] = static_cast<double>(tally.first) / static_cast<double>(tally.second);
    if (out.entity_all.find(year) == out.entity_all.end()) {
      out.entity_all[year] = 0.0;
      out.entity_method[year] = 0.0;
    }
  }
  return out;
}

double metric_value(const YearMetrics& m, StabilityMetric metric, int year) {
  switch (metric) {
    case StabilityMetric::EntityAll: {
      auto it = m.entity_all.find(year);
      return it == m.entity_all.end() ? 0.0 : it->second;
    }
    case StabilityMetric::EntityMethod: {
      auto it = m.entity_method.find(year);
      return it == m.entity_method.end() ? 0.0 : it->second;
    }
    case StabilityMetric::CollabShare: {
      auto it = m.collab.find(year);
      if (it == m.collab.end() || !it->second) return 0.0;
      return *it->second;
    }
  }
  return 0.0;
}

}  // namespace

StabilityReport cv_stability(const Corpus& corpus, const NormalizedEntities& entities,
                             const StabilityConfig& config) {
  config.validate();

  std::map<int, std::vector<std::size_t>> slots_by_year;
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    slots_by_year[corpus.papers[i].year].push_back(i);
  }
  std::vector<int> years;
  for (const auto& [y, slots] : slots_by_year) years.push_back(y);

  StabilityReport report;
  for (std::size_t ri = 0; ri < config.proportions.size(); ++ri) {
    const double r = config.proportions[ri];
    // metric samples per repetition, same subsample shared by every metric
    std::map<StabilityMetric, std::map<int, std::vector<double>>> values;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      Rng rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (ri * 1000 + static_cast<std::size_t>(rep) + 1)));
      std::vector<char> keep(corpus.papers.size(), 0);
      for (const auto& [year, slots] : slots_by_year) {
        const auto k = static_cast<std::size_t>(
            std::llround(r * static_cast<double>(slots.size())));
        for (std::size_t idx : rng.sample_without_replacement(slots.size(), k)) {
          keep[slots[idx]] = 1;
        }
      }
      const YearMetrics m = metrics_on_subsample(corpus, entities, keep);
      for (StabilityMetric metric : config.metrics) {
        for (int y : years) values[metric][y].push_back(metric_value(m, metric, y));
      }
    }

    std::map<StabilityMetric, std::vector<double>> cv_samples;
    for (StabilityMetric metric : config.metrics) {
      double cv_sum = 0.0;
      std::size_t cv_count = 0;
      for (int y : years) {
        const auto& v = values[metric][y];
        const double mean =
            std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        StabilityCell cell{metric, r, y, std::nullopt};
        if (mean > 0.0) {
          double ss = 0.0;
          for (double x : v) ss += (x - mean) * (x - mean);
          const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
          cell.cv = sd / mean;
          cv_sum += *cell.cv;
          ++cv_count;
          cv_samples[metric].push_back(*cell.cv);
        }
        report.cells.push_back(cell);
      }
      StabilitySummary summary{metric, r, std::nullopt};
      if (cv_count > 0) summary.mean_cv = cv_sum / static_cast<double>(cv_count);
      report.summaries.push_back(summary);
    }

    const bool have_collab =
        std::find(config.metrics.begin(), config.metrics.end(), StabilityMetric::CollabShare) !=
        config.metrics.end();
    if (have_collab) {
      for (StabilityMetric metric : config.metrics) {
        if (metric == StabilityMetric::CollabShare) continue;
        const auto& a = cv_samples[metric];
        const auto& b = cv_samples[StabilityMetric::CollabShare];
        if (a.empty() || b.empty()) continue;
        const auto test = stats::mann_whitney_u(a, b, stats::MwuMode::Normal);
        report.comparisons.push_back({metric, r, test.u_statistic, test.p_value});
      }
    }
  }
  return report;
}

void PsmConfig::validate() const {
  for (int k : ratios) {
    if (k < 1) throw ValidationError("psm ratios must be at least 1");
  }
  if (hardware_terms.empty()) throw ValidationError("psm hardware term list must be non-empty");
}

double standardized_mean_difference(const std::vector<double>& treated,
                                    const std::vector<double>& control) {
  auto moments = [](const std::vector<double>& v) {
    const double mean =
        std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
    return std::pair(mean, var);
  };
  const auto [mt, vt] = moments(treated);
  const auto [mc, vc] = moments(control);
  const double pooled = std::sqrt((vt + vc) / 2.0);
  if (pooled == 0.0) return mt == mc ? 0.0 : std::numeric_limits<double>::infinity();
  return (mt - mc) / pooled;
}

PsmStudy psm_study(const Corpus& corpus, const PsmConfig& config) {
  config.validate();

  const auto flags = flag_corpus_compute_demand(corpus, config.hardware_terms);

  PsmStudy study;
  for (const auto& p : corpus.papers) {
    if (p.type == PaperType::Excluded) continue;
    CitationBreakdown b;
    for (std::size_t slot : corpus.citation_slots(p.paper_id)) {
      b.add(corpus.citations[slot].cited_type);
    }
    const long classified = b.total_classified();
    if (classified == 0) continue;  // outcome undefined
    PsmUnit unit;
    unit.paper_id = p.paper_id;
    unit.treated = flags.at(p.paper_id).high_demand;
    unit.covariates = {static_cast<double>(p.n_institutions()), static_cast<double>(p.n_authors()),
                       static_cast<double>(corpus.citation_slots(p.paper_id).size()),
                       static_cast<double>(p.year)};
    unit.outcome = static_cast<double>(b.counts[static_cast<std::size_t>(PaperType::Academic)]) /
                   static_cast<double>(classified);
    study.units.push_back(std::move(unit));
  }

  std::size_t n_treated = 0;
  for (const auto& u : study.units) n_treated += u.treated ? 1 : 0;
  if (n_treated == 0 || n_treated == study.units.size()) {
    throw ValidationError("psm_study: both treated and control papers are required");
  }

  // propensity scores; constant covariates carry no information and would be
  // collinear with the intercept, so they stay out of the model
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < 4; ++c) {
    const double first = study.units.front().covariates[c];
    for (const auto& u : study.units) {
      if (u.covariates[c] != first) {
        active.push_back(c);
        break;
      }
    }
  }
  stats::DesignMatrix X;
  X.names.push_back("intercept");
  for (std::size_t c : active) X.names.push_back(kPsmCovariates[c]);
  X.values.resize(static_cast<Eigen::Index>(study.units.size()),
                  static_cast<Eigen::Index>(1 + active.size()));
  std::vector<int> y(study.units.size());
  for (std::size_t i = 0; i < study.units.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    X.values(row, 0) = 1.0;
    for (std::size_t c = 0; c < active.size(); ++c) {
      X.values(row, static_cast<Eigen::Index>(c + 1)) = study.units[i].covariates[active[c]];
    }
    y[i] = study.units[i].treated ? 1 : 0;
  }
  const auto logit = stats::logit_fit(X, y);
  study.propensity_fit = logit.fit;
  for (std::size_t i = 0; i < study.units.size(); ++i) {
    study.units[i].propensity = logit.fitted[static_cast<Eigen::Index>(i)];
  }

  // treated in descending propensity, paper_id tie-break
  std::vector<std::size_t> treated_order;
  for (std::size_t i = 0; i < study.units.size(); ++i) {
    if (study.units[i].treated) treated_order.push_back(i);
  }
  std::sort(treated_order.begin(), treated_order.end(), [&](std::size_t a, std::size_t b) {
    if (study.units[a].propensity != study.units[b].propensity) {
      return study.units[a].propensity > study.units[b].propensity;
    }
    return study.units[a].paper_id < study.units[b].paper_id;
  });

  for (int ratio : config.ratios) {
    PsmRatioResult rr;
    rr.ratio = ratio;

    // available controls sorted by (propensity, paper_id)
    std::set<std::pair<double, std::size_t>> pool;
    std::vector<std::pair<double, std::size_t>> control_keys;
    for (std::size_t i = 0; i < study.units.size(); ++i) {
      if (!study.units[i].treated) pool.emplace(study.units[i].propensity, i);
    }

    std::vector<std::size_t> matched_treated;
    std::vector<std::size_t> matched_controls;
    for (std::size_t t : treated_order) {
      PsmMatch match;
      match.treated_id = study.units[t].paper_id;
      const double target = study.units[t].propensity;
      for (int pick = 0; pick < ratio && !pool.empty(); ++pick) {
        auto hi = pool.lower_bound({target, 0});
        auto best = pool.end();
        double best_dist = std::numeric_limits<double>::infinity();
        // nearest by |propensity difference|; the lower neighbor wins ties
        if (hi != pool.begin()) {
          auto lo = std::prev(hi);
          best = lo;
          best_dist = std::abs(lo->first - target);
        }
        if (hi != pool.end()) {
          const double dist = std::abs(hi->first - target);
          if (dist < best_dist) {
            best = hi;
            best_dist = dist;
          }
        }
        if (best == pool.end()) break;
        match.control_ids.push_back(study.units[best->second].paper_id);
        matched_controls.push_back(best->second);
        pool.erase(best);
      }
      if (static_cast<int>(match.control_ids.size()) < ratio) ++rr.short_matches;
      if (!match.control_ids.empty()) matched_treated.push_back(t);
      rr.matches.push_back(std::move(match));
    }

    // balance: pre over all units, post over matched sets
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<double> pre_t;
      std::vector<double> pre_c;
      for (const auto& u : study.units) {
        (u.treated ? pre_t : pre_c).push_back(u.covariates[c]);
      }
      std::vector<double> post_t;
      std::vector<double> post_c;
      for (std::size_t i : matched_treated) post_t.push_back(study.units[i].covariates[c]);
      for (std::size_t i : matched_controls) post_c.push_back(study.units[i].covariates[c]);
      BalanceRow row;
      row.covariate = kPsmCovariates[c];
      row.smd_pre = standardized_mean_difference(pre_t, pre_c);
      row.smd_post = post_t.empty() || post_c.empty()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : standardized_mean_difference(post_t, post_c);
      rr.balance.push_back(row);
    }

    std::vector<double> out_t;
    std::vector<double> out_c;
    for (std::size_t i : matched_treated) out_t.push_back(study.units[i].outcome);
    for (std::size_t i : matched_controls) out_c.push_back(study.units[i].outcome);
    if (!out_t.empty() && !out_c.empty()) {
      rr.outcome_test = stats::mann_whitney_u(out_t, out_c, stats::MwuMode::Normal);
      rr.treated_mean_outcome =
          std::accumulate(out_t.begin(), out_t.end(), 0.0) / static_cast<double>(out_t.size());
      rr.control_mean_outcome =
          std::accumulate(out_c.begin(), out_c.end(), 0.0) / static_cast<double>(out_c.size());
    }
    study.per_ratio.push_back(std::move(rr));
  }
  return study;
}

}  // namespace proxkit
