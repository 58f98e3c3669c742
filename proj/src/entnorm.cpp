#include "proxkit/entnorm.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>

#include <nlohmann/json.hpp>

#include "proxkit/util.hpp"

namespace proxkit {

using nlohmann::json;

int EntityCluster::total_freq() const {
  int total = 0;
  for (const auto& [year, count] : year_freq) total += count;
  return total;
}

int EntityCluster::max_annual_freq() const {
  int best = 0;
  for (const auto& [year, count] : year_freq) best = std::max(best, count);
  return best;
}

void NormalizationConfig::validate() const {
  if (!(merge_avg_sim > 0.0 && merge_avg_sim <= same_cluster_sim && same_cluster_sim <= 1.0)) {
    throw ValidationError("normalization thresholds must satisfy 0 < merge_avg_sim <= same_cluster_sim <= 1");
  }
  if (min_annual_freq < 0) throw ValidationError("min_annual_freq must be non-negative");
}

namespace {

std::string normalize_surface(std::string_view raw, const NormalizationConfig& config) {
  std::string s = to_lower(trim(raw));
  if (auto it = config.abbreviations.find(s); it != config.abbreviations.end()) {
    s = to_lower(trim(it->second));
  }
  return s;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  std::vector<std::size_t> prev(lb + 1);
  std::vector<std::size_t> cur(lb + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 0; i < la; ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < lb; ++j) {
      const std::size_t subst = prev[j] + (a[i] == b[j] ? 0 : 1);
      cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, subst});
    }
    prev.swap(cur);
  }
  return prev[lb];
}

}  // namespace

std::vector<EntityMention> expand_and_filter(const std::vector<EntityMention>& mentions,
                                             const NormalizationConfig& config,
                                             std::size_t* filtered_count) {
  std::vector<EntityMention> out;
  out.reserve(mentions.size());
  std::size_t filtered = 0;
  for (const auto& m : mentions) {
    std::string surface = normalize_surface(m.surface, config);
    if (surface.empty() || config.stoplist.count(surface) > 0) {
      ++filtered;
      continue;
    }
    EntityMention kept = m;
    kept.surface = std::move(surface);
    out.push_back(std::move(kept));
  }
  if (filtered_count) *filtered_count = filtered;
  return out;
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) throw ValidationError("edit_similarity: empty string");
  const std::size_t max_len = std::max(a.size(), b.size());
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(max_len);
}

namespace {

struct SurfaceStats {
  std::string surface;
  std::map<int, int> year_freq;
};

struct ProtoCluster {
  std::vector<std::size_t> members;  // surface indices, kept sorted
};

/// sum of pairwise similarities between two disjoint member sets
double cross_sim_sum(const std::vector<SurfaceStats>& surfaces, const ProtoCluster& a,
                     const ProtoCluster& b) {
  double sum = 0.0;
  for (std::size_t i : a.members) {
    for (std::size_t j : b.members) {
      sum += edit_similarity(surfaces[i].surface, surfaces[j].surface);
    }
  }
  return sum;
}

EntityCluster finalize_cluster(const std::vector<SurfaceStats>& surfaces, EntityClass cls,
                               const ProtoCluster& proto) {
  EntityCluster cluster;
  cluster.cls = cls;
  int best_freq = -1;
  for (std::size_t idx : proto.members) {
    const auto& s = surfaces[idx];
    cluster.members.insert(s.surface);
    int freq = 0;
    for (const auto& [year, count] : s.year_freq) {
      cluster.year_freq[year] += count;
      freq += count;
    }
    if (freq > best_freq || (freq == best_freq && s.surface < cluster.canonical)) {
      best_freq = freq;
      cluster.canonical = s.surface;
    }
  }
  return cluster;
}

std::vector<EntityCluster> cluster_one_class(const std::vector<SurfaceStats>& surfaces,
                                             EntityClass cls,
                                             const NormalizationConfig& config) {
  const std::size_t n = surfaces.size();

  // phase 1: single link over pairs with similarity strictly above same_cluster_sim
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double la = static_cast<double>(surfaces[i].surface.size());
      const double lb = static_cast<double>(surfaces[j].surface.size());
      const double best_possible = 1.0 - std::abs(la - lb) / std::max(la, lb);
      if (best_possible <= config.same_cluster_sim) continue;
      if (edit_similarity(surfaces[i].surface, surfaces[j].surface) > config.same_cluster_sim) {
        const std::size_t ri = find(i);
        const std::size_t rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::map<std::size_t, ProtoCluster> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].members.push_back(i);
  std::vector<ProtoCluster> clusters;
  clusters.reserve(by_root.size());
  for (auto& [root, proto] : by_root) {
    std::sort(proto.members.begin(), proto.members.end());
    clusters.push_back(std::move(proto));
  }

  // phase 2: greedy merging by highest average cross-similarity
  std::vector<std::vector<double>> sim_sum(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    sim_sum[i].assign(i, 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      sim_sum[i][j] = cross_sim_sum(surfaces, clusters[i], clusters[j]);
    }
  }
  std::vector<bool> alive(clusters.size(), true);
  auto smallest_member = [&](std::size_t c) -> const std::string& {
    return surfaces[clusters[c].members.front()].surface;
  };
  while (true) {
    double best_avg = config.merge_avg_sim;
    std::ptrdiff_t best_i = -1;
    std::ptrdiff_t best_j = -1;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = 0; j < i; ++j) {
        if (!alive[j]) continue;
        const double pairs = static_cast<double>(clusters[i].members.size()) *
                             static_cast<double>(clusters[j].members.size());
        const double avg = sim_sum[i][j] / pairs;
        bool better = avg > best_avg;
        if (!better && best_i >= 0 && avg == best_avg) {
          // lexicographic tie-break on the candidate pairs' smallest members
          auto key = [&](std::size_t a, std::size_t b) {
            const std::string& sa = smallest_member(a);
            const std::string& sb = smallest_member(b);
            return sa < sb ? std::pair(sa, sb) : std::pair(sb, sa);
          };
          better = key(j, i) < key(static_cast<std::size_t>(best_j), static_cast<std::size_t>(best_i));
        }
        if (better) {
          best_avg = avg;
          best_i = static_cast<std::ptrdiff_t>(i);
          best_j = static_cast<std::ptrdiff_t>(j);
        }
      }
    }
    if (best_i < 0) break;
    const auto i = static_cast<std::size_t>(best_i);
    const auto j = static_cast<std::size_t>(best_j);
    // merge j into i; cross sums are additive so no similarity is recomputed
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      if (!alive[k] || k == i || k == j) continue;
      const double sum_jk = k < j ? sim_sum[j][k] : sim_sum[k][j];
      if (k < i) sim_sum[i][k] += sum_jk;
      else sim_sum[k][i] += sum_jk;
    }
    clusters[i].members.insert(clusters[i].members.end(), clusters[j].members.begin(),
                               clusters[j].members.end());
    std::sort(clusters[i].members.begin(), clusters[i].members.end());
    alive[j] = false;
  }

  std::vector<EntityCluster> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (alive[i]) out.push_back(finalize_cluster(surfaces, cls, clusters[i]));
  }
  return out;
}

}  // namespace

std::vector<EntityCluster> cluster_entities(const std::vector<EntityMention>& mentions,
                                            const NormalizationConfig& config) {
  config.validate();

  // aggregate distinct surfaces with per-year counts, per class
  std::map<EntityClass, std::map<std::string, std::map<int, int>>> by_class;
  for (const auto& m : mentions) {
    by_class[m.cls][m.surface][m.year] += 1;
  }

  std::vector<EntityCluster> all;
  for (EntityClass cls : kEntityClasses) {
    auto it = by_class.find(cls);
    if (it == by_class.end()) continue;
    std::vector<SurfaceStats> surfaces;
    surfaces.reserve(it->second.size());
    for (auto& [surface, freq] : it->second) {
      surfaces.push_back({surface, freq});
    }
    auto clusters = cluster_one_class(surfaces, cls, config);
    all.insert(all.end(), std::make_move_iterator(clusters.begin()),
               std::make_move_iterator(clusters.end()));
  }

  std::sort(all.begin(), all.end(), [](const EntityCluster& a, const EntityCluster& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.canonical < b.canonical;
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].entity_id = static_cast<int>(i);
  return all;
}

std::vector<EntityCluster> prune_rare(std::vector<EntityCluster> clusters, int min_annual_freq,
                                      std::size_t* dropped) {
  const std::size_t before = clusters.size();
  std::erase_if(clusters, [min_annual_freq](const EntityCluster& c) {
    return c.max_annual_freq() < min_annual_freq;
  });
  if (dropped) *dropped = before - clusters.size();
  return clusters;
}

const EntityCluster* NormalizedEntities::find(int entity_id) const {
  auto it = std::lower_bound(clusters.begin(), clusters.end(), entity_id,
                             [](const EntityCluster& c, int id) { return c.entity_id < id; });
  if (it != clusters.end() && it->entity_id == entity_id) return &*it;
  return nullptr;
}

std::optional<int> NormalizedEntities::resolve(EntityClass cls, std::string_view raw_surface,
                                               const NormalizationConfig& config) const {
  const std::string surface = normalize_surface(raw_surface, config);
  if (surface.empty() || config.stoplist.count(surface) > 0) return std::nullopt;
  auto it = surface_to_id.find({cls, surface});
  if (it == surface_to_id.end()) return std::nullopt;
  return it->second;
}

NormalizedEntities normalize(const std::vector<EntityMention>& raw,
                             const NormalizationConfig& config) {
  NormalizedEntities out;
  out.report.mentions_in = raw.size();

  const auto filtered = expand_and_filter(raw, config, &out.report.mentions_filtered);
  auto clusters = cluster_entities(filtered, config);
  out.report.clusters_before_prune = clusters.size();
  std::size_t dropped = 0;
  out.clusters = prune_rare(std::move(clusters), config.min_annual_freq, &dropped);
  out.report.clusters_after_prune = out.clusters.size();

  for (const auto& c : out.clusters) {
    for (const auto& member : c.members) {
      out.surface_to_id.emplace(std::pair(c.cls, member), c.entity_id);
    }
  }
  for (const auto& m : filtered) {
    auto it = out.surface_to_id.find({m.cls, m.surface});
    if (it == out.surface_to_id.end()) continue;  // pruned
    out.mentions.push_back({m.paper_id, it->second, m.cls, m.year});
  }
  out.report.mentions_out = out.mentions.size();
  return out;
}

std::unordered_map<std::string, std::string> load_abbreviation_map(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> map;
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open abbreviation map");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto sep = body.find("=>");
    if (sep == std::string::npos) {
      throw DataError(path.string(), line_no, "expected 'short => full'");
    }
    const std::string key = to_lower(trim(body.substr(0, sep)));
    const std::string value = to_lower(trim(body.substr(sep + 2)));
    if (key.empty() || value.empty()) {
      throw DataError(path.string(), line_no, "empty side in abbreviation mapping");
    }
    map[key] = value;
  }
  return map;
}

std::unordered_set<std::string> load_stoplist(const std::filesystem::path& path) {
  std::unordered_set<std::string> stop;
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open stoplist");
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = to_lower(trim(line));
    if (!body.empty()) stop.insert(body);
  }
  return stop;
}

void write_clusters_jsonl(const std::filesystem::path& path,
                          const std::vector<EntityCluster>& clusters) {
  std::string out;
  for (const auto& c : clusters) {
    json obj;
    obj["entity_id"] = c.entity_id;
    obj["canonical"] = c.canonical;
    obj["class"] = std::string(to_string(c.cls));
    obj["members"] = c.members;
    json freq = json::object();
    for (const auto& [year, count] : c.year_freq) freq[std::to_string(year)] = count;
    obj["year_freq"] = freq;
    out += obj.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<EntityCluster> read_clusters_jsonl(const std::filesystem::path& path) {
  std::vector<EntityCluster> clusters;
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open clusters file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string(), line_no, std::string("invalid JSON: ") + e.what());
    }
    EntityCluster c;
    c.entity_id = obj.at("entity_id").get<int>();
    c.canonical = obj.at("canonical").get<std::string>();
    const auto cls = entity_class_from_string(obj.at("class").get<std::string>());
    if (!cls) throw DataError(path.string(), line_no, "unknown entity class");
    c.cls = *cls;
    for (const auto& m : obj.at("members")) c.members.insert(m.get<std::string>());
    for (const auto& [year, count] : obj.at("year_freq").items()) {
      c.year_freq[std::stoi(year)] = count.get<int>();
    }
    clusters.push_back(std::move(c));
  }
  return clusters;
}

}  // namespace proxkit
