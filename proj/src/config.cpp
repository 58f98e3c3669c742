#include "proxkit/config.hpp"

#include <cctype>
#include <charconv>

#include "proxkit/util.hpp"

namespace proxkit {

namespace {

[[noreturn]] void bad(const std::string& source, std::size_t line, const std::string& what) {
  throw ConfigError(source + ":" + std::to_string(line), what);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_basic_string(std::string_view s, std::size_t& pos, const std::string& source,
                               std::size_t line) {
  // s[pos] == '"'
  ++pos;
  std::string out;
  while (pos < s.size() && s[pos] != '"') {
    char c = s[pos];
    if (c == '\\') {
      ++pos;
      if (pos >= s.size()) bad(source, line, "unterminated escape");
      switch (s[pos]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: bad(source, line, "unsupported escape sequence");
      }
    } else {
      out += c;
    }
    ++pos;
  }
  if (pos >= s.size()) bad(source, line, "unterminated string");
  ++pos;  // closing quote
  return out;
}

void skip_ws(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

TomlValue parse_value(std::string_view s, std::size_t& pos, const std::string& source,
                      std::size_t line);

TomlValue parse_array(std::string_view s, std::size_t& pos, const std::string& source,
                      std::size_t line) {
  // s[pos] == '['
  ++pos;
  std::vector<TomlValue> items;
  skip_ws(s, pos);
  while (pos < s.size() && s[pos] != ']') {
    items.push_back(parse_value(s, pos, source, line));
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      skip_ws(s, pos);
    }
  }
  if (pos >= s.size()) bad(source, line, "unterminated array");
  ++pos;
  return TomlValue{std::move(items)};
}

TomlValue parse_value(std::string_view s, std::size_t& pos, const std::string& source,
                      std::size_t line) {
  skip_ws(s, pos);
  if (pos >= s.size()) bad(source, line, "missing value");
  const char c = s[pos];
  if (c == '"') return TomlValue{parse_basic_string(s, pos, source, line)};
  if (c == '[') return parse_array(s, pos, source, line);
  // bare token: bool or number
  std::size_t end = pos;
  while (end < s.size() && s[end] != ',' && s[end] != ']' && s[end] != '#' && s[end] != ' ' &&
         s[end] != '\t') {
    ++end;
  }
  const std::string tok(s.substr(pos, end - pos));
  pos = end;
  if (tok == "true") return TomlValue{true};
  if (tok == "false") return TomlValue{false};
  if (tok.find_first_of(".eE") != std::string::npos &&
      tok.find_first_not_of("+-0123456789.eE") == std::string::npos) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc{} || p != tok.data() + tok.size()) bad(source, line, "invalid float '" + tok + "'");
    return TomlValue{d};
  }
  if (tok.find_first_not_of("+-0123456789") == std::string::npos && !tok.empty()) {
    int64_t i = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
    if (ec != std::errc{} || p != tok.data() + tok.size()) bad(source, line, "invalid integer '" + tok + "'");
    return TomlValue{i};
  }
  bad(source, line, "unrecognized value '" + tok + "'");
}

}  // namespace

TomlTable parse_toml(std::string_view text, const std::string& source_name) {
  TomlTable table;
  std::string current_prefix;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start
                                                                            : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // strip comments outside strings
    std::string stripped;
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
      if (c == '#' && !in_str) break;
      stripped += c;
    }
    const std::string body = trim(stripped);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') bad(source_name, line_no, "unterminated table header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (name.empty()) bad(source_name, line_no, "empty table name");
      for (char c : name) {
        if (!is_bare_key_char(c) && c != '.') bad(source_name, line_no, "invalid table name");
      }
      current_prefix = name + ".";
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) bad(source_name, line_no, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) bad(source_name, line_no, "empty key");
    for (char c : key) {
      if (!is_bare_key_char(c) && c != '.') bad(source_name, line_no, "invalid key '" + key + "'");
    }
    std::size_t pos = 0;
    const std::string value_str = trim(body.substr(eq + 1));
    const TomlValue value = parse_value(value_str, pos, source_name, line_no);
    skip_ws(value_str, pos);
    if (pos != value_str.size()) bad(source_name, line_no, "trailing content after value");
    const std::string full_key = current_prefix + key;
    if (table.entries.count(full_key) > 0) bad(source_name, line_no, "duplicate key '" + full_key + "'");
    table.entries.emplace(full_key, value);
  }
  return table;
}

TomlTable parse_toml_file(const std::filesystem::path& path) {
  return parse_toml(read_file(path), path.string());
}

bool TomlTable::has(const std::string& key) const { return entries.count(key) > 0; }

namespace {

const TomlValue& fetch(const std::map<std::string, TomlValue>& entries, const std::string& key) {
  auto it = entries.find(key);
  if (it == entries.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

}  // namespace

std::string TomlTable::get_string(const std::string& key) const {
  const auto& v = fetch(entries, key);
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw ConfigError(key, "expected string");
}

int64_t TomlTable::get_int(const std::string& key) const {
  const auto& v = fetch(entries, key);
  if (const auto* i = std::get_if<int64_t>(&v.v)) return *i;
  throw ConfigError(key, "expected integer");
}

double TomlTable::get_double(const std::string& key) const {
  const auto& v = fetch(entries, key);
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<int64_t>(&v.v)) return static_cast<double>(*i);
  throw ConfigError(key, "expected number");
}

bool TomlTable::get_bool(const std::string& key) const {
  const auto& v = fetch(entries, key);
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw ConfigError(key, "expected boolean");
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
  const auto& v = fetch(entries, key);
  const auto* arr = std::get_if<std::vector<TomlValue>>(&v.v);
  if (arr == nullptr) throw ConfigError(key, "expected array");
  std::vector<double> out;
  for (const auto& item : *arr) {
    if (const auto* d = std::get_if<double>(&item.v)) out.push_back(*d);
    else if (const auto* i = std::get_if<int64_t>(&item.v)) out.push_back(static_cast<double>(*i));
    else throw ConfigError(key, "expected numeric array");
  }
  return out;
}

std::vector<int64_t> TomlTable::get_int_array(const std::string& key) const {
  const auto& v = fetch(entries, key);
  const auto* arr = std::get_if<std::vector<TomlValue>>(&v.v);
  if (arr == nullptr) throw ConfigError(key, "expected array");
  std::vector<int64_t> out;
  for (const auto& item : *arr) {
    if (const auto* i = std::get_if<int64_t>(&item.v)) out.push_back(*i);
    else throw ConfigError(key, "expected integer array");
  }
  return out;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
  const auto& v = fetch(entries, key);
  const auto* arr = std::get_if<std::vector<TomlValue>>(&v.v);
  if (arr == nullptr) throw ConfigError(key, "expected array");
  std::vector<std::string> out;
  for (const auto& item : *arr) {
    if (const auto* s = std::get_if<std::string>(&item.v)) out.push_back(*s);
    else throw ConfigError(key, "expected string array");
  }
  return out;
}

std::string TomlTable::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
int64_t TomlTable::get_int_or(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}
double TomlTable::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
bool TomlTable::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> TomlTable::keys_under(const std::string& prefix) const {
  const std::string full = prefix + ".";
  std::vector<std::string> out;
  for (const auto& [key, value] : entries) {
    if (key.size() > full.size() && key.compare(0, full.size(), full) == 0) {
      out.push_back(key.substr(full.size()));
    }
  }
  return out;
}

std::vector<Period> default_periods(int year_min, int year_max) {
  std::vector<Period> out;
  out.push_back({"overall", year_min, year_max});
  auto clip = [&](const char* name, int a, int b) {
    const int lo = std::max(a, year_min);
    const int hi = std::min(b, year_max);
    if (lo <= hi) out.push_back({name, lo, hi});
  };
  clip("statistical-ml", 2000, 2012);
  clip("deep-learning", 2013, 2017);
  clip("pre-training", 2018, 2022);
  return out;
}

NormalizationConfig RunConfig::normalization_config() const {
  NormalizationConfig cfg;
  cfg.same_cluster_sim = same_cluster_sim;
  cfg.merge_avg_sim = merge_avg_sim;
  cfg.min_annual_freq = min_annual_freq;
  if (!abbreviations.empty()) cfg.abbreviations = load_abbreviation_map(abbreviations);
  if (!stoplist.empty()) cfg.stoplist = load_stoplist(stoplist);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  auto require_file = [](const std::filesystem::path& p, const char* field) {
    if (p.empty()) throw ConfigError(field, "path is required");
    if (!std::filesystem::exists(p)) throw ConfigError(field, "file does not exist: " + p.string());
  };
  require_file(papers, "paths.papers");
  require_file(entities, "paths.entities");
  require_file(embeddings, "paths.embeddings");
  require_file(citations, "paths.citations");
  if (!abbreviations.empty() && !std::filesystem::exists(abbreviations)) {
    throw ConfigError("paths.abbreviations", "file does not exist: " + abbreviations.string());
  }
  if (!stoplist.empty() && !std::filesystem::exists(stoplist)) {
    throw ConfigError("paths.stoplist", "file does not exist: " + stoplist.string());
  }
  if (corpus.year_min > corpus.year_max) {
    throw ConfigError("corpus.year_min", "year range is empty");
  }
  {
    std::error_code ec;
    std::filesystem::create_directories(output, ec);
    if (ec || !std::filesystem::is_directory(output)) {
      throw ConfigError("paths.output", "output directory is not writable: " + output.string());
    }
  }
  if (!(merge_avg_sim > 0.0 && merge_avg_sim <= same_cluster_sim && same_cluster_sim <= 1.0)) {
    throw ConfigError("normalize.merge_avg_sim",
                      "thresholds must satisfy 0 < merge_avg_sim <= same_cluster_sim <= 1");
  }
  if (min_annual_freq < 0) throw ConfigError("normalize.min_annual_freq", "must be non-negative");
  if (!(semantic_q > 0.0 && semantic_q < 1.0)) {
    throw ConfigError("semantic.quantile", "must lie in (0,1)");
  }
  if (workers < 1) throw ConfigError("run.workers", "must be at least 1");
  for (const auto& p : periods) {
    if (p.first > p.last) throw ConfigError("periods." + p.name, "period range is empty");
  }
  try {
    stability.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("stability", e.what());
  }
  try {
    psm.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("psm", e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg;
  cfg.config_path = path;
  try {
    cfg.config_text = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("--config", "cannot read config file " + path.string());
  }
  const TomlTable t = parse_toml(cfg.config_text, path.string());
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&base](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  cfg.papers = resolve(t.get_string_or("paths.papers", ""));
  cfg.entities = resolve(t.get_string_or("paths.entities", ""));
  cfg.embeddings = resolve(t.get_string_or("paths.embeddings", ""));
  cfg.citations = resolve(t.get_string_or("paths.citations", ""));
  cfg.abbreviations = resolve(t.get_string_or("paths.abbreviations", ""));
  cfg.stoplist = resolve(t.get_string_or("paths.stoplist", ""));
  cfg.output = resolve(t.get_string_or("paths.output", "out"));

  cfg.corpus.year_min = static_cast<int>(t.get_int_or("corpus.year_min", 2000));
  cfg.corpus.year_max = static_cast<int>(t.get_int_or("corpus.year_max", 2022));
  cfg.corpus.embedding_dim =
      static_cast<std::size_t>(t.get_int_or("corpus.embedding_dim", 0));
  for (const auto& key : t.keys_under("corpus.category_map")) {
    const std::string target = to_lower(t.get_string("corpus.category_map." + key));
    Sector s;
    if (target == "academic") s = Sector::Academic;
    else if (target == "industry") s = Sector::Industry;
    else if (target == "excluded") s = Sector::Excluded;
    else throw ConfigError("corpus.category_map." + key, "sector must be academic/industry/excluded");
    cfg.corpus.category_overrides[to_lower(key)] = s;
  }

  cfg.same_cluster_sim = t.get_double_or("normalize.same_cluster_sim", 0.95);
  cfg.merge_avg_sim = t.get_double_or("normalize.merge_avg_sim", 0.8);
  cfg.min_annual_freq = static_cast<int>(t.get_int_or("normalize.min_annual_freq", 5));

  cfg.entity_dedup_per_paper = t.get_bool_or("entity.dedup_per_paper", false);

  cfg.semantic_q = t.get_double_or("semantic.quantile", 0.9);
  if (t.has("semantic.threshold")) cfg.semantic_threshold = t.get_double("semantic.threshold");
  cfg.same_year_only = t.get_bool_or("semantic.same_year_only", false);

  cfg.network_weighted = t.get_bool_or("network.weighted", true);
  cfg.louvain_seed = static_cast<uint64_t>(t.get_int_or("network.louvain_seed", 42));
  cfg.shared_partition = t.get_bool_or("network.shared_partition", false);
  cfg.dump_graphs = t.get_bool_or("network.dump_graphs", false);

  if (t.has("citeflow.hardware_terms")) {
    cfg.hardware_terms = t.get_string_array("citeflow.hardware_terms");
  }
  const std::string baseline = t.get_string_or("citeflow.ecc_baseline", "all");
  if (baseline == "all") cfg.ecc_baseline = EccBaseline::AllClassified;
  else if (baseline == "pure") cfg.ecc_baseline = EccBaseline::PureOnly;
  else throw ConfigError("citeflow.ecc_baseline", "must be 'all' or 'pure'");

  const auto period_names = t.keys_under("periods");
  if (period_names.empty()) {
    cfg.periods = default_periods(cfg.corpus.year_min, cfg.corpus.year_max);
  } else {
    for (const auto& name : period_names) {
      const auto range = t.get_int_array("periods." + name);
      if (range.size() != 2) throw ConfigError("periods." + name, "expected [first, last]");
      cfg.periods.push_back(
          {name, static_cast<int>(range[0]), static_cast<int>(range[1])});
    }
  }

  if (t.has("stability.proportions")) {
    cfg.stability.proportions = t.get_double_array("stability.proportions");
  }
  cfg.stability.repetitions = static_cast<int>(t.get_int_or("stability.repetitions", 10));
  cfg.stability.seed = static_cast<uint64_t>(t.get_int_or("stability.seed", 7));
  if (t.has("stability.metrics")) {
    cfg.stability.metrics.clear();
    for (const auto& m : t.get_string_array("stability.metrics")) {
      if (m == "entity-all") cfg.stability.metrics.push_back(StabilityMetric::EntityAll);
      else if (m == "entity-method") cfg.stability.metrics.push_back(StabilityMetric::EntityMethod);
      else if (m == "collaboration-share" || m == "collab-share") {
        cfg.stability.metrics.push_back(StabilityMetric::CollabShare);
      } else {
        throw ConfigError("stability.metrics", "unknown metric '" + m + "'");
      }
    }
  }

  if (t.has("psm.ratios")) {
    cfg.psm.ratios.clear();
    for (int64_t k : t.get_int_array("psm.ratios")) cfg.psm.ratios.push_back(static_cast<int>(k));
  }
  cfg.psm.seed = static_cast<uint64_t>(t.get_int_or("psm.seed", 11));
  cfg.psm.hardware_terms = cfg.hardware_terms;

  cfg.master_seed = static_cast<uint64_t>(t.get_int_or("run.seed", 42));
  cfg.workers = static_cast<int>(t.get_int_or("run.workers", 1));
  return cfg;
}

}  // namespace proxkit
