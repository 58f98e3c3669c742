#include "proxkit/corpus.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "proxkit/util.hpp"

namespace proxkit {

using nlohmann::json;

int PaperRecord::n_authors() const {
  std::set<int> idx;
  for (const auto& a : affiliations) idx.insert(a.author_index);
  return static_cast<int>(idx.size());
}

int PaperRecord::n_institutions() const {
  std::set<std::string> ids;
  for (const auto& a : affiliations) ids.insert(a.institution_id);
  return static_cast<int>(ids.size());
}

const PaperRecord* Corpus::find(const std::string& paper_id) const {
  auto it = paper_index.find(paper_id);
  return it == paper_index.end() ? nullptr : &papers[it->second];
}

std::span<const float> Corpus::embedding(std::size_t paper_slot) const {
  const std::ptrdiff_t row = embedding_row[paper_slot];
  if (row < 0) return {};
  return {embedding_data.data() + static_cast<std::size_t>(row) * embedding_dim, embedding_dim};
}

std::span<const float> Corpus::embedding_of(const std::string& paper_id) const {
  auto it = paper_index.find(paper_id);
  if (it == paper_index.end()) return {};
  return embedding(it->second);
}

std::span<const std::size_t> Corpus::citation_slots(const std::string& paper_id) const {
  auto it = citations_by_paper.find(paper_id);
  if (it == citations_by_paper.end()) return {};
  return it->second;
}

std::map<PaperType, std::size_t> Corpus::type_counts() const {
  std::map<PaperType, std::size_t> out{{PaperType::Academic, 0},
                                       {PaperType::Industry, 0},
                                       {PaperType::Cooperation, 0},
                                       {PaperType::Excluded, 0}};
  for (const auto& p : papers) ++out[p.type];
  return out;
}

Sector classify_institution(std::string_view raw_category,
                            const std::map<std::string, Sector>& overrides) {
  const std::string key = to_lower(trim(raw_category));
  if (auto it = overrides.find(key); it != overrides.end()) return it->second;
  if (key == "education" || key == "healthcare") return Sector::Academic;
  if (key == "company") return Sector::Industry;
  return Sector::Excluded;
}

PaperType classify_paper(std::span<const Sector> author_sectors) {
  if (author_sectors.empty()) {
    throw ValidationError("classify_paper: empty author sector sequence");
  }
  bool any_academic = false;
  bool any_industry = false;
  for (Sector s : author_sectors) {
    if (s == Sector::Academic) any_academic = true;
    if (s == Sector::Industry) any_industry = true;
  }
  if (any_academic && any_industry) return PaperType::Cooperation;
  if (any_academic) return PaperType::Academic;
  if (any_industry) return PaperType::Industry;
  return PaperType::Excluded;
}

std::vector<Sector> author_sectors(const PaperRecord& paper,
                                   const std::map<std::string, Sector>& overrides) {
  // first listed institution per author, in affiliation order
  std::map<int, std::string> first_category;
  for (const auto& a : paper.affiliations) {
    first_category.emplace(a.author_index, a.category);  // emplace keeps the first
  }
  std::vector<Sector> out;
  out.reserve(first_category.size());
  for (const auto& [idx, cat] : first_category) {
    (void)idx;
    out.push_back(classify_institution(cat, overrides));
  }
  return out;
}

namespace {

[[noreturn]] void malformed(const std::filesystem::path& file, std::size_t line,
                            const std::string& what) {
  throw DataError(file.string(), line, what);
}

int require_int(const json& obj, const char* field, const std::filesystem::path& file,
                std::size_t line) {
  if (!obj.contains(field) || !obj[field].is_number_integer()) {
    malformed(file, line, std::string("missing or non-integer field '") + field + "'");
  }
  return obj[field].get<int>();
}

std::string require_string(const json& obj, const char* field, const std::filesystem::path& file,
                           std::size_t line) {
  if (!obj.contains(field) || !obj[field].is_string()) {
    malformed(file, line, std::string("missing or non-string field '") + field + "'");
  }
  return obj[field].get<std::string>();
}

std::vector<PaperRecord> load_papers(const std::filesystem::path& path, const CorpusConfig& cfg,
                                     LoadReport& report) {
  std::ifstream in(path);
  if (!in) malformed(path, 0, "cannot open papers file");
  std::vector<PaperRecord> papers;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      malformed(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    PaperRecord p;
    p.paper_id = require_string(obj, "paper_id", path, line_no);
    p.year = require_int(obj, "year", path, line_no);
    p.title = require_string(obj, "title", path, line_no);
    if (obj.contains("abstract") && obj["abstract"].is_string()) {
      p.abstract = obj["abstract"].get<std::string>();
    }
    if (obj.contains("affiliations")) {
      if (!obj["affiliations"].is_array()) malformed(path, line_no, "affiliations must be an array");
      for (const auto& a : obj["affiliations"]) {
        Affiliation aff;
        aff.author_index = require_int(a, "author_index", path, line_no);
        aff.institution_id = require_string(a, "institution_id", path, line_no);
        aff.category = require_string(a, "category", path, line_no);
        p.affiliations.push_back(std::move(aff));
      }
    }
    if (!seen.insert(p.paper_id).second) {
      malformed(path, line_no, "duplicate paper_id '" + p.paper_id + "'");
    }
    if (p.year < cfg.year_min || p.year > cfg.year_max) {
      ++report.papers_dropped_year;
      continue;
    }
    if (p.affiliations.empty()) {
      p.type = PaperType::Excluded;  // no classified author
    } else {
      const auto sectors = author_sectors(p, cfg.category_overrides);
      p.type = classify_paper(sectors);
    }
    papers.push_back(std::move(p));
    ++report.papers_loaded;
  }
  return papers;
}

void load_mentions(const std::filesystem::path& path, Corpus& corpus, LoadReport& report) {
  std::ifstream in(path);
  if (!in) malformed(path, 0, "cannot open entities file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      malformed(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    EntityMention m;
    m.paper_id = require_string(obj, "paper_id", path, line_no);
    m.surface = require_string(obj, "surface", path, line_no);
    const auto cls = entity_class_from_string(require_string(obj, "class", path, line_no));
    if (!cls) malformed(path, line_no, "unknown entity class");
    m.cls = *cls;
    const auto it = corpus.paper_index.find(m.paper_id);
    if (it == corpus.paper_index.end()) {
      ++report.mentions_dropped_dangling;
      if (report.warnings.size() < 20) {
        report.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                  ": entity mention for unknown paper '" + m.paper_id +
                                  "' dropped");
      }
      continue;
    }
    m.year = corpus.papers[it->second].year;
    corpus.mentions.push_back(std::move(m));
    ++report.mentions_loaded;
  }
}

void load_embeddings_csv(const std::filesystem::path& path, const CorpusConfig& cfg,
                         Corpus& corpus, LoadReport& report) {
  std::ifstream in(path);
  if (!in) malformed(path, 0, "cannot open embeddings file");
  std::string line;
  if (!std::getline(in, line)) return;  // empty file: no embeddings
  const auto header = csv_split(line);
  if (header.empty() || header[0] != "paper_id") {
    malformed(path, 1, "embeddings CSV must start with a 'paper_id,...' header");
  }
  const std::size_t dim = header.size() - 1;
  if (cfg.embedding_dim != 0 && cfg.embedding_dim != dim) {
    malformed(path, 1,
              "embedding dimension " + std::to_string(dim) + " does not match configured " +
                  std::to_string(cfg.embedding_dim));
  }
  corpus.embedding_dim = dim;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != dim + 1) {
      malformed(path, line_no, "expected " + std::to_string(dim + 1) + " fields");
    }
    const auto it = corpus.paper_index.find(fields[0]);
    if (it == corpus.paper_index.end()) {
      ++report.embeddings_dropped_dangling;
      continue;
    }
    std::vector<float> row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      try {
        row[j] = std::stof(fields[j + 1]);
      } catch (const std::exception&) {
        malformed(path, line_no, "invalid real value '" + fields[j + 1] + "'");
      }
      if (!std::isfinite(row[j])) malformed(path, line_no, "non-finite embedding component");
    }
    const std::ptrdiff_t row_idx =
        static_cast<std::ptrdiff_t>(corpus.embedding_data.size() / dim);
    corpus.embedding_data.insert(corpus.embedding_data.end(), row.begin(), row.end());
    corpus.embedding_row[it->second] = row_idx;
    corpus.papers[it->second].has_embedding = true;
    ++report.embeddings_loaded;
  }
}

void load_embeddings_bin(const std::filesystem::path& path, const CorpusConfig& cfg,
                         Corpus& corpus, LoadReport& report) {
  if (cfg.embedding_dim == 0) {
    malformed(path, 0, "binary embeddings require embedding_dim in the config");
  }
  const std::size_t dim = cfg.embedding_dim;
  corpus.embedding_dim = dim;
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed(path, 0, "cannot open embeddings file");
  std::size_t record = 0;
  while (true) {
    unsigned char len_bytes[4];
    in.read(reinterpret_cast<char*>(len_bytes), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4) malformed(path, record + 1, "truncated record header");
    ++record;
    const uint32_t id_len = static_cast<uint32_t>(len_bytes[0]) |
                            (static_cast<uint32_t>(len_bytes[1]) << 8) |
                            (static_cast<uint32_t>(len_bytes[2]) << 16) |
                            (static_cast<uint32_t>(len_bytes[3]) << 24);
    if (id_len == 0 || id_len > 4096) malformed(path, record, "implausible paper_id length");
    std::string id(id_len, '\0');
    in.read(id.data(), id_len);
    if (static_cast<uint32_t>(in.gcount()) != id_len) malformed(path, record, "truncated paper_id");
    std::vector<float> row(dim);
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(dim * 4));
    if (static_cast<std::size_t>(in.gcount()) != dim * 4) {
      malformed(path, record, "truncated embedding row");
    }
    for (float v : row) {
      if (!std::isfinite(v)) malformed(path, record, "non-finite embedding component");
    }
    const auto it = corpus.paper_index.find(id);
    if (it == corpus.paper_index.end()) {
      ++report.embeddings_dropped_dangling;
      continue;
    }
    const std::ptrdiff_t row_idx =
        static_cast<std::ptrdiff_t>(corpus.embedding_data.size() / dim);
    corpus.embedding_data.insert(corpus.embedding_data.end(), row.begin(), row.end());
    corpus.embedding_row[it->second] = row_idx;
    corpus.papers[it->second].has_embedding = true;
    ++report.embeddings_loaded;
  }
}

void load_citations(const std::filesystem::path& path, Corpus& corpus, LoadReport& report) {
  std::ifstream in(path);
  if (!in) malformed(path, 0, "cannot open citations file");
  std::string line;
  if (!std::getline(in, line)) return;
  if (csv_split(line) != std::vector<std::string>{"citing_id", "cited_key", "cited_year",
                                                  "cited_category"}) {
    malformed(path, 1, "citations CSV must have header citing_id,cited_key,cited_year,cited_category");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != 4) malformed(path, line_no, "expected 4 fields");
    CitationEdge e;
    e.citing_id = fields[0];
    e.cited_key = fields[1];
    try {
      e.cited_year = std::stoi(fields[2]);
    } catch (const std::exception&) {
      malformed(path, line_no, "invalid cited_year '" + fields[2] + "'");
    }
    const auto t = paper_type_from_string(fields[3]);
    if (!t) malformed(path, line_no, "unknown cited_category '" + fields[3] + "'");
    e.cited_type = *t;
    const auto it = corpus.paper_index.find(e.citing_id);
    if (it == corpus.paper_index.end()) {
      ++report.citations_dropped_dangling;
      if (report.warnings.size() < 20) {
        report.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                  ": citation from unknown paper '" + e.citing_id + "' dropped");
      }
      continue;
    }
    if (e.cited_year > corpus.papers[it->second].year) {
      ++report.citations_dropped_order;
      if (report.warnings.size() < 20) {
        report.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                  ": reference dated after citing paper dropped");
      }
      continue;
    }
    corpus.citations.push_back(std::move(e));
    ++report.citations_loaded;
  }
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& paper_path,
                   const std::filesystem::path& entity_path,
                   const std::filesystem::path& embedding_path,
                   const std::filesystem::path& citation_path, const CorpusConfig& config,
                   LoadReport* report_out) {
  LoadReport local;
  LoadReport& report = report_out ? *report_out : local;
  report = LoadReport{};

  Corpus corpus;
  corpus.papers = load_papers(paper_path, config, report);
  std::sort(corpus.papers.begin(), corpus.papers.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
  corpus.paper_index.reserve(corpus.papers.size());
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    corpus.paper_index.emplace(corpus.papers[i].paper_id, i);
  }
  corpus.embedding_row.assign(corpus.papers.size(), -1);

  if (!entity_path.empty()) load_mentions(entity_path, corpus, report);
  if (!embedding_path.empty()) {
    if (to_lower(embedding_path.extension().string()) == ".csv") {
      load_embeddings_csv(embedding_path, config, corpus, report);
    } else {
      load_embeddings_bin(embedding_path, config, corpus, report);
    }
  }
  if (!citation_path.empty()) load_citations(citation_path, corpus, report);

  for (std::size_t i = 0; i < corpus.citations.size(); ++i) {
    corpus.citations_by_paper[corpus.citations[i].citing_id].push_back(i);
  }
  return corpus;
}

}  // namespace proxkit
