#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxkit/config.hpp"
#include "proxkit/util.hpp"
#include "testutil.hpp"

using namespace proxkit;

TEST_CASE("toml subset: scalars, arrays, tables, comments") {
  const auto t = parse_toml(R"(
# top comment
title = "knowledge proximity"  # trailing comment
count = 42
ratio = 0.75
negative = -3
enabled = true
disabled = false
mixed_numbers = [0.1, 0.3, 1]
names = ["a", "b,c", "d \"quoted\""]

[corpus]
year_min = 2000
year_max = 2022

[corpus.category_map]
facility = "academic"

[deep.nested.table]
key = "value"
)",
                           "test");
  CHECK(t.get_string("title") == "knowledge proximity");
  CHECK(t.get_int("count") == 42);
  CHECK(t.get_double("ratio") == 0.75);
  CHECK(t.get_double("count") == 42.0);  // integer accepted as number
  CHECK(t.get_int("negative") == -3);
  CHECK(t.get_bool("enabled"));
  CHECK_FALSE(t.get_bool("disabled"));
  CHECK(t.get_double_array("mixed_numbers") == std::vector<double>{0.1, 0.3, 1.0});
  CHECK(t.get_string_array("names") == std::vector<std::string>{"a", "b,c", "d \"quoted\""});
  CHECK(t.get_int("corpus.year_min") == 2000);
  CHECK(t.get_string("corpus.category_map.facility") == "academic");
  CHECK(t.get_string("deep.nested.table.key") == "value");
  CHECK(t.keys_under("corpus.category_map") == std::vector<std::string>{"facility"});
  CHECK(t.get_int_or("missing", 7) == 7);
  CHECK_THROWS_AS(t.get_int("title"), ConfigError);
  CHECK_THROWS_AS(t.get_string("missing"), ConfigError);
}

TEST_CASE("toml subset: parse errors carry the source line") {
  CHECK_THROWS_AS(parse_toml("key value\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("key = \"unterminated\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[table\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = [1, 2\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = zzz\n", "t"), ConfigError);
}

TEST_CASE("run config: defaults, overrides, validation errors") {
  testutil::TempDir dir("config");
  for (const char* name : {"papers.jsonl", "entities.jsonl", "embeddings.csv", "citations.csv"}) {
    write_file(dir.path / name, "");
  }
  write_file(dir.path / "run.toml", R"(
[paths]
papers = "papers.jsonl"
entities = "entities.jsonl"
embeddings = "embeddings.csv"
citations = "citations.csv"

[corpus]
year_min = 2010
year_max = 2020

[corpus.category_map]
facility = "academic"

[semantic]
quantile = 0.8
threshold = 0.7

[periods]
early = [2010, 2014]
late = [2015, 2020]

[stability]
proportions = [0.2, 0.6]
repetitions = 4
seed = 123

[psm]
ratios = [2]

[run]
seed = 99
workers = 2
)");
  const auto cfg = load_run_config(dir.path / "run.toml");
  CHECK(cfg.corpus.year_min == 2010);
  CHECK(cfg.corpus.category_overrides.at("facility") == Sector::Academic);
  CHECK(cfg.semantic_q == 0.8);
  REQUIRE(cfg.semantic_threshold.has_value());
  CHECK(*cfg.semantic_threshold == 0.7);
  REQUIRE(cfg.periods.size() == 2);
  CHECK(cfg.periods[0].name == "early");
  CHECK(cfg.stability.proportions == std::vector<double>{0.2, 0.6});
  CHECK(cfg.stability.repetitions == 4);
  CHECK(cfg.psm.ratios == std::vector<int>{2});
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.workers == 2);
  CHECK_NOTHROW(cfg.validate());

  // relative paths resolve against the config directory
  CHECK(cfg.papers == dir.path / "papers.jsonl");
}

TEST_CASE("run config: missing input file fails validation with the field path") {
  testutil::TempDir dir("config2");
  write_file(dir.path / "run.toml", R"(
[paths]
papers = "nope.jsonl"
entities = "nope.jsonl"
embeddings = "nope.csv"
citations = "nope.csv"
)");
  const auto cfg = load_run_config(dir.path / "run.toml");
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field_path() == "paths.papers");
  }
}

TEST_CASE("run config: default periods cover the four technology phases") {
  const auto periods = default_periods(2000, 2022);
  REQUIRE(periods.size() == 4);
  CHECK(periods[0].name == "overall");
  CHECK(periods[1].first == 2000);
  CHECK(periods[1].last == 2012);
  CHECK(periods[2].first == 2013);
  CHECK(periods[2].last == 2017);
  CHECK(periods[3].first == 2018);
  CHECK(periods[3].last == 2022);

  // clipped to the corpus range
  const auto clipped = default_periods(2015, 2020);
  for (const auto& p : clipped) {
    CHECK(p.first >= 2015);
    CHECK(p.last <= 2020);
  }
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 0.736, 1e-9, 123456.789, -0.032}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv escape and split round-trip") {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "",
                                           "with\nnewline"};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ",";
    line += csv_escape(fields[i]);
  }
  CHECK(csv_split(line) == fields);
}
