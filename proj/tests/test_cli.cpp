// End-to-end checks against the installed binary: subcommands, exit codes,
// and flag overrides.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "proxkit/util.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return PROXKIT_CLI_PATH; }

int run(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli: gen-fixture then validate exits 0 with zero drops") {
  testutil::TempDir dir("cli_fix");
  REQUIRE(run("gen-fixture --out " + dir.path.string() + " --seed 5") == 0);
  CHECK(fs::exists(dir.path / "papers.jsonl"));
  CHECK(fs::exists(dir.path / "config.toml"));

  CHECK(run("validate --config " + (dir.path / "config.toml").string()) == 0);
  const auto report = proxkit::read_file(dir.path / "out" / "validate_report.json");
  CHECK(report.find("\"total_dropped\": 0") != std::string::npos);
}

TEST_CASE("cli: config errors exit 2, data errors exit 3") {
  testutil::TempDir dir("cli_err");
  CHECK(run("validate --config " + (dir.path / "missing.toml").string()) == 2);

  proxkit::write_file(dir.path / "bad.toml", "[paths]\npapers = \"nope.jsonl\"\n");
  CHECK(run("validate --config " + (dir.path / "bad.toml").string()) == 2);

  // malformed papers file: data error
  proxkit::write_file(dir.path / "papers.jsonl", "not json\n");
  proxkit::write_file(dir.path / "entities.jsonl", "");
  proxkit::write_file(dir.path / "embeddings.csv", "");
  proxkit::write_file(dir.path / "citations.csv", "citing_id,cited_key,cited_year,cited_category\n");
  proxkit::write_file(dir.path / "cfg.toml",
                      "[paths]\npapers = \"papers.jsonl\"\nentities = \"entities.jsonl\"\n"
                      "embeddings = \"embeddings.csv\"\ncitations = \"citations.csv\"\n");
  CHECK(run("validate --config " + (dir.path / "cfg.toml").string()) == 3);

  // unknown flag / missing subcommand
  CHECK(run("") != 0);
  CHECK(run("validate") != 0);  // --config required
}

TEST_CASE("cli: entity-sim --class emits only that matrix; seed override applies") {
  testutil::TempDir dir("cli_steps");
  REQUIRE(run("gen-fixture --out " + dir.path.string() + " --seed 6") == 0);
  const std::string cfg = (dir.path / "config.toml").string();

  const std::string out1 = (dir.path / "only_method").string();
  REQUIRE(run("entity-sim --config " + cfg + " --out " + out1 + " --class method") == 0);
  CHECK(fs::exists(fs::path(out1) / "entity_sim_method.csv"));
  CHECK_FALSE(fs::exists(fs::path(out1) / "entity_sim_all.csv"));

  const std::string out2 = (dir.path / "net").string();
  REQUIRE(run("network --config " + cfg + " --out " + out2 + " --seed 123") == 0);
  const auto mod = proxkit::read_file(fs::path(out2) / "network_modularity.csv");
  CHECK(mod.find("year,type,modularity_q,seed") == 0);
}

TEST_CASE("cli: all twice with the same seed produces byte-identical data files") {
  testutil::TempDir dir("cli_det");
  REQUIRE(run("gen-fixture --out " + dir.path.string() + " --seed 9") == 0);
  const std::string cfg = (dir.path / "config.toml").string();
  const fs::path out_a = dir.path / "run_a";
  const fs::path out_b = dir.path / "run_b";
  REQUIRE(run("all --config " + cfg + " --out " + out_a.string()) == 0);
  REQUIRE(run("all --config " + cfg + " --out " + out_b.string()) == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(out_a)) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    CHECK(proxkit::read_file(out_a / name) == proxkit::read_file(out_b / name));
    ++compared;
  }
  CHECK(compared > 10);
}
