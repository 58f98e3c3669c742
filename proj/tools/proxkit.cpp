// proxkit: knowledge-proximity analysis over a publication corpus.
//
// Subcommands run individual pipeline steps (or `all`) against a TOML config;
// gen-fixture emits a synthetic corpus with a ground-truth sidecar.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "proxkit/config.hpp"
#include "proxkit/fixture.hpp"
#include "proxkit/pipeline.hpp"
#include "proxkit/types.hpp"

namespace {

struct CliOverrides {
  std::string out;
  std::optional<int64_t> seed;
  std::string years;  // "first:last"
  std::optional<double> quantile;
  std::optional<double> threshold;
  std::string entity_class;
  std::string period;
  std::optional<int> ratio;
  std::optional<int> workers;
};

void apply_overrides(proxkit::RunConfig& config, const CliOverrides& o) {
  if (!o.out.empty()) config.output = o.out;
  if (o.seed) {
    const auto s = static_cast<uint64_t>(*o.seed);
    config.master_seed = s;
    config.louvain_seed = s;
    config.stability.seed = s + 1;
    config.psm.seed = s + 2;
  }
  if (!o.years.empty()) {
    const auto colon = o.years.find(':');
    if (colon == std::string::npos) {
      throw proxkit::ConfigError("--years", "expected first:last");
    }
    try {
      config.corpus.year_min = std::stoi(o.years.substr(0, colon));
      config.corpus.year_max = std::stoi(o.years.substr(colon + 1));
    } catch (const std::exception&) {
      throw proxkit::ConfigError("--years", "expected first:last integers");
    }
  }
  if (o.quantile) config.semantic_q = *o.quantile;
  if (o.threshold) config.semantic_threshold = *o.threshold;
  if (o.workers) config.workers = *o.workers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-proximity analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CliOverrides overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "TOML configuration file")->required();
    cmd->add_option("--out", overrides.out, "output directory override");
    cmd->add_option("--seed", overrides.seed, "master seed override");
    cmd->add_option("--years", overrides.years, "year range override, first:last");
    cmd->add_option("--quantile", overrides.quantile, "semantic quantile override");
    cmd->add_option("--threshold", overrides.threshold, "semantic threshold override");
    cmd->add_option("--workers", overrides.workers, "parallel worker count");
    return cmd;
  };

  std::vector<std::pair<std::string, CLI::App*>> step_cmds;
  for (const auto& step : proxkit::kPipelineSteps) {
    step_cmds.emplace_back(step, add_common(app.add_subcommand(step)));
  }
  auto* all_cmd = add_common(app.add_subcommand("all", "run every step"));
  step_cmds.emplace_back("all", all_cmd);

  // step-specific flags
  for (auto& [name, cmd] : step_cmds) {
    if (name == "entity-sim" || name == "all") {
      cmd->add_option("--class", overrides.entity_class, "restrict entity matrices to one class");
    }
    if (name == "regress" || name == "all") {
      cmd->add_option("--period", overrides.period, "run a single named period");
    }
    if (name == "psm" || name == "all") {
      cmd->add_option("--ratio", overrides.ratio, "run a single matching ratio");
    }
  }

  auto* fixture_cmd = app.add_subcommand("gen-fixture", "emit a synthetic corpus");
  std::string fixture_out;
  std::string fixture_spec_path;
  int64_t fixture_seed = 1;
  fixture_cmd->add_option("--out", fixture_out, "fixture directory")->required();
  fixture_cmd->add_option("--spec", fixture_spec_path, "TOML file with a [fixture] table");
  fixture_cmd->add_option("--seed", fixture_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fixture_cmd->parsed()) {
      proxkit::FixtureSpec spec;
      if (!fixture_spec_path.empty()) {
        spec = proxkit::fixture_spec_from_toml(fixture_spec_path);
      }
      const auto paths =
          proxkit::gen_fixture(spec, static_cast<uint64_t>(fixture_seed), fixture_out);
      std::printf("fixture written to %s (config: %s)\n", fixture_out.c_str(),
                  paths.config.string().c_str());
      return 0;
    }

    for (const auto& [name, cmd] : step_cmds) {
      if (!cmd->parsed()) continue;
      proxkit::RunConfig config = proxkit::load_run_config(config_path);
      apply_overrides(config, overrides);
      proxkit::StepOptions options;
      if (!overrides.entity_class.empty()) options.entity_class = overrides.entity_class;
      if (!overrides.period.empty()) options.period = overrides.period;
      if (overrides.ratio) options.psm_ratio = overrides.ratio;
      proxkit::Pipeline pipeline(std::move(config), options);
      pipeline.run(name);
      return 0;
    }
  } catch (const proxkit::ConfigError& e) {
    std::fprintf(stderr, "proxkit: error: config: %s\n", e.what());
    return 2;
  } catch (const proxkit::DataError& e) {
    std::fprintf(stderr, "proxkit: error: data: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "proxkit: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
