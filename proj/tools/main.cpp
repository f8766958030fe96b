#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vgauss/error.hpp"
#include "vgauss/experiment.hpp"
#include "vgauss/parallel.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 1;
  std::string format;
};

int run(const std::string& verb, const std::string& kind, const Options& opt) {
  using namespace vgauss;
  try {
    ExperimentConfig cfg;
    if (opt.config.empty()) {
      if (kind != "bounds_table") throw ConfigError("", verb + " needs --config");
      cfg = ExperimentConfig::from_json({{"kind", "bounds_table"}});
    } else {
      cfg = ExperimentConfig::from_file(opt.config);
    }
    if (cfg.kind != kind) throw ConfigError("kind", "config kind '" + cfg.kind + "' does not match verb " + verb);
    if (opt.seed) {
      cfg.seed = *opt.seed;
      cfg.tree["seed"] = *opt.seed;
    }
    if (!opt.out.empty()) cfg.output = opt.out;
    if (!opt.format.empty()) cfg.format = opt.format;
    set_worker_count(opt.workers);

    const auto manifest = run_experiment(cfg);
    for (const auto& r : manifest.rows)
      std::cout << fmt::format("{:<22} {:>14.8g} {:>12.4g}  {}{}\n", r.estimator, r.value, r.se,
                               r.verdict.empty() ? "" : "[" + r.verdict + "] ", r.notes);
    std::cout << fmt::format("{} rows, {:.1f} s, hash {}, written to {}\n", manifest.rows.size(),
                             manifest.wall_seconds, manifest.config_hash, cfg.output.string());
    return exit_code(manifest);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for extremes of vector-valued Gaussian processes"};
  app.require_subcommand(1);
  Options opt;

  const std::map<std::string, std::string> verbs{
      {"sample-paths", "sample_paths"}, {"estimate-constant", "constant"}, {"estimate-prob", "probability"},
      {"compare", "compare"},           {"audit", "audit"},               {"bounds-table", "bounds_table"}};

  for (const auto& [verb, kind] : verbs) {
    auto* sub = app.add_subcommand(verb, "run a " + kind + " experiment");
    sub->add_option("--config", opt.config, "experiment file (JSON)");
    sub->add_option("--seed", opt.seed, "master seed, overrides the config");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--format", opt.format, "results table format")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (const auto& [verb, kind] : verbs)
    if (app.got_subcommand(verb)) return run(verb, kind, opt);
  return 1;
}
