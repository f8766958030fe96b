#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vgauss/constants.hpp"
#include "vgauss/process.hpp"

namespace vgauss {

inline constexpr const char* kToolVersion = "0.1.0";

/// Experiment kinds accepted in the "kind" key.
inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"sample_paths", "constant", "probability",
                                              "compare",      "audit",    "bounds_table"};
  return kinds;
}

/// Coordinate tree: {"type": "stationary" | "locally_stationary" |
/// "nonstationary" | "fbm", ...parameters}. Profiles are a number or
/// {"nodes": [...], "values": [...]}.
VectorProcessSpec spec_from_json(const nlohmann::json& tree, const std::string& path);
nlohmann::json spec_to_json(const VectorProcessSpec& spec);

/// Parsed experiment file. `tree` keeps the full document; the kind block
/// is `tree[kind]` and named processes live under `tree["processes"]`.
struct ExperimentConfig {
  std::string kind;
  std::string id;
  std::uint64_t seed = 0;
  std::filesystem::path output = "results";
  std::string format = "csv";
  nlohmann::json tree;

  static ExperimentConfig from_json(const nlohmann::json& tree);
  static ExperimentConfig from_file(const std::filesystem::path& file);
  /// The document with seed/output/format written back.
  nlohmann::json to_json() const;
  /// BLAKE2b of the compact sorted-key dump, without the output directory.
  std::string hash() const;
  /// Named process; ConfigError naming `key_path` when undefined.
  VectorProcessSpec process(const std::string& name, const std::string& key_path) const;
};

/// One line of the results table.
struct ResultRow {
  std::string experiment_id;
  std::string kind;
  std::string estimator;
  double value = 0.0;
  double se = 0.0;
  double lower_ci = 0.0;
  double upper_ci = 0.0;
  double grid_step = 0.0;
  std::size_t replications = 0;
  std::string seed_tag;
  /// pass / inconclusive / fail for audits, "error" for failed records.
  std::string verdict;
  std::string notes;
};

/// Columns x, y, se.
struct PlotSeries {
  std::string name;
  std::vector<double> x, y, se;
};

struct ResultsManifest {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
  std::vector<ResultRow> rows;
  std::vector<PlotSeries> plots;
  std::vector<std::string> files;

  bool any_error() const;
  bool any_failed_verdict() const;
};

/// Column order: experiment_id, kind, estimator, value, se, lower_ci,
/// upper_ci, grid_step, R, seed_tag, verdict, notes.
std::string results_csv(const std::vector<ResultRow>& rows);
std::string results_json(const std::vector<ResultRow>& rows);
std::string plot_tsv(const PlotSeries& series);

/// Runs the pipeline of `config.kind`. Estimator failures become rows with
/// verdict "error". Files (manifest.json, results.csv|json, plot_*.tsv) are
/// written to config.output when `write` is set.
ResultsManifest run_experiment(const ExperimentConfig& config, bool write = true);

/// 0 success, 2 estimator failure, 3 failed audit verdict (1 is reserved for
/// configuration errors, raised before a manifest exists).
int exit_code(const ResultsManifest& manifest);

struct DriftExample {
  PiterbargVariant variant = PiterbargVariant::right;
  DriftSpec drift;
};

/// One pickands_bounds row per (n, kappa) and one piterbarg_lower_bound row per
/// (n, kappa, drift) whose drift has n entries and exponent kappa; C = 1 throughout and the
/// Piterbarg rows use the Pickands lower bound as H.
std::vector<ResultRow> emit_bounds_table(const std::vector<std::size_t>& n_range, const std::vector<double>& kappa_set,
                                         const std::vector<DriftExample>& drifts,
                                         const std::string& experiment_id = "bounds");

}  // namespace vgauss
