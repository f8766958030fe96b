#include "vgauss/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "vgauss/asymptotics.hpp"
#include "vgauss/conjunction.hpp"
#include "vgauss/error.hpp"
#include "vgauss/sampler.hpp"

namespace vgauss {

using nlohmann::json;

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

// Typed access to one object of the config tree; errors name the dotted key.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected a table");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const std::string& path() const { return path_; }

  const json& at(const std::string& key) const {
    if (!has(key)) throw ConfigError(join(path_, key), "missing required key");
    return j_.at(key);
  }
  Block block(const std::string& key) const { return Block(at(key), join(path_, key)); }

  double num(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }
  double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

  std::size_t count(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() != std::floor(v.get<double>()))
      throw ConfigError(join(path_, key), "expected a nonnegative integer");
    return static_cast<std::size_t>(v.get<double>());
  }
  std::size_t count(const std::string& key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }

  std::string str(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::vector<double> nums(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<double> nums(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? nums(key) : fallback;
  }

 private:
  const json& j_;
  std::string path_;
};

Profile profile_from(const json& v, const std::string& path) {
  if (v.is_number()) return Profile::constant(v.get<double>());
  Block b(v, path);
  try {
    return Profile::table(b.nums("nodes"), b.nums("values"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

json profile_to(const Profile& p) {
  if (p.is_constant()) return p.values().front();
  return json{{"nodes", p.nodes()}, {"values", p.values()}};
}

CoordinateSpec coord_from(const json& v, const std::string& path) {
  Block b(v, path);
  const std::string type = b.str("type");
  if (type == "stationary") return Stationary{b.num("a", 1.0), b.num("kappa", 1.0)};
  if (type == "locally_stationary") {
    LocallyStationary c;
    c.kappa = b.num("kappa", 1.0);
    c.a_profile = b.has("a") ? profile_from(b.at("a"), join(path, "a")) : Profile::constant(1.0);
    return c;
  }
  if (type == "nonstationary") {
    NonStationary c;
    c.sigma = profile_from(b.at("sigma"), join(path, "sigma"));
    c.alpha = b.num("alpha", 1.0);
    c.a = b.num("a", 1.0);
    c.beta = b.num("beta", 1.0);
    c.b_lower = b.num("b_lower", 0.0);
    c.b_upper = b.num("b_upper", 0.0);
    c.holder_G = b.num("holder_G", 1.0);
    c.holder_gamma = b.num("holder_gamma", 1.0);
    c.holder_rho = b.num("holder_rho", 1.0);
    return c;
  }
  if (type == "fbm") return FractionalBrownian{b.num("kappa", 1.0)};
  throw ConfigError(join(path, "type"), "unknown coordinate type '" + type + "'");
}

json coord_to(const CoordinateSpec& c) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Stationary>) {
          return {{"type", "stationary"}, {"a", x.a}, {"kappa", x.kappa}};
        } else if constexpr (std::is_same_v<T, LocallyStationary>) {
          return {{"type", "locally_stationary"}, {"a", profile_to(x.a_profile)}, {"kappa", x.kappa}};
        } else if constexpr (std::is_same_v<T, NonStationary>) {
          return {{"type", "nonstationary"}, {"sigma", profile_to(x.sigma)}, {"alpha", x.alpha},
                  {"a", x.a},              {"beta", x.beta},                 {"b_lower", x.b_lower},
                  {"b_upper", x.b_upper},  {"holder_G", x.holder_G},         {"holder_gamma", x.holder_gamma},
                  {"holder_rho", x.holder_rho}};
        } else {
          return {{"type", "fbm"}, {"kappa", x.kappa}};
        }
      },
      c);
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.12g}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join_notes(const std::vector<std::string>& notes) {
  std::string out;
  for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
  return out;
}

// Row builder shared by every pipeline.
struct Recorder {
  const ExperimentConfig& cfg;
  ResultsManifest& manifest;

  ResultRow& add(const std::string& estimator, double value, double se, double step, std::size_t R,
                 const std::string& tag, std::string notes = {}) {
    ResultRow r;
    r.experiment_id = cfg.id;
    r.kind = cfg.kind;
    r.estimator = estimator;
    r.value = value;
    r.se = se;
    r.lower_ci = value - 1.96 * se;
    r.upper_ci = value + 1.96 * se;
    r.grid_step = step;
    r.replications = R;
    r.seed_tag = tag;
    r.notes = std::move(notes);
    manifest.rows.push_back(r);
    return manifest.rows.back();
  }

  void error(const std::string& estimator, const std::string& tag, const std::string& what) {
    auto& r = add(estimator, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN(), 0, tag, what);
    r.lower_ci = r.upper_ci = std::numeric_limits<double>::quiet_NaN();
    r.verdict = "error";
  }

  // Runs `fn`; library errors become an error row.
  template <class Fn>
  void guarded(const std::string& estimator, const std::string& tag, Fn fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      error(estimator, tag, e.what());
    }
  }
};

std::string tag_of(const std::string& purpose, std::uint64_t index) { return purpose + "#" + std::to_string(index); }

DriftSpec drift_from(const Block& b, std::size_t n, double kappa) {
  DriftSpec d = DriftSpec::zero(n, kappa);
  if (!b.has("drift")) return d;
  const Block db = b.block("drift");
  d.exponent = db.num("exponent", kappa);
  d.d_lower = db.nums("lower", std::vector<double>(n, 0.0));
  d.d_upper = db.nums("upper", std::vector<double>(n, 0.0));
  if (d.d_lower.size() != n) throw ConfigError(join(db.path(), "lower"), "expected " + std::to_string(n) + " entries");
  if (d.d_upper.size() != n) throw ConfigError(join(db.path(), "upper"), "expected " + std::to_string(n) + " entries");
  return d;
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

void run_constant(const ExperimentConfig& cfg, Recorder& rec) {
  const Block b(cfg.tree.at("constant"), "constant");
  const std::string est = b.str("estimator", "pickands");
  const std::vector<double> C = b.nums("C", {1.0});
  const double kappa = b.num("kappa");
  const std::size_t R = b.count("replications", 20000);
  const std::string method_name = b.str("method", "shift");
  if (method_name != "shift" && method_name != "plain")
    throw ConfigError("constant.method", "expected 'shift' or 'plain'");
  const WindowMethod method = method_name == "shift" ? WindowMethod::shift : WindowMethod::plain;
  const DriftSpec drift = drift_from(b, C.size(), kappa);
  const auto stream = derive_stream(cfg.seed, "constant", 0);
  const std::string tag = tag_of("constant", 0);

  auto add_rungs = [&](const ConstantEstimate& e, const std::string& name, const char* label) {
    PlotSeries plot{name, {}, {}, {}};
    for (const auto& r : e.rungs) {
      rec.add(name, r.value, r.se, e.grid_step, e.replications, tag, fmt::format("{}={}", label, fmt_num(r.x)));
      plot.x.push_back(r.x);
      plot.y.push_back(r.value);
      plot.se.push_back(r.se);
    }
    rec.manifest.plots.push_back(std::move(plot));
  };

  if (est == "window") {
    const double S1 = b.num("S1", 0.0), S2 = b.num("S2", 1.0);
    const double step = b.num("grid_step", default_window_step(S1 + S2, kappa));
    rec.guarded("window", tag, [&] {
      const auto e = estimate_window_constant(C, kappa, drift, S1, S2, step, R, stream, method);
      rec.add("window", e.value, e.se, e.grid_step, e.replications, tag,
              fmt::format("S1={} S2={} method={}", fmt_num(S1), fmt_num(S2), to_string(method)));
    });
  } else if (est == "pickands") {
    const auto ladder = b.nums("S_ladder", {1.0, 2.0, 4.0, 8.0});
    const double step = b.num("grid_step", default_window_step(ladder.back(), kappa));
    rec.guarded("slope", tag, [&] {
      const auto e = estimate_pickands(C, kappa, ladder, step, R, stream, method);
      add_rungs(e, "window", "S");
      rec.add("slope", e.value, e.se, e.grid_step, e.replications, tag, join_notes(e.warnings));
    });
  } else if (est == "piterbarg") {
    const auto ladder = b.nums("S_ladder", {1.0, 2.0, 4.0, 8.0, 16.0});
    const auto variant = piterbarg_variant_from(b.str("variant", "right"));
    const double span = variant == PiterbargVariant::two_sided ? 2.0 * ladder.back() : ladder.back();
    const double step = b.num("grid_step", default_window_step(span, kappa));
    const bool strict = b.flag("strict", false);
    rec.guarded("piterbarg", tag, [&] {
      const auto e = estimate_piterbarg(C, kappa, drift, variant, ladder, step, R, stream, strict, method);
      add_rungs(e, "window", "S");
      auto& row = rec.add(std::string("piterbarg_") + to_string(variant), e.value, e.se, e.grid_step,
                          e.replications, tag, join_notes(e.warnings));
      if (!e.converged) row.verdict = "not_converged";
    });
  } else if (est == "discrete_zero") {
    const auto ladder = b.nums("u_ladder", {0.4, 0.2, 0.1});
    const double horizon = b.num("horizon", 0.0);
    rec.guarded("discrete_zero", tag, [&] {
      const double h = horizon > 0.0 ? horizon : default_discrete_horizon(C, kappa);
      const auto e = estimate_discrete_zero(C, kappa, ladder, h, R, stream);
      add_rungs(e, "discrete_zero_rung", "u");
      rec.add("discrete_zero", e.value, e.se, e.grid_step, e.replications, tag,
              fmt::format("horizon={}", fmt_num(h)) + (e.warnings.empty() ? "" : "; " + join_notes(e.warnings)));
    });
  } else {
    throw ConfigError("constant.estimator", "unknown estimator '" + est + "'");
  }
}

std::vector<double> thresholds_for(const Block& b, const VectorProcessSpec& spec, double u) {
  ThresholdFamily f = ThresholdFamily::uniform(spec.dim());
  if (b.has("c")) f.limits_c = b.nums("c");
  if (b.has("offsets")) f.offsets = b.nums("offsets");
  if (f.limits_c.size() != spec.dim()) throw ConfigError(join(b.path(), "c"), "size does not match the process");
  if (f.offsets.size() != spec.dim()) throw ConfigError(join(b.path(), "offsets"), "size does not match the process");
  return f.at(u);
}

void run_probability(const ExperimentConfig& cfg, Recorder& rec) {
  const Block b(cfg.tree.at("probability"), "probability");
  const auto spec = cfg.process(b.str("process"), "probability.process");
  const auto us = b.nums("u");
  if (us.empty()) throw ConfigError("probability.u", "empty u list");
  const std::size_t R = b.count("replications", 100000);
  const double u_max = *std::max_element(us.begin(), us.end());
  const double step = b.num("grid_step", default_conjunction_step(spec, u_max));
  std::vector<std::vector<double>> th;
  for (double u : us) th.push_back(thresholds_for(b, spec, u));
  const std::string tag = tag_of("probability", 0);
  rec.guarded("direct_mc", tag, [&] {
    const auto grid = SampleGrid::covering(0.0, spec.horizon, step);
    const auto est = estimate_conjunction_curve(spec, th, grid, R, derive_stream(cfg.seed, "probability", 0));
    PlotSeries plot{"probability", {}, {}, {}};
    for (std::size_t k = 0; k < us.size(); ++k) {
      rec.add("direct_mc", est[k].value, est[k].se, est[k].grid_step, R, tag,
              fmt::format("u={} hits={}", fmt_num(us[k]), est[k].hits) +
                  (est[k].warnings.empty() ? "" : "; " + join_notes(est[k].warnings)));
      plot.x.push_back(us[k]);
      plot.y.push_back(est[k].value);
      plot.se.push_back(est[k].se);
    }
    rec.manifest.plots.push_back(std::move(plot));
  });
}

void run_compare(const ExperimentConfig& cfg, Recorder& rec) {
  const Block b(cfg.tree.at("compare"), "compare");
  const auto spec = cfg.process(b.str("process"), "compare.process");
  const auto us = b.nums("u");
  const std::size_t R = b.count("replications", 100000);
  const std::string regime = b.str("approximation", "locally_stationary");
  if (regime != "locally_stationary" && regime != "nonstationary")
    throw ConfigError("compare.approximation", "expected 'locally_stationary' or 'nonstationary'");

  ProviderBudget budget;
  budget.seed = cfg.seed;
  if (b.has("provider")) {
    const Block p = b.block("provider");
    budget.replications = p.count("replications", budget.replications);
    budget.S_ladder = p.nums("S_ladder", budget.S_ladder);
    budget.piterbarg_ladder = p.nums("piterbarg_ladder", budget.piterbarg_ladder);
    budget.grid_step = p.num("grid_step", 0.0);
    budget.closed_forms = p.flag("closed_forms", true);
  }
  const EstimatingProvider provider(budget);
  const double scan_step = b.num("scan_step", spec.horizon / 4096.0);

  PlotSeries plot{"ratio", {}, {}, {}};
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double u = us[k];
    const std::string tag = tag_of("compare", k);
    rec.guarded("compare", tag, [&] {
      const double step = b.num("grid_step", default_conjunction_step(spec, u));
      const auto grid = SampleGrid::covering(0.0, spec.horizon, step);
      AsymptoticApproximation approx;
      std::vector<double> th;
      if (regime == "locally_stationary") {
        ThresholdFamily f = ThresholdFamily::uniform(spec.dim());
        if (b.has("c")) f.limits_c = b.nums("c");
        if (b.has("offsets")) f.offsets = b.nums("offsets");
        th = f.at(u);
        approx = approx_locally_stationary(spec, f, u, provider);
      } else {
        th.assign(spec.dim(), u);
        approx = approx_nonstationary(spec, u, variance_profile(spec, scan_step), provider);
      }
      const auto emp = estimate_conjunction_prob(spec, th, grid, R, derive_stream(cfg.seed, "compare", k));
      rec.add("direct_mc", emp.value, emp.se, emp.grid_step, R, tag,
              fmt::format("u={} hits={}", fmt_num(u), emp.hits));
      const double rel = approx.leading_constant > 0.0 ? approx.leading_se / approx.leading_constant : 0.0;
      rec.add(to_string(approx.regime), approx.value_at_u, rel * approx.value_at_u, emp.grid_step, 0, tag,
              fmt::format("u={} leading={} power={}", fmt_num(u), fmt_num(approx.leading_constant),
                          fmt_num(approx.u_power)) +
                  (approx.notes.empty() ? "" : "; " + join_notes(approx.notes)));
      const auto ratio = compare_with_asymptotic(emp, approx);
      auto& row = rec.add("ratio", ratio.ratio, (ratio.upper - ratio.lower) / 3.92, emp.grid_step, R, tag,
                          fmt::format("u={}", fmt_num(u)) + (ratio.upper_bound_only ? "; zero hits, upper bound" : ""));
      row.lower_ci = ratio.lower;
      row.upper_ci = ratio.upper;
      plot.x.push_back(u);
      plot.y.push_back(ratio.ratio);
      plot.se.push_back(row.se);
    });
  }
  rec.manifest.plots.push_back(std::move(plot));
}

void run_audit(const ExperimentConfig& cfg, Recorder& rec) {
  const Block b(cfg.tree.at("audit"), "audit");
  const std::string type = b.str("type");
  const std::size_t R = b.count("replications", 100000);
  const std::string tag = tag_of("audit", 0);
  const auto stream = derive_stream(cfg.seed, "audit", 0);

  if (type == "slepian") {
    const auto a = cfg.process(b.str("process_a"), "audit.process_a");
    const auto bb = cfg.process(b.str("process_b"), "audit.process_b");
    const double u = b.num("u");
    const double step = b.num("grid_step", default_conjunction_step(a, u));
    rec.guarded("slepian", tag, [&] {
      const auto grid = SampleGrid::covering(0.0, a.horizon, step);
      const auto rep = audit_slepian(a, bb, thresholds_for(b, a, u), grid, R, stream);
      rec.add("slepian_a", rep.p_a.value, rep.p_a.se, step, R, tag, fmt::format("u={}", fmt_num(u)));
      rec.add("slepian_b", rep.p_b.value, rep.p_b.se, step, R, tag, fmt::format("u={}", fmt_num(u)));
      auto& row = rec.add("slepian", rep.p_a.value - rep.p_b.value, rep.pooled_se, step, R, tag,
                          "P_A - P_B; pass iff P_A <= P_B + 3 pooled se");
      row.verdict = to_string(rep.verdict);
    });
  } else if (type == "borell") {
    const auto spec = cfg.process(b.str("process"), "audit.process");
    const auto us = b.nums("u");
    const double step = b.num("grid_step", spec.horizon / 1024.0);
    rec.guarded("borell", tag, [&] {
      const auto grid = SampleGrid::covering(0.0, spec.horizon, step);
      for (const auto& rep : audit_borell(spec, us, grid, R, stream)) {
        auto& row = rec.add("borell", rep.empirical_at_u.value, rep.empirical_at_u.se, step, R, tag,
                            fmt::format("u={} bound={} tau_sq={} mu_hat={} mu_se={}", fmt_num(rep.u),
                                        fmt_num(rep.bound_at_u), fmt_num(rep.tau_sq), fmt_num(rep.mu_hat),
                                        fmt_num(rep.mu_se)));
        row.verdict = to_string(rep.verdict);
      }
    });
  } else if (type == "piterbarg_decay") {
    const auto spec = cfg.process(b.str("process"), "audit.process");
    const auto us = b.nums("u");
    const double step = b.num("grid_step", spec.horizon / 1024.0);
    rec.guarded("piterbarg_decay", tag, [&] {
      const auto grid = SampleGrid::covering(0.0, spec.horizon, step);
      const auto rep = audit_piterbarg_decay(spec, us, grid, R, stream);
      PlotSeries plot{"decay_ratio", {}, {}, {}};
      for (const auto& r : rep.rows) {
        rec.add("decay_ratio", r.ratio, r.estimate.se / r.reference, step, R, tag,
                fmt::format("u={} p={} hits={}", fmt_num(r.u), fmt_num(r.estimate.value), r.estimate.hits));
        plot.x.push_back(r.u);
        plot.y.push_back(r.ratio);
        plot.se.push_back(r.estimate.se / r.reference);
      }
      rec.manifest.plots.push_back(std::move(plot));
      auto& row = rec.add("piterbarg_decay", rep.max_ratio / rep.median_ratio, 0.0, step, R, tag,
                          fmt::format("max/median ratio; nu={} tau_sq={}", fmt_num(rep.nu), fmt_num(rep.tau_sq)));
      row.lower_ci = row.upper_ci = row.value;
      row.verdict = to_string(rep.verdict);
    });
  } else if (type == "double_event") {
    const auto spec = cfg.process(b.str("process"), "audit.process");
    const double u = b.num("u"), S = b.num("S");
    const auto offsets = b.nums("offsets");
    const double step = b.num("grid_step", 0.0);
    rec.guarded("double_event", tag, [&] {
      const auto rep = estimate_double_event(spec, u, S, offsets, R, stream, step);
      rec.add("double_event_single", rep.single.value, rep.single.se, rep.single.grid_step, R, tag,
              fmt::format("u={} S={}", fmt_num(u), fmt_num(S)));
      PlotSeries plot{"double_event", {}, {}, {}};
      for (std::size_t k = 0; k < rep.joint.size(); ++k) {
        rec.add("double_event", rep.joint[k].value, rep.joint[k].se, rep.joint[k].grid_step, R, tag,
                fmt::format("t0={}", fmt_num(offsets[k])));
        plot.x.push_back(offsets[k]);
        plot.y.push_back(rep.joint[k].value);
        plot.se.push_back(rep.joint[k].se);
      }
      rec.manifest.plots.push_back(std::move(plot));
    });
  } else {
    throw ConfigError("audit.type", "unknown audit '" + type + "'");
  }
}

void run_sample_paths(const ExperimentConfig& cfg, Recorder& rec, bool write) {
  const Block b(cfg.tree.at("sample_paths"), "sample_paths");
  const auto spec = cfg.process(b.str("process"), "sample_paths.process");
  const double step = b.num("grid_step", spec.horizon / 1024.0);
  const std::size_t R = b.count("replications", 100);
  if (R < 2) throw ConfigError("sample_paths.replications", "at least 2 replications required");
  const bool dump = b.flag("dump", true);
  const std::string tag = tag_of("paths", 0);
  rec.guarded("sample_paths", tag, [&] {
    const auto grid = SampleGrid::covering(0.0, spec.horizon, step);
    const auto batch = sample_vector(spec, grid, R, derive_stream(cfg.seed, "paths", 0));
    const auto methods = PathGenerator(spec, grid).methods();
    const std::size_t m = grid.count;
    for (std::size_t i = 0; i < spec.dim(); ++i) {
      PlotSeries plot{"variance_" + std::to_string(i), {}, {}, {}};
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          const double v = batch.at(r, i, j);
          s += v;
          s2 += v * v;
        }
        const double var = (s2 - s * s / static_cast<double>(R)) / static_cast<double>(R - 1);
        plot.x.push_back(grid.node(j));
        plot.y.push_back(var);
        plot.se.push_back(var * std::sqrt(2.0 / static_cast<double>(R - 1)));
      }
      const double t_end = grid.end();
      rec.add(methods[i], plot.y.back(), plot.se.back(), step, R, tag,
              fmt::format("coordinate {} sample variance at t={}; model {}", i, fmt_num(t_end),
                          fmt_num(coordinate_variance(spec.coords[i], t_end))));
      rec.manifest.plots.push_back(std::move(plot));
    }
    if (dump && write) {
      std::filesystem::create_directories(cfg.output);
      write_path_dump(cfg.output / "paths.bin", batch);
      rec.manifest.files.push_back("paths.bin");
    }
  });
}

void run_bounds(const ExperimentConfig& cfg, Recorder& rec) {
  const json empty = json::object();
  const Block b(cfg.tree.contains("bounds_table") ? cfg.tree.at("bounds_table") : empty, "bounds_table");
  std::vector<std::size_t> ns;
  for (double v : b.nums("n", {1.0, 2.0, 3.0})) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("bounds_table.n", "expected positive integers");
    ns.push_back(static_cast<std::size_t>(v));
  }
  const auto kappas = b.nums("kappa", {1.0, 2.0});
  for (double k : kappas)
    if (!(k > 0.0 && k <= 2.0)) throw ConfigError("bounds_table.kappa", "kappa must lie in (0,2]");
  std::vector<DriftExample> drifts;
  if (b.has("drifts")) {
    const auto& arr = b.at("drifts");
    if (!arr.is_array()) throw ConfigError("bounds_table.drifts", "expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const Block d(arr[k], "bounds_table.drifts[" + std::to_string(k) + "]");
      DriftExample ex;
      try {
        ex.variant = piterbarg_variant_from(d.str("variant", "right"));
      } catch (const Error& e) {
        throw ConfigError(join(d.path(), "variant"), e.what());
      }
      ex.drift.exponent = d.num("exponent", 1.0);
      ex.drift.d_lower = d.nums("lower", {});
      ex.drift.d_upper = d.nums("upper", {});
      drifts.push_back(ex);
    }
  }
  for (auto& row : emit_bounds_table(ns, kappas, drifts, cfg.id)) {
    row.seed_tag = "none";
    rec.manifest.rows.push_back(row);
  }
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write " + file.string());
  os << text;
}

nlohmann::ordered_json row_json(const ResultRow& r) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  j["experiment_id"] = r.experiment_id;
  j["kind"] = r.kind;
  j["estimator"] = r.estimator;
  j["value"] = num(r.value);
  j["se"] = num(r.se);
  j["lower_ci"] = num(r.lower_ci);
  j["upper_ci"] = num(r.upper_ci);
  j["grid_step"] = num(r.grid_step);
  j["R"] = r.replications;
  j["seed_tag"] = r.seed_tag;
  j["verdict"] = r.verdict;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs and configs
// ---------------------------------------------------------------------------

VectorProcessSpec spec_from_json(const json& tree, const std::string& path) {
  const Block b(tree, path);
  VectorProcessSpec spec;
  spec.horizon = b.num("horizon", 1.0);
  const auto& coords = b.at("coords");
  if (!coords.is_array() || coords.empty()) throw ConfigError(join(path, "coords"), "expected a nonempty array");
  for (std::size_t i = 0; i < coords.size(); ++i)
    spec.coords.push_back(coord_from(coords[i], join(path, "coords") + "[" + std::to_string(i) + "]"));
  return spec;
}

json spec_to_json(const VectorProcessSpec& spec) {
  json coords = json::array();
  for (const auto& c : spec.coords) coords.push_back(coord_to(c));
  return {{"horizon", spec.horizon}, {"coords", coords}};
}

ExperimentConfig ExperimentConfig::from_json(const json& tree) {
  const Block b(tree, "");
  ExperimentConfig cfg;
  cfg.tree = tree;
  cfg.kind = b.str("kind");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
    throw ConfigError("kind", "unknown experiment kind '" + cfg.kind + "'");
  if (b.has("seed")) {
    const auto& s = b.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.output = b.str("output", "results");
  cfg.format = b.str("format", "csv");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format", "expected 'csv' or 'json'");
  if (cfg.kind != "bounds_table" && !b.has(cfg.kind)) throw ConfigError(cfg.kind, "missing experiment block");
  if (b.has("processes")) {
    const auto& procs = b.at("processes");
    if (!procs.is_object()) throw ConfigError("processes", "expected a table of named processes");
    for (const auto& [name, p] : procs.items()) {
      const auto spec = spec_from_json(p, "processes." + name);
      const auto report = validate_spec(spec);
      if (!report.ok()) throw ConfigError("processes." + name, report.summary());
    }
  }
  cfg.id = b.str("id", "");
  if (cfg.id.empty()) cfg.id = cfg.kind + "-" + cfg.hash().substr(0, 8);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("", "cannot open config " + file.string());
  json tree;
  try {
    tree = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return from_json(tree);
}

json ExperimentConfig::to_json() const {
  json out = tree;
  out["kind"] = kind;
  out["seed"] = seed;
  out["output"] = output.string();
  out["format"] = format;
  if (!id.empty()) out["id"] = id;
  return out;
}

std::string ExperimentConfig::hash() const {
  json h = tree;
  h["seed"] = seed;
  h.erase("output");
  h.erase("format");
  h.erase("id");
  return digest_hex(h.dump());
}

VectorProcessSpec ExperimentConfig::process(const std::string& name, const std::string& key_path) const {
  if (!tree.contains("processes") || !tree.at("processes").contains(name))
    throw ConfigError(key_path, "undefined process '" + name + "'");
  return spec_from_json(tree.at("processes").at(name), "processes." + name);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

bool ResultsManifest::any_error() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.verdict == "error"; });
}

bool ResultsManifest::any_failed_verdict() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.verdict == "fail"; });
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment_id,kind,estimator,value,se,lower_ci,upper_ci,grid_step,R,seed_tag,verdict,notes\n";
  for (const auto& r : rows) {
    out += csv_field(r.experiment_id) + ',' + csv_field(r.kind) + ',' + csv_field(r.estimator) + ',' +
           fmt_num(r.value) + ',' + fmt_num(r.se) + ',' + fmt_num(r.lower_ci) + ',' + fmt_num(r.upper_ci) + ',' +
           fmt_num(r.grid_step) + ',' + std::to_string(r.replications) + ',' + csv_field(r.seed_tag) + ',' +
           csv_field(r.verdict) + ',' + csv_field(r.notes) + '\n';
  }
  return out;
}

std::string results_json(const std::vector<ResultRow>& rows) {
  std::string out = "[\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out += "  " + row_json(rows[k]).dump() + (k + 1 < rows.size() ? ",\n" : "\n");
  }
  return out + "]\n";
}

std::string plot_tsv(const PlotSeries& s) {
  std::string out = "x\ty\tse\n";
  for (std::size_t k = 0; k < s.x.size(); ++k)
    out += fmt_num(s.x[k]) + '\t' + fmt_num(s.y[k]) + '\t' + fmt_num(s.se[k]) + '\n';
  return out;
}

ResultsManifest run_experiment(const ExperimentConfig& cfg, bool write) {
  const auto start = std::chrono::steady_clock::now();
  ResultsManifest manifest;
  manifest.config_hash = cfg.hash();
  manifest.master_seed = cfg.seed;
  Recorder rec{cfg, manifest};

  if (cfg.kind == "constant")
    run_constant(cfg, rec);
  else if (cfg.kind == "probability")
    run_probability(cfg, rec);
  else if (cfg.kind == "compare")
    run_compare(cfg, rec);
  else if (cfg.kind == "audit")
    run_audit(cfg, rec);
  else if (cfg.kind == "sample_paths")
    run_sample_paths(cfg, rec, write);
  else
    run_bounds(cfg, rec);

  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!write) return manifest;

  std::filesystem::create_directories(cfg.output);
  const std::string table = cfg.format == "json" ? "results.json" : "results.csv";
  write_text(cfg.output / table, cfg.format == "json" ? results_json(manifest.rows) : results_csv(manifest.rows));
  manifest.files.push_back(table);
  for (const auto& p : manifest.plots) {
    const std::string name = "plot_" + p.name + ".tsv";
    write_text(cfg.output / name, plot_tsv(p));
    manifest.files.push_back(name);
  }

  auto records = nlohmann::ordered_json::array();
  for (const auto& r : manifest.rows) records.push_back(row_json(r));
  nlohmann::ordered_json m = {{"config_hash", manifest.config_hash},
            {"master_seed", manifest.master_seed},
            {"tool_version", manifest.tool_version},
            {"wall_seconds", manifest.wall_seconds},
            {"config", cfg.to_json()},
            {"files", manifest.files},
            {"records", records}};
  write_text(cfg.output / "manifest.json", m.dump(2) + "\n");
  return manifest;
}

int exit_code(const ResultsManifest& manifest) {
  if (manifest.any_error()) return 2;
  if (manifest.any_failed_verdict()) return 3;
  return 0;
}

std::vector<ResultRow> emit_bounds_table(const std::vector<std::size_t>& n_range, const std::vector<double>& kappa_set,
                                         const std::vector<DriftExample>& drifts, const std::string& experiment_id) {
  std::vector<ResultRow> rows;
  for (std::size_t n : n_range) {
    for (double kappa : kappa_set) {
      const std::vector<double> C(n, 1.0);
      const auto b = pickands_bounds(n, C, kappa);
      ResultRow r;
      r.experiment_id = experiment_id;
      r.kind = "bounds_table";
      r.estimator = "pickands_bounds";
      r.value = b.lower;
      r.se = 0.0;
      r.lower_ci = b.lower;
      r.upper_ci = b.upper ? *b.upper : std::numeric_limits<double>::quiet_NaN();
      r.grid_step = std::numeric_limits<double>::quiet_NaN();
      r.notes = fmt::format("n={} kappa={}", n, fmt_num(kappa));
      rows.push_back(r);
      for (const auto& d : drifts) {
        if (d.drift.d_lower.size() != n && d.drift.d_upper.size() != n) continue;
        if (d.drift.exponent != kappa) continue;
        DriftSpec drift = d.drift;
        drift.d_lower.resize(n, 0.0);
        drift.d_upper.resize(n, 0.0);
        ResultRow p = r;
        p.estimator = std::string("piterbarg_lower_") + to_string(d.variant);
        try {
          p.value = piterbarg_lower_bound(C, kappa, drift, d.variant, b.lower);
          p.lower_ci = p.value;
          p.upper_ci = std::numeric_limits<double>::quiet_NaN();
        } catch (const Error& e) {
          p.value = p.lower_ci = p.upper_ci = std::numeric_limits<double>::quiet_NaN();
          p.verdict = "error";
          p.notes += std::string("; ") + e.what();
        }
        rows.push_back(p);
      }
    }
  }
  return rows;
}

}  // namespace vgauss
