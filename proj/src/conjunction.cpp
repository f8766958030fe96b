#include "vgauss/conjunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "vgauss/error.hpp"
#include "vgauss/parallel.hpp"

namespace vgauss {

ProbEstimate ProbEstimate::from_hits(std::size_t hits, std::size_t replications, double grid_step) {
  ProbEstimate e;
  e.hits = hits;
  e.replications = replications;
  e.grid_step = grid_step;
  const double R = static_cast<double>(replications);
  e.value = static_cast<double>(hits) / R;
  if (hits == 0) {
    e.se = 3.0 / R;
    e.warnings.push_back("rare event: zero hits, se is the rule-of-three bound 3/R");
  } else {
    e.se = std::sqrt(e.value * (1.0 - e.value) / R);
  }
  return e;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::fail: return "fail";
  }
  return "?";
}

namespace {

struct Counts {
  std::vector<std::size_t> hits;
  void ensure(std::size_t k) {
    if (hits.size() < k) hits.resize(k, 0);
  }
  void merge(const Counts& other) {
    ensure(other.hits.size());
    for (std::size_t k = 0; k < other.hits.size(); ++k) hits[k] += other.hits[k];
  }
};

struct Moments {
  Counts counts;
  RunningStats stats;
  void merge(const Moments& other) {
    counts.merge(other.counts);
    stats.merge(other.stats);
  }
};

// Runs `scan(values, acc)` on every replication; values are coordinate-major.
template <class Acc, class Scan>
Acc scan_paths(const VectorProcessSpec& spec, const SampleGrid& grid, std::size_t replications,
               const RngStream& stream, Scan scan) {
  require_valid(spec);
  if (replications < 1000) throw DomainError("conjunction estimate: at least 1000 replications required");
  const PathGenerator gen(spec, grid);
  struct State {
    PathGenerator::ScratchPtr scratch;
    std::vector<double> values;
  };
  return replicate<Acc>(
      replications,
      [&] {
        return State{gen.make_scratch(), std::vector<double>(gen.dim() * gen.nodes())};
      },
      [&](State& st, std::size_t r, Acc& acc) {
        Rng rng(stream.substream(r));
        gen.draw(rng, *st.scratch, st.values);
        scan(std::span<const double>(st.values), acc);
      });
}

// First node index in [lo, hi) at which every coordinate exceeds its threshold.
bool conjunction_hit(std::span<const double> v, std::size_t m, const std::vector<double>& th, std::size_t lo,
                     std::size_t hi, std::size_t stride = 1) {
  const std::size_t n = th.size();
  for (std::size_t j = lo; j < hi; j += stride) {
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i) all = v[i * m + j] > th[i];
    if (all) return true;
  }
  return false;
}

double local_exponent(const CoordinateSpec& c) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NonStationary>)
          return x.alpha;
        else
          return x.kappa;
      },
      c);
}

void check_thresholds(const VectorProcessSpec& spec, const std::vector<double>& th) {
  if (th.size() != spec.dim()) throw DomainError("conjunction estimate: threshold size does not match the spec");
}

double tau_sq_on(const VectorProcessSpec& spec, const SampleGrid& grid) {
  double tau = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.count; ++j) tau = std::min(tau, generalized_variance(spec, grid.node(j)));
  return tau;
}

}  // namespace

double min_local_exponent(const VectorProcessSpec& spec) {
  double k = std::numeric_limits<double>::infinity();
  for (const auto& c : spec.coords) k = std::min(k, local_exponent(c));
  return k;
}

double default_conjunction_step(const VectorProcessSpec& spec, double u) {
  if (!(u > 0.0)) throw DomainError("conjunction grid: u must be positive");
  return std::min(spec.horizon / 1024.0, 0.1 * std::pow(u, -2.0 / min_local_exponent(spec)));
}

SampleGrid default_conjunction_grid(const VectorProcessSpec& spec, double u) {
  return SampleGrid::covering(0.0, spec.horizon, default_conjunction_step(spec, u));
}

ProbEstimate estimate_conjunction_prob(const VectorProcessSpec& spec, const std::vector<double>& thresholds,
                                       const SampleGrid& grid, std::size_t replications, const RngStream& stream) {
  return estimate_conjunction_curve(spec, {thresholds}, grid, replications, stream).front();
}

std::vector<ProbEstimate> estimate_conjunction_curve(const VectorProcessSpec& spec,
                                                     const std::vector<std::vector<double>>& thresholds,
                                                     const SampleGrid& grid, std::size_t replications,
                                                     const RngStream& stream) {
  for (const auto& th : thresholds) check_thresholds(spec, th);
  const std::size_t m = grid.count;
  const auto counts = scan_paths<Counts>(spec, grid, replications, stream, [&](auto v, Counts& acc) {
    acc.ensure(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      if (conjunction_hit(v, m, thresholds[k], 0, m)) ++acc.hits[k];
  });
  std::vector<ProbEstimate> out;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    out.push_back(ProbEstimate::from_hits(k < counts.hits.size() ? counts.hits[k] : 0, replications, grid.step));
  return out;
}

std::vector<ProbEstimate> estimate_nested_refinement(const VectorProcessSpec& spec,
                                                     const std::vector<double>& thresholds, const SampleGrid& fine,
                                                     std::size_t levels, std::size_t replications,
                                                     const RngStream& stream) {
  check_thresholds(spec, thresholds);
  if (levels == 0 || (std::size_t{1} << (levels - 1)) >= fine.count)
    throw DomainError("nested refinement: too many levels for the grid");
  const std::size_t m = fine.count;
  const auto counts = scan_paths<Counts>(spec, fine, replications, stream, [&](auto v, Counts& acc) {
    acc.ensure(levels);
    // a hit at stride 2^k implies a hit at every finer stride
    for (std::size_t k = levels; k-- > 0;) {
      if (conjunction_hit(v, m, thresholds, 0, m, std::size_t{1} << k)) {
        for (std::size_t f = 0; f <= k; ++f) ++acc.hits[f];
        break;
      }
    }
  });
  std::vector<ProbEstimate> out;
  for (std::size_t k = 0; k < levels; ++k)
    out.push_back(ProbEstimate::from_hits(k < counts.hits.size() ? counts.hits[k] : 0, replications,
                                          fine.step * static_cast<double>(std::size_t{1} << k)));
  return out;
}

OrderStatEstimate estimate_order_stat_prob(const VectorProcessSpec& spec, std::size_t r, double u,
                                           const SampleGrid& grid, std::size_t replications,
                                           const RngStream& stream) {
  const std::size_t n = spec.dim();
  if (r < 1 || r > n) throw DomainError("order statistics: r must lie in 1..n");
  const std::size_t m = grid.count;
  const auto counts = scan_paths<Counts>(spec, grid, replications, stream, [&](auto v, Counts& acc) {
    acc.ensure(2);
    bool order_hit = false, min_hit = false;
    for (std::size_t j = 0; j < m && !(order_hit && min_hit); ++j) {
      std::size_t above = 0;
      bool first_r = true;
      for (std::size_t i = 0; i < n; ++i) {
        const bool up = v[i * m + j] > u;
        above += up;
        if (i < r) first_r = first_r && up;
      }
      order_hit = order_hit || above >= r;
      min_hit = min_hit || first_r;
    }
    acc.hits[0] += order_hit;
    acc.hits[1] += min_hit;
  });
  auto hits = [&](std::size_t k) { return k < counts.hits.size() ? counts.hits[k] : 0; };
  return {ProbEstimate::from_hits(hits(0), replications, grid.step),
          ProbEstimate::from_hits(hits(1), replications, grid.step)};
}

DoubleEventEstimate estimate_double_event(const VectorProcessSpec& spec, double u, double S,
                                          const std::vector<double>& t0_offsets, std::size_t replications,
                                          const RngStream& stream, double grid_step) {
  for (const auto& c : spec.coords)
    if (!std::holds_alternative<Stationary>(c))
      throw PreconditionError("double event: every coordinate must be stationary");
  if (!(S > 1.0)) throw DomainError("double event: S must exceed 1");
  if (t0_offsets.empty()) throw DomainError("double event: no offsets");
  for (std::size_t k = 0; k < t0_offsets.size(); ++k) {
    if (!(t0_offsets[k] >= S)) throw DomainError("double event: offsets must be at least S");
    if (k > 0 && !(t0_offsets[k] > t0_offsets[k - 1])) throw DomainError("double event: offsets must increase");
  }
  const double scale = std::pow(u, -2.0 / min_local_exponent(spec));
  const double reach = (t0_offsets.back() + S) * scale;
  if (reach > spec.horizon * (1.0 + 1e-12))
    throw DomainError("double event: the last window ends beyond the horizon");
  const double step = grid_step > 0.0 ? grid_step : default_conjunction_step(spec, u);
  const SampleGrid grid = SampleGrid::covering(0.0, reach, step);
  const std::size_t m = grid.count;

  auto node_range = [&](double lo, double hi) {
    const double eps = 1e-9 * step;
    const auto first = static_cast<std::size_t>(std::ceil((lo - eps) / step));
    const auto last = static_cast<std::size_t>(std::floor((hi + eps) / step));
    return std::pair{first, std::min(last + 1, m)};
  };
  const auto w1 = node_range(0.0, S * scale);
  std::vector<std::pair<std::size_t, std::size_t>> w2;
  for (double t0 : t0_offsets) w2.push_back(node_range(t0 * scale, (t0 + S) * scale));

  const std::vector<double> th(spec.dim(), u);
  const std::size_t K = t0_offsets.size();
  const auto counts = scan_paths<Counts>(spec, grid, replications, stream, [&](auto v, Counts& acc) {
    acc.ensure(K + 1);
    if (!conjunction_hit(v, m, th, w1.first, w1.second)) return;
    ++acc.hits[0];
    for (std::size_t k = 0; k < K; ++k)
      if (conjunction_hit(v, m, th, w2[k].first, w2[k].second)) ++acc.hits[k + 1];
  });
  auto hits = [&](std::size_t k) { return k < counts.hits.size() ? counts.hits[k] : 0; };
  DoubleEventEstimate out;
  out.u = u;
  out.S = S;
  out.offsets = t0_offsets;
  out.single = ProbEstimate::from_hits(hits(0), replications, step);
  for (std::size_t k = 0; k < K; ++k) out.joint.push_back(ProbEstimate::from_hits(hits(k + 1), replications, step));
  return out;
}

SlepianReport audit_slepian(const VectorProcessSpec& spec_a, const VectorProcessSpec& spec_b,
                            const std::vector<double>& thresholds, const SampleGrid& grid, std::size_t replications,
                            const RngStream& stream) {
  require_valid(spec_a);
  require_valid(spec_b);
  if (spec_a.dim() != spec_b.dim()) throw PreconditionError("slepian audit: specs differ in dimension");
  const std::size_t n = spec_a.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < grid.count; ++j) {
      const double t = grid.node(j);
      const double va = coordinate_variance(spec_a.coords[i], t);
      const double vb = coordinate_variance(spec_b.coords[i], t);
      if (std::abs(va - vb) > 1e-12 * std::max(1.0, std::abs(va)))
        throw PreconditionError("slepian audit: variances differ at coordinate " + std::to_string(i));
    }
    for (std::size_t j = 0; j < grid.count; ++j)
      for (std::size_t k = j + 1; k < grid.count; ++k) {
        const double s = grid.node(j), t = grid.node(k);
        if (eval_correlation(spec_a.coords[i], s, t, spec_a.horizon) <
            eval_correlation(spec_b.coords[i], s, t, spec_b.horizon) - 1e-12)
          throw PreconditionError("slepian audit: correlation of A does not dominate B at coordinate " +
                                  std::to_string(i));
      }
  }
  SlepianReport rep;
  rep.p_a = estimate_conjunction_prob(spec_a, thresholds, grid, replications, stream);
  rep.p_b = estimate_conjunction_prob(spec_b, thresholds, grid, replications, stream.substream(std::uint64_t{1} << 40));
  rep.pooled_se = std::hypot(rep.p_a.se, rep.p_b.se);
  rep.verdict = rep.p_a.value <= rep.p_b.value + 3.0 * rep.pooled_se ? Verdict::pass : Verdict::fail;
  return rep;
}

std::vector<BorellReport> audit_borell(const VectorProcessSpec& spec, const std::vector<double>& u_ladder,
                                       const SampleGrid& grid, std::size_t replications, const RngStream& stream) {
  require_valid(spec);
  const std::size_t n = spec.dim();
  const std::size_t m = grid.count;
  const double tau_sq = tau_sq_on(spec, grid);
  if (!(tau_sq > 0.0) || !std::isfinite(tau_sq)) throw PreconditionError("borell audit: tau^2 must be positive");

  // weights sigma_i^{-2} / g at each node; nodes with a zero-variance coordinate give Y = 0
  std::vector<double> w(n * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = grid.node(j);
    const double g = generalized_variance(spec, t);
    if (!std::isfinite(g)) continue;
    for (std::size_t i = 0; i < n; ++i) w[i * m + j] = 1.0 / coordinate_variance(spec.coords[i], t) / g;
  }

  const std::size_t U = u_ladder.size();
  const auto mom = scan_paths<Moments>(spec, grid, replications, stream, [&](auto v, Moments& acc) {
    acc.counts.ensure(U);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      double y = 0.0;
      for (std::size_t i = 0; i < n; ++i) y += w[i * m + j] * v[i * m + j];
      sup = std::max(sup, y);
    }
    acc.stats.add(sup);
    for (std::size_t k = 0; k < U; ++k)
      if (conjunction_hit(v, m, std::vector<double>(n, u_ladder[k]), 0, m)) ++acc.counts.hits[k];
  });

  std::vector<BorellReport> out;
  for (std::size_t k = 0; k < U; ++k) {
    BorellReport rep;
    rep.u = u_ladder[k];
    rep.tau_sq = tau_sq;
    rep.mu_hat = mom.stats.mean;
    rep.mu_se = mom.stats.std_error();
    rep.mu_used = rep.mu_hat + 3.0 * rep.mu_se;
    rep.empirical_at_u = ProbEstimate::from_hits(k < mom.counts.hits.size() ? mom.counts.hits[k] : 0,
                                                 replications, grid.step);
    if (rep.u <= rep.mu_used) {
      rep.bound_at_u = 1.0;
      rep.verdict = Verdict::inconclusive;
    } else {
      const double gap = rep.u - rep.mu_used;
      rep.bound_at_u = std::exp(-0.5 * gap * gap * tau_sq);
      const double p = rep.empirical_at_u.value;
      if (p <= rep.bound_at_u)
        rep.verdict = Verdict::pass;
      else if (p - 3.0 * rep.empirical_at_u.se > rep.bound_at_u)
        rep.verdict = Verdict::fail;
      else
        rep.verdict = Verdict::inconclusive;
    }
    out.push_back(rep);
  }
  return out;
}

double decay_exponent(const VectorProcessSpec& spec) {
  double nu = std::numeric_limits<double>::infinity();
  for (const auto& c : spec.coords) {
    if (const auto* ns = std::get_if<NonStationary>(&c))
      nu = std::min({nu, ns->alpha, ns->holder_gamma});
    else
      nu = std::min(nu, local_exponent(c));
  }
  return nu;
}

DecayReport audit_piterbarg_decay(const VectorProcessSpec& spec, const std::vector<double>& u_ladder,
                                  const SampleGrid& grid, std::size_t replications, const RngStream& stream) {
  if (u_ladder.size() < 3) throw DomainError("decay audit: at least three u values required");
  for (std::size_t k = 1; k < u_ladder.size(); ++k)
    if (!(u_ladder[k] > u_ladder[k - 1])) throw DomainError("decay audit: u ladder must increase");
  DecayReport rep;
  rep.nu = decay_exponent(spec);
  rep.tau_sq = tau_sq_on(spec, grid);
  rep.measure = grid.end() - grid.origin;
  rep.notes.push_back("nu = min(gamma, alpha) = " + std::to_string(rep.nu));

  std::vector<std::vector<double>> th;
  for (double u : u_ladder) th.emplace_back(spec.dim(), u);
  const auto est = estimate_conjunction_curve(spec, th, grid, replications, stream);
  bool any_zero = false;
  std::vector<double> ratios;
  for (std::size_t k = 0; k < u_ladder.size(); ++k) {
    DecayRow row;
    row.u = u_ladder[k];
    row.estimate = est[k];
    row.reference = rep.measure * std::pow(row.u, 2.0 / rep.nu - 1.0) * std::exp(-0.5 * row.u * row.u * rep.tau_sq);
    // zero hits: the rule-of-three bound stands in for the estimate
    const double p = est[k].hits == 0 ? est[k].se : est[k].value;
    any_zero = any_zero || est[k].hits == 0;
    row.ratio = p / row.reference;
    ratios.push_back(row.ratio);
    rep.rows.push_back(row);
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t K = sorted.size();
  rep.median_ratio = K % 2 == 1 ? sorted[K / 2] : 0.5 * (sorted[K / 2 - 1] + sorted[K / 2]);
  rep.max_ratio = sorted.back();
  if (any_zero) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("zero hits at some u; ratios there use the rule-of-three bound");
  } else {
    rep.verdict = rep.max_ratio <= 2.0 * rep.median_ratio ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

RatioReport compare_with_asymptotic(const ProbEstimate& empirical, const AsymptoticApproximation& approx) {
  if (!(approx.value_at_u > 0.0)) throw DomainError("compare: approximation must be positive");
  RatioReport rep;
  rep.grid_step = empirical.grid_step;
  if (empirical.hits == 0) {
    rep.upper_bound_only = true;
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
    rep.lower = 0.0;
    rep.upper = 3.0 / static_cast<double>(empirical.replications) / approx.value_at_u;
    return rep;
  }
  rep.ratio = empirical.value / approx.value_at_u;
  rep.lower = std::max(0.0, empirical.value - 1.96 * empirical.se) / approx.value_at_u;
  rep.upper = (empirical.value + 1.96 * empirical.se) / approx.value_at_u;
  return rep;
}

}  // namespace vgauss
