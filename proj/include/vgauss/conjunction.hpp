#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vgauss/asymptotics.hpp"
#include "vgauss/process.hpp"
#include "vgauss/rng.hpp"
#include "vgauss/sampler.hpp"

namespace vgauss {

/// hits / replications with the binomial se. Zero hits report the
/// rule-of-three bound 3/R as se and carry a warning.
struct ProbEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t hits = 0;
  std::size_t replications = 0;
  double grid_step = 0.0;
  std::vector<std::string> warnings;

  static ProbEstimate from_hits(std::size_t hits, std::size_t replications, double grid_step);
};

enum class Verdict { pass, inconclusive, fail };
const char* to_string(Verdict v);

/// Smallest kappa (alpha for non-stationary coordinates) over the coordinates.
double min_local_exponent(const VectorProcessSpec& spec);

/// min(T/1024, 0.1 u^{-2/kappa_min}).
double default_conjunction_step(const VectorProcessSpec& spec, double u);
/// Grid covering [0, T] at the default step.
SampleGrid default_conjunction_grid(const VectorProcessSpec& spec, double u);

/// P(exists grid node t with X_i(t) > thresholds_i for all i).
ProbEstimate estimate_conjunction_prob(const VectorProcessSpec& spec, const std::vector<double>& thresholds,
                                       const SampleGrid& grid, std::size_t replications, const RngStream& stream);

/// One estimate per threshold vector, all from the same paths.
std::vector<ProbEstimate> estimate_conjunction_curve(const VectorProcessSpec& spec,
                                                     const std::vector<std::vector<double>>& thresholds,
                                                     const SampleGrid& grid, std::size_t replications,
                                                     const RngStream& stream);

/// Entry k scans every 2^k-th node of `fine` (same paths), so entry k+1 never
/// exceeds entry k.
std::vector<ProbEstimate> estimate_nested_refinement(const VectorProcessSpec& spec,
                                                     const std::vector<double>& thresholds, const SampleGrid& fine,
                                                     std::size_t levels, std::size_t replications,
                                                     const RngStream& stream);

struct OrderStatEstimate {
  /// sup_t X_{r:n}(t) > u: at some node at least r coordinates exceed u.
  ProbEstimate order_stat;
  /// conjunction of the first r coordinates.
  ProbEstimate min_of_r;
};

OrderStatEstimate estimate_order_stat_prob(const VectorProcessSpec& spec, std::size_t r, double u,
                                           const SampleGrid& grid, std::size_t replications,
                                           const RngStream& stream);

struct DoubleEventEstimate {
  double u = 0.0;
  double S = 0.0;
  /// First window [0, S u^{-2/kappa}] alone.
  ProbEstimate single;
  /// Joint hits with [t0, t0 + S] u^{-2/kappa}, one per offset.
  std::vector<ProbEstimate> joint;
  std::vector<double> offsets;
};

/// Both windows at threshold u on every coordinate; grid_step 0 selects the
/// default conjunction step.
DoubleEventEstimate estimate_double_event(const VectorProcessSpec& spec, double u, double S,
                                          const std::vector<double>& t0_offsets, std::size_t replications,
                                          const RngStream& stream, double grid_step = 0.0);

struct SlepianReport {
  ProbEstimate p_a;
  ProbEstimate p_b;
  double pooled_se = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Checks matched variances and R_A >= R_B on the grid (PreconditionError
/// otherwise), then pass iff P_A <= P_B + 3 pooled se.
SlepianReport audit_slepian(const VectorProcessSpec& spec_a, const VectorProcessSpec& spec_b,
                            const std::vector<double>& thresholds, const SampleGrid& grid, std::size_t replications,
                            const RngStream& stream);

struct BorellReport {
  double u = 0.0;
  double tau_sq = 0.0;
  double mu_hat = 0.0;
  double mu_se = 0.0;
  /// mu_hat + 3 mu_se, used in the bound.
  double mu_used = 0.0;
  double bound_at_u = 0.0;
  ProbEstimate empirical_at_u;
  Verdict verdict = Verdict::inconclusive;
};

/// tau^2 = min over the grid of g(t); mu = E sup Y with
/// Y = sum_i (sigma_i^{-2}/g) X_i estimated from the same paths.
std::vector<BorellReport> audit_borell(const VectorProcessSpec& spec, const std::vector<double>& u_ladder,
                                       const SampleGrid& grid, std::size_t replications, const RngStream& stream);

struct DecayRow {
  double u = 0.0;
  ProbEstimate estimate;
  double reference = 0.0;
  double ratio = 0.0;
};

struct DecayReport {
  double nu = 0.0;
  double tau_sq = 0.0;
  double measure = 0.0;
  std::vector<DecayRow> rows;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
};

/// Exponent of the increment bound: min over coordinates of min(gamma_i, alpha_i)
/// (kappa for stationary and fBm coordinates).
double decay_exponent(const VectorProcessSpec& spec);

/// ratio(u) = P(u) / (T u^{2/nu - 1} exp(-u^2 tau^2 / 2)); pass when the
/// largest ratio is at most twice the median.
DecayReport audit_piterbarg_decay(const VectorProcessSpec& spec, const std::vector<double>& u_ladder,
                                  const SampleGrid& grid, std::size_t replications, const RngStream& stream);

struct RatioReport {
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double grid_step = 0.0;
  /// Zero hits: ratio is undefined and `upper` is the rule-of-three bound.
  bool upper_bound_only = false;
};

/// empirical / approx.value_at_u with a 95% band from the MC se.
RatioReport compare_with_asymptotic(const ProbEstimate& empirical, const AsymptoticApproximation& approx);

}  // namespace vgauss
