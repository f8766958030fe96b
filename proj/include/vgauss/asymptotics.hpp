#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vgauss/constants.hpp"
#include "vgauss/process.hpp"

namespace vgauss {

enum class Regime { locally_stationary, ns_case_i, ns_case_ii, ns_case_iii, local_window };
const char* to_string(Regime r);

/// value_at_u = leading_constant * u^u_power * prod Psi(tail_args).
struct AsymptoticApproximation {
  Regime regime = Regime::locally_stationary;
  double leading_constant = 0.0;
  double leading_se = 0.0;
  double u_power = 0.0;
  std::vector<double> tail_args;
  double u = 0.0;
  double value_at_u = 0.0;
  double log_value_at_u = 0.0;
  std::vector<std::string> notes;
};

/// Source of Pickands, Piterbarg and window constants for the formulas.
/// Implementations must be safe for concurrent calls.
class ConstantProvider {
 public:
  virtual ~ConstantProvider() = default;
  /// H_{C B_kappa}.
  virtual ConstantEstimate pickands(const std::vector<double>& C, double kappa) const = 0;
  /// Piterbarg constant of the given variant (limit S -> infinity).
  virtual ConstantEstimate piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                     PiterbargVariant variant) const = 0;
  /// H_{C B_kappa, d}[-S1, S2].
  virtual ConstantEstimate window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                                  double S2) const = 0;
};

/// n = 1 with kappa in {1,2}: limits and zero-drift one-sided windows in
/// closed form. Everything else raises ProviderError.
class ClosedFormProvider : public ConstantProvider {
 public:
  ConstantEstimate pickands(const std::vector<double>& C, double kappa) const override;
  ConstantEstimate piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                             PiterbargVariant variant) const override;
  ConstantEstimate window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                          double S2) const override;
};

/// Fixed table of values. Pickands lookups fall back to the scaling
/// H_{lambda C} = lambda^{2/kappa} H_C when a proportional entry exists.
class TableProvider : public ConstantProvider {
 public:
  void add_pickands(const std::vector<double>& C, double kappa, const ConstantEstimate& value);
  void add_piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift, PiterbargVariant variant,
                     const ConstantEstimate& value);
  void add_window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1, double S2,
                  const ConstantEstimate& value);

  ConstantEstimate pickands(const std::vector<double>& C, double kappa) const override;
  ConstantEstimate piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                             PiterbargVariant variant) const override;
  ConstantEstimate window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                          double S2) const override;

 private:
  struct PickandsEntry {
    std::vector<double> C;
    double kappa;
    ConstantEstimate value;
  };
  std::vector<PickandsEntry> pickands_;
  std::map<std::string, ConstantEstimate> keyed_;
};

/// Estimation budget of EstimatingProvider.
struct ProviderBudget {
  std::vector<double> S_ladder{1.0, 2.0, 4.0, 8.0};
  std::vector<double> piterbarg_ladder{1.0, 2.0, 4.0, 8.0, 16.0};
  /// Window grid step; 0 selects S_max/1024 (kappa <= 1) or S_max/512.
  double grid_step = 0.0;
  std::size_t replications = 20000;
  std::uint64_t seed = 0;
  /// Use closed forms where they exist (n = 1, kappa in {1,2}).
  bool closed_forms = true;
};

/// Estimates on demand and caches by request. Pickands requests are
/// normalised to C_1 = 1 and rescaled, so proportional C share one estimate.
class EstimatingProvider : public ConstantProvider {
 public:
  explicit EstimatingProvider(ProviderBudget budget) : budget_(std::move(budget)) {}

  ConstantEstimate pickands(const std::vector<double>& C, double kappa) const override;
  ConstantEstimate piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                             PiterbargVariant variant) const override;
  ConstantEstimate window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                          double S2) const override;

  std::size_t cache_size() const;

 private:
  ProviderBudget budget_;
  ClosedFormProvider closed_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, ConstantEstimate> cache_;
};

/// Theorem for locally stationary coordinates:
/// (int_0^T H_{c sqrt(a(t)) B_kappa} dt) u^{2/kappa} prod Psi(f_i(u)),
/// kappa = min kappa_i, coordinates with larger kappa_i drop out of H.
AsymptoticApproximation approx_locally_stationary(const VectorProcessSpec& spec, const ThresholdFamily& thresholds,
                                                  double u, const ConstantProvider& provider);

/// Theta from the boundary table: t0 = 0 -> theta_upper^{-1/beta},
/// interior -> theta_lower^{-1/beta} + theta_upper^{-1/beta}, t0 = T -> theta_lower^{-1/beta}.
double theta_factor(const VarianceProfileReport& profile);

/// Case alpha < beta assembled from a Pickands value:
/// H Theta Gamma(1/beta + 1) u^{2/alpha - 2/beta} prod Psi(c_i u).
AsymptoticApproximation ns_case_i(double pickands_value, double pickands_se, const VarianceProfileReport& profile,
                                  double alpha, const std::vector<double>& c, double u);

/// Non-stationary coordinates, dispatched on alpha = min alpha_i against beta.
AsymptoticApproximation approx_nonstationary(const VectorProcessSpec& spec, double u,
                                             const VarianceProfileReport& profile,
                                             const ConstantProvider& provider);

/// H_{C,d}[-S1,S2] prod Psi(f_i(u)) for a local window of the scaled process.
AsymptoticApproximation local_window_approx(const std::vector<double>& C_effective, double kappa,
                                            const DriftSpec& drift, double S1, double S2,
                                            const std::vector<double>& thresholds_at_u, double u,
                                            const ConstantProvider& provider);

/// n!/((n-r)! r!) times the min-of-r probability.
double order_stats_approx(std::size_t n, std::size_t r, double base_prob_min_r);

}  // namespace vgauss
