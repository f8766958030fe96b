#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vgauss/rng.hpp"

namespace vgauss {

/// d_i(t) = d_lower_i |t|^exponent for t <= 0, d_upper_i |t|^exponent for t > 0.
struct DriftSpec {
  double exponent = 1.0;
  std::vector<double> d_lower;
  std::vector<double> d_upper;

  static DriftSpec zero(std::size_t n, double exponent = 1.0);
  static DriftSpec one_sided(std::vector<double> d_upper, double exponent);
  static DriftSpec symmetric(std::vector<double> d, double exponent);
  double at(std::size_t i, double t) const;
  bool is_zero() const;
};

enum class EstimatorTag { window, slope, discrete_zero, closed_form, bound };
const char* to_string(EstimatorTag tag);

enum class PiterbargVariant { right, left, two_sided };
const char* to_string(PiterbargVariant v);
PiterbargVariant piterbarg_variant_from(const std::string& name);

/// One rung of a ladder (window size S or lattice step u).
struct RungValue {
  double x = 0.0;
  double value = 0.0;
  double se = 0.0;
};

struct ConstantEstimate {
  double value = 0.0;
  double se = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double grid_step = 0.0;
  std::size_t replications = 0;
  EstimatorTag tag = EstimatorTag::window;
  /// Per-rung values for ladder estimators (window values for the slope and
  /// Piterbarg estimators, u^{-1} P for discrete-zero).
  std::vector<RungValue> rungs;
  std::vector<std::string> warnings;
  bool converged = true;
};

/// How a replication is turned into a window-constant sample.
/// plain: EWV of the window itself (heavy-tailed: its mean is carried by rare
/// high paths). shift: the path is viewed from a window node K and the sample is
/// m exp(-d(t_K)) EWV / sum_j exp(sum_i xi_i(t_j)), which has the same mean on
/// the grid and is bounded by m.
enum class WindowMethod { shift, plain };
const char* to_string(WindowMethod m);

/// Shift nodes per replication (one per stratum of the window).
inline constexpr std::size_t kShiftStrata = 8;

/// Default window grid step: S/1024 for kappa <= 1, S/512 above.
double default_window_step(double S, double kappa);

/// Monte Carlo mean of EWV{xi(t_j)} over the grid of [-S1, S2] with
/// xi_i(t) = sqrt2 C_i B_i(t) - C_i^2 |t|^kappa - d_i(t).
ConstantEstimate estimate_window_constant(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                          double S1, double S2, double grid_step, std::size_t replications,
                                          const RngStream& stream, WindowMethod method = WindowMethod::shift);

/// Least-squares slope of H(S) against S over the ladder. All rungs share
/// each replication's path (prefixes of the longest window), so the slope
/// statistic is formed per replication and its se is exact. The first rung is
/// dropped when its residual exceeds 3 se and at least three rungs remain.
ConstantEstimate estimate_pickands(const std::vector<double>& C, double kappa, const std::vector<double>& S_ladder,
                                   double grid_step, std::size_t replications, const RngStream& stream,
                                   WindowMethod method = WindowMethod::shift);

/// Window constant on [0,S], [-S,0] or [-S,S] along the ladder, stopping at the
/// first rung that differs from its predecessor by less than
/// max(2 pooled se, 1e-3 value). Throws ConvergenceError when no rung settles
/// and `strict` is set; otherwise returns the last rung with converged=false.
/// Identically zero drift is accepted (the degenerate Pickands window).
ConstantEstimate estimate_piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                    PiterbargVariant variant, const std::vector<double>& S_ladder, double grid_step,
                                    std::size_t replications, const RngStream& stream, bool strict = true,
                                    WindowMethod method = WindowMethod::shift);

/// Smallest horizon with min_i C_i^2 horizon^kappa >= 40.
double default_discrete_horizon(const std::vector<double>& C, double kappa);

/// u^{-1} P(max_{k>=1, uk<=horizon} Z(uk) <= 0), Z(t) = min_i(sqrt2 C_i B_i(t) -
/// C_i^2 t^kappa + E_i), on each u of a decreasing ladder, then linear
/// extrapolation of the last two rungs to u = 0 in the variable u^{kappa/2}.
ConstantEstimate estimate_discrete_zero(const std::vector<double>& C, double kappa,
                                        const std::vector<double>& u_ladder, double horizon,
                                        std::size_t replications, const RngStream& stream);

/// Single-rung value u^{-1} P(...) of the discrete-zero representation.
RungValue discrete_zero_rung(const std::vector<double>& C, double kappa, double u, double horizon,
                             std::size_t replications, const RngStream& stream);

/// Closed forms for n = 1: H_{B_1}(T) = (2+T) Phi(sqrt(T/2)) + sqrt(T/pi) e^{-T/4},
/// H_{B_2}(T) = 1 + T/sqrt(pi), limits 1 and 1/sqrt(pi), scaled by C1^{2/kappa}.
double closed_forms_n1(double C1, double kappa, std::optional<double> window_T = std::nullopt);

struct PickandsBounds {
  double lower = 0.0;
  std::optional<double> upper;
};

/// lower = (sum C_i^2)^{1/kappa} / (4^{1+1/kappa} Gamma(1/kappa + 1)); the upper
/// bound is available for kappa in {1,2} with unit C only.
PickandsBounds pickands_bounds(std::size_t n, const std::vector<double>& C, double kappa);

/// right: (e kappa sum max(0, d_upper))^{-1/kappa} H, left: same with d_lower,
/// two_sided: 2 (e kappa)^{-1/kappa} (sum max(0,d_lower) + max(0,d_upper))^{-1/kappa} H.
double piterbarg_lower_bound(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                             PiterbargVariant variant, double pickands_value);

}  // namespace vgauss
