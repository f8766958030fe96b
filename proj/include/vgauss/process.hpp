#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace vgauss {

// ---------------------------------------------------------------------------
// Function descriptors
// ---------------------------------------------------------------------------

/// Positive function of time given as a (node, value) table. Four or more
/// nodes are interpolated with a monotone piecewise-cubic Hermite (PCHIP)
/// scheme, two or three nodes linearly, one node is a constant.
class Profile {
 public:
  /// The constant 1.
  Profile() : nodes_{0.0}, values_{1.0} {}
  static Profile constant(double value);
  static Profile table(std::vector<double> nodes, std::vector<double> values);

  double operator()(double t) const;
  /// Derivative of the interpolant (zero for constants).
  double derivative(double t) const;

  bool is_constant() const { return nodes_.size() == 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double domain_lo() const { return nodes_.front(); }
  double domain_hi() const { return nodes_.back(); }

 private:
  struct Impl;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::shared_ptr<const Impl> impl_;
};

// ---------------------------------------------------------------------------
// Coordinate and vector specifications
// ---------------------------------------------------------------------------

/// Unit-variance stationary coordinate with correlation exp(-a|h|^kappa).
struct Stationary {
  double a = 1.0;
  double kappa = 1.0;
};

/// Unit-variance coordinate whose local correlation scale a(t) varies:
/// r(s,t) = exp(-|L(t) - L(s)|^kappa) with L(t) = int_0^t a(v)^{1/kappa} dv,
/// so r(t, t+h) = 1 - a(t)|h|^kappa + o(|h|^kappa) uniformly in t.
struct LocallyStationary {
  Profile a_profile;
  double kappa = 1.0;
};

/// sigma(t) times a unit-variance path with correlation exp(-a|h|^alpha).
/// `b_lower`, `b_upper` and `beta` describe 1 - sigma(t0+t)/sigma(t0) near the
/// variance maximiser; `holder_*` carry the increment bound G|t-s|^gamma.
struct NonStationary {
  Profile sigma;
  double alpha = 1.0;
  double a = 1.0;
  double beta = 1.0;
  double b_lower = 0.0;
  double b_upper = 0.0;
  double holder_G = 1.0;
  double holder_gamma = 1.0;
  double holder_rho = 1.0;
};

/// Standard fractional Brownian motion with variance t^kappa (Hurst kappa/2).
struct FractionalBrownian {
  double kappa = 1.0;
};

using CoordinateSpec = std::variant<Stationary, LocallyStationary, NonStationary, FractionalBrownian>;

struct VectorProcessSpec {
  std::vector<CoordinateSpec> coords;
  double horizon = 1.0;

  std::size_t dim() const { return coords.size(); }
};

/// f_i(u) = c_i u + offset_i.
struct ThresholdFamily {
  std::vector<double> limits_c;
  std::vector<double> offsets;

  static ThresholdFamily uniform(std::size_t n, double c = 1.0);
  std::vector<double> at(double u) const;
};

enum class BoundaryTag { left, interior, right };
const char* to_string(BoundaryTag tag);

struct VarianceProfileReport {
  double g_min = 0.0;
  double t0 = 0.0;
  BoundaryTag boundary = BoundaryTag::interior;
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  double beta = 1.0;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string summary() const;
};

// ---------------------------------------------------------------------------
// Scalar building blocks
// ---------------------------------------------------------------------------

/// Psi(x) = P(N(0,1) > x).
double gaussian_tail(double x);
/// log Psi(x), finite for every finite x.
double log_gaussian_tail(double x);
double normal_pdf(double x);
double normal_cdf(double x);

/// Correlation of the coordinate between times s and t, both in [0, horizon].
double eval_correlation(const CoordinateSpec& coord, double s, double t, double horizon);
/// Var X(t).
double coordinate_variance(const CoordinateSpec& coord, double t);
double eval_covariance(const CoordinateSpec& coord, double s, double t, double horizon);

/// Time change L(t) of a locally stationary coordinate.
double local_clock(const LocallyStationary& coord, double t);

/// g(t) = sum_i 1 / sigma_i^2(t); +inf where some coordinate has zero variance.
double generalized_variance(const VectorProcessSpec& spec, double t);

ValidationReport validate_spec(const VectorProcessSpec& spec);
/// Throws DomainError carrying the summary when validation fails.
void require_valid(const VectorProcessSpec& spec);

/// Locates the unique minimiser of g on [0,T] and the one-sided curvature
/// sums theta_lower/theta_upper at it.
VarianceProfileReport variance_profile(const VectorProcessSpec& spec, double scan_step);

/// Common decay exponent beta of the non-stationary coordinates.
double common_beta(const VectorProcessSpec& spec);

}  // namespace vgauss
