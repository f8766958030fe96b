#include "vgauss/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

// pchip.hpp calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "vgauss/error.hpp"

namespace vgauss {

// ---------------------------------------------------------------------------
// Profile
// ---------------------------------------------------------------------------

struct Profile::Impl {
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> spline;
};

Profile Profile::constant(double value) {
  Profile p = table({0.0}, {value});
  return p;
}

Profile Profile::table(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.empty() || nodes.size() != values.size())
    throw DomainError("profile: nodes and values must be nonempty and of equal length");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !std::isfinite(values[i]))
      throw DomainError("profile: non-finite table entry");
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw DomainError("profile: nodes must be strictly increasing");
  }
  Profile p{};
  p.nodes_ = nodes;
  p.values_ = values;
  auto impl = std::make_shared<Impl>();
  if (nodes.size() >= 4) impl->spline.emplace(std::move(nodes), std::move(values));
  p.impl_ = std::move(impl);
  return p;
}

double Profile::operator()(double t) const {
  if (nodes_.size() == 1) return values_.front();
  const double span = nodes_.back() - nodes_.front();
  const double tol = 1e-9 * span;
  if (t < nodes_.front() - tol || t > nodes_.back() + tol)
    throw DomainError("profile: evaluation point outside the table range");
  t = std::clamp(t, nodes_.front(), nodes_.back());
  if (impl_ && impl_->spline) return (*impl_->spline)(t);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, nodes_.size() - 1);
  const double w = (t - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
  return (1.0 - w) * values_[k - 1] + w * values_[k];
}

double Profile::derivative(double t) const {
  if (nodes_.size() == 1) return 0.0;
  t = std::clamp(t, nodes_.front(), nodes_.back());
  if (impl_ && impl_->spline) return impl_->spline->prime(t);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, nodes_.size() - 1);
  return (values_[k] - values_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
}

// ---------------------------------------------------------------------------
// Thresholds, tags, reports
// ---------------------------------------------------------------------------

ThresholdFamily ThresholdFamily::uniform(std::size_t n, double c) {
  return {std::vector<double>(n, c), std::vector<double>(n, 0.0)};
}

std::vector<double> ThresholdFamily::at(double u) const {
  std::vector<double> f(limits_c.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = limits_c[i] * u + (i < offsets.size() ? offsets[i] : 0.0);
  return f;
}

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::left: return "left";
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::right: return "right";
  }
  return "?";
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e << '\n';
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Gaussian tail
// ---------------------------------------------------------------------------

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double gaussian_tail(double x) {
  if (!std::isfinite(x)) throw DomainError("gaussian_tail: non-finite argument");
  // erfc amplifies the rounding of x/sqrt2 by ~x^2, so carry the lost low
  // part d and apply erfc(z + d) = erfc(z) - 2/sqrt(pi) e^{-z^2} d.
  constexpr double hi = 0.70710678118654757;
  constexpr double lo = -4.8336466567264567e-17;
  const double z = x * hi;
  const double d = std::fma(x, hi, -z) + x * lo;
  const double e = std::erfc(z);
  if (std::abs(z) < 1.0) return 0.5 * e;
  return 0.5 * (e - std::numbers::inv_sqrtpi * 2.0 * std::exp(-z * z) * d);
}

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("normal_cdf: non-finite argument");
  return gaussian_tail(-x);
}

double log_gaussian_tail(double x) {
  if (!std::isfinite(x)) throw DomainError("log_gaussian_tail: non-finite argument");
  if (x < 30.0) return std::log(gaussian_tail(x));
  // Mills ratio continued fraction x + 1/(x + 2/(x + 3/(x + ...))).
  double cf = x;
  for (int k = 60; k >= 1; --k) cf = x + k / cf;
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(cf);
}

// ---------------------------------------------------------------------------
// Correlation models
// ---------------------------------------------------------------------------

namespace {

void check_time(double t, double horizon) {
  const double tol = 1e-12 * std::max(1.0, horizon);
  if (!std::isfinite(t) || t < -tol || t > horizon + tol)
    throw DomainError("eval_correlation: time outside [0, T]");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double local_clock(const LocallyStationary& coord, double t) {
  if (t <= 0.0) return 0.0;
  const double inv = 1.0 / coord.kappa;
  auto f = [&](double v) { return std::pow(coord.a_profile(v), inv); };
  if (coord.a_profile.is_constant()) return f(0.0) * t;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, t, 10, 1e-13);
}

double eval_correlation(const CoordinateSpec& coord, double s, double t, double horizon) {
  check_time(s, horizon);
  check_time(t, horizon);
  if (s == t) return 1.0;
  return std::visit(
      overloaded{
          [&](const Stationary& c) { return std::exp(-c.a * std::pow(std::abs(t - s), c.kappa)); },
          [&](const LocallyStationary& c) {
            const double d = std::abs(local_clock(c, t) - local_clock(c, s));
            return std::exp(-std::pow(d, c.kappa));
          },
          [&](const NonStationary& c) { return std::exp(-c.a * std::pow(std::abs(t - s), c.alpha)); },
          [&](const FractionalBrownian& c) {
            if (s <= 0.0 || t <= 0.0) return 0.0;
            const double k = c.kappa;
            const double cov = 0.5 * (std::pow(s, k) + std::pow(t, k) - std::pow(std::abs(t - s), k));
            return cov / std::pow(s * t, 0.5 * k);
          },
      },
      coord);
}

double coordinate_variance(const CoordinateSpec& coord, double t) {
  return std::visit(overloaded{
                        [](const Stationary&) { return 1.0; },
                        [](const LocallyStationary&) { return 1.0; },
                        [&](const NonStationary& c) {
                          const double s = c.sigma(t);
                          return s * s;
                        },
                        [&](const FractionalBrownian& c) { return t <= 0.0 ? 0.0 : std::pow(t, c.kappa); },
                    },
                    coord);
}

double eval_covariance(const CoordinateSpec& coord, double s, double t, double horizon) {
  if (const auto* f = std::get_if<FractionalBrownian>(&coord)) {
    check_time(s, horizon);
    check_time(t, horizon);
    const double k = f->kappa;
    return 0.5 * (std::pow(std::max(s, 0.0), k) + std::pow(std::max(t, 0.0), k) - std::pow(std::abs(t - s), k));
  }
  return std::sqrt(coordinate_variance(coord, s) * coordinate_variance(coord, t)) *
         eval_correlation(coord, s, t, horizon);
}

double generalized_variance(const VectorProcessSpec& spec, double t) {
  double g = 0.0;
  for (const auto& c : spec.coords) {
    const double v = coordinate_variance(c, t);
    if (v <= 0.0) return std::numeric_limits<double>::infinity();
    g += 1.0 / v;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

bool in_unit_exponent_range(double k) { return k > 0.0 && k <= 2.0; }

void check_profile(const Profile& p, double horizon, const std::string& label, ValidationReport& rep) {
  if (!p.is_constant()) {
    const double tol = 1e-9 * std::max(1.0, horizon);
    if (p.domain_lo() > tol || p.domain_hi() < horizon - tol) {
      rep.errors.push_back(label + ": table does not cover [0, T]");
      return;
    }
  }
  for (double v : p.values())
    if (!(v > 0.0)) {
      rep.errors.push_back(label + ": profile must be strictly positive");
      return;
    }
  // interpolant check between nodes
  constexpr int kProbe = 512;
  for (int k = 0; k <= kProbe; ++k) {
    const double t = horizon * k / kProbe;
    if (!(p(t) > 0.0)) {
      rep.errors.push_back(label + ": profile must be strictly positive on [0, T]");
      return;
    }
  }
}

}  // namespace

double common_beta(const VectorProcessSpec& spec) {
  double beta = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : spec.coords)
    if (const auto* ns = std::get_if<NonStationary>(&c)) {
      if (std::isnan(beta))
        beta = ns->beta;
      else if (beta != ns->beta)
        throw DomainError("non-stationary coordinates must share the exponent beta");
    }
  if (std::isnan(beta)) throw DomainError("spec has no non-stationary coordinate");
  return beta;
}

ValidationReport validate_spec(const VectorProcessSpec& spec) {
  ValidationReport rep;
  if (spec.coords.empty()) rep.errors.push_back("spec must have at least one coordinate");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    rep.errors.push_back("horizon T must be positive and finite");
    return rep;
  }
  bool any_ns = false;
  double beta = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < spec.coords.size(); ++i) {
    const std::string label = "coord[" + std::to_string(i) + "]";
    std::visit(overloaded{
                   [&](const Stationary& c) {
                     if (!in_unit_exponent_range(c.kappa)) rep.errors.push_back(label + ": kappa not in (0,2]");
                     if (!(c.a > 0.0)) rep.errors.push_back(label + ": a must be positive");
                   },
                   [&](const LocallyStationary& c) {
                     if (!in_unit_exponent_range(c.kappa)) rep.errors.push_back(label + ": kappa not in (0,2]");
                     check_profile(c.a_profile, spec.horizon, label + ".a_profile", rep);
                   },
                   [&](const NonStationary& c) {
                     any_ns = true;
                     if (!in_unit_exponent_range(c.alpha)) rep.errors.push_back(label + ": alpha not in (0,2]");
                     if (!(c.a > 0.0)) rep.errors.push_back(label + ": a must be positive");
                     if (!(c.beta > 0.0)) rep.errors.push_back(label + ": beta must be positive");
                     if (!(c.holder_G > 0.0)) rep.errors.push_back(label + ": holder G must be positive");
                     if (!in_unit_exponent_range(c.holder_gamma))
                       rep.errors.push_back(label + ": holder gamma not in (0,2]");
                     if (!(c.holder_rho > 0.0)) rep.errors.push_back(label + ": holder rho must be positive");
                     if (!std::isfinite(c.b_lower) || !std::isfinite(c.b_upper))
                       rep.errors.push_back(label + ": b coefficients must be finite");
                     if (std::isnan(beta))
                       beta = c.beta;
                     else if (beta != c.beta)
                       rep.errors.push_back(label + ": beta differs from the other non-stationary coordinates");
                     check_profile(c.sigma, spec.horizon, label + ".sigma", rep);
                   },
                   [&](const FractionalBrownian& c) {
                     if (!in_unit_exponent_range(c.kappa)) rep.errors.push_back(label + ": kappa not in (0,2]");
                   },
               },
               spec.coords[i]);
  }
  if (rep.ok() && any_ns) {
    try {
      const auto prof = variance_profile(spec, spec.horizon / 1000.0);
      const bool need_lower = prof.boundary != BoundaryTag::left;
      const bool need_upper = prof.boundary != BoundaryTag::right;
      if (need_lower && !(prof.theta_lower > 0.0))
        rep.warnings.push_back("theta_lower = 0 at t0: the non-stationary asymptotics require theta_lower > 0");
      if (need_upper && !(prof.theta_upper > 0.0))
        rep.warnings.push_back("theta_upper = 0 at t0: the non-stationary asymptotics require theta_upper > 0");
    } catch (const AmbiguityError& e) {
      rep.warnings.push_back(std::string("generalized variance: ") + e.what());
    }
  }
  return rep;
}

void require_valid(const VectorProcessSpec& spec) {
  const auto rep = validate_spec(spec);
  if (!rep.ok()) throw DomainError("invalid process spec:\n" + rep.summary());
}

// ---------------------------------------------------------------------------
// Generalized variance profile
// ---------------------------------------------------------------------------

VarianceProfileReport variance_profile(const VectorProcessSpec& spec, double scan_step) {
  const double T = spec.horizon;
  if (!(scan_step > 0.0) || scan_step > T / 10.0 * (1.0 + 1e-12))
    throw DomainError("variance_profile: scan step must lie in (0, T/10]");
  const double beta = common_beta(spec);

  const auto steps = static_cast<std::size_t>(std::ceil(T / scan_step - 1e-9));
  std::vector<double> ts(steps + 1), gs(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    ts[k] = std::min(T, k * scan_step);
    gs[k] = generalized_variance(spec, ts[k]);
  }
  const auto best = static_cast<std::size_t>(std::distance(gs.begin(), std::min_element(gs.begin(), gs.end())));
  if (!std::isfinite(gs[best])) throw DomainError("variance_profile: generalized variance is infinite everywhere");

  // refine inside the bracket around the best scan node
  const double lo = ts[best == 0 ? 0 : best - 1];
  const double hi = ts[std::min(best + 1, steps)];
  auto g = [&](double t) { return generalized_variance(spec, t); };
  double t0 = ts[best];
  double gmin = gs[best];
  if (hi > lo) {
    const auto [tr, gr] = boost::math::tools::brent_find_minima(g, lo, hi, 40);
    if (gr < gmin) {
      t0 = tr;
      gmin = gr;
    }
  }
  // boundary minimisers: Brent stops a tolerance away from an endpoint
  const double snap = 1e-9 * T;
  for (const double edge : {0.0, T}) {
    const double ge = g(edge);
    if (std::abs(t0 - edge) <= scan_step && ge <= gmin + 1e-14 * (1.0 + std::abs(gmin))) {
      t0 = edge;
      gmin = std::min(gmin, ge);
    }
  }

  const double tol = 1e-8 * (1.0 + std::abs(gmin));
  for (std::size_t k = 0; k <= steps; ++k)
    if (std::abs(ts[k] - t0) > 1.5 * scan_step && gs[k] <= gmin + tol)
      throw AmbiguityError("minimum of the generalized variance is not unique (also attained near t = " +
                           std::to_string(ts[k]) + ")");

  VarianceProfileReport rep;
  rep.g_min = gmin;
  rep.t0 = t0;
  rep.beta = beta;
  rep.boundary = t0 <= snap ? BoundaryTag::left : (t0 >= T - snap ? BoundaryTag::right : BoundaryTag::interior);
  for (const auto& c : spec.coords) {
    if (const auto* ns = std::get_if<NonStationary>(&c)) {
      const double v = coordinate_variance(c, t0);
      rep.theta_lower += ns->b_lower / v;
      rep.theta_upper += ns->b_upper / v;
    }
  }
  return rep;
}

}  // namespace vgauss
