#include "vgauss/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>

#include "vgauss/error.hpp"

namespace vgauss {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::locally_stationary: return "locally_stationary";
    case Regime::ns_case_i: return "ns_case_i";
    case Regime::ns_case_ii: return "ns_case_ii";
    case Regime::ns_case_iii: return "ns_case_iii";
    case Regime::local_window: return "local_window";
  }
  return "?";
}

namespace {

std::string key_of(const char* kind, const std::vector<double>& C, double kappa, const DriftSpec* drift = nullptr,
                   double S1 = 0.0, double S2 = 0.0, int variant = -1) {
  std::ostringstream os;
  os.precision(17);
  os << kind << "|k=" << kappa << "|C=";
  for (double c : C) os << c << ',';
  if (drift) {
    os << "|e=" << drift->exponent << "|dl=";
    for (double d : drift->d_lower) os << d << ',';
    os << "|du=";
    for (double d : drift->d_upper) os << d << ',';
  }
  os << "|S=" << S1 << ',' << S2 << "|v=" << variant;
  return os.str();
}

std::vector<double> positive_only(const std::vector<double>& C) {
  std::vector<double> out;
  for (double c : C)
    if (c > 0.0) out.push_back(c);
  return out;
}

// Coordinates with C_i = 0 and no drift contribute a factor 1 to every
// window constant; drop them.
void strip_inert(std::vector<double>& C, DriftSpec& drift) {
  std::vector<double> c2, dl, du;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const double lo = i < drift.d_lower.size() ? drift.d_lower[i] : 0.0;
    const double up = i < drift.d_upper.size() ? drift.d_upper[i] : 0.0;
    if (C[i] == 0.0 && lo == 0.0 && up == 0.0) continue;
    c2.push_back(C[i]);
    dl.push_back(lo);
    du.push_back(up);
  }
  C = std::move(c2);
  drift.d_lower = std::move(dl);
  drift.d_upper = std::move(du);
}

ConstantEstimate closed(double value) {
  ConstantEstimate e;
  e.value = value;
  e.tag = EstimatorTag::closed_form;
  return e;
}

void finish(AsymptoticApproximation& a) {
  double log_tail = 0.0;
  for (double x : a.tail_args) log_tail += log_gaussian_tail(x);
  a.log_value_at_u = std::log(a.leading_constant) + a.u_power * std::log(a.u) + log_tail;
  double direct = a.leading_constant * std::pow(a.u, a.u_power);
  for (double x : a.tail_args) direct *= gaussian_tail(x);
  a.value_at_u = direct > 0.0 && std::isfinite(direct) ? direct : std::exp(a.log_value_at_u);
}

bool same_exponent(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); }

}  // namespace

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

ConstantEstimate ClosedFormProvider::pickands(const std::vector<double>& C, double kappa) const {
  const auto active = positive_only(C);
  if (active.size() != 1 || (kappa != 1.0 && kappa != 2.0))
    throw ProviderError("closed-form provider: no closed Pickands constant for this (n, kappa)");
  return closed(closed_forms_n1(active[0], kappa));
}

ConstantEstimate ClosedFormProvider::piterbarg(const std::vector<double>&, double, const DriftSpec&,
                                               PiterbargVariant) const {
  throw ProviderError("closed-form provider: no closed Piterbarg constants");
}

ConstantEstimate ClosedFormProvider::window(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                            double S1, double S2) const {
  std::vector<double> c = C;
  DriftSpec d = drift;
  strip_inert(c, d);
  if (c.size() != 1 || !d.is_zero() || (kappa != 1.0 && kappa != 2.0) || (S1 > 0.0 && S2 > 0.0))
    throw ProviderError("closed-form provider: no closed window constant for this request");
  // [-S, 0] and [0, S] agree by time reversal of the increments
  return closed(closed_forms_n1(c[0], kappa, S1 + S2));
}

void TableProvider::add_pickands(const std::vector<double>& C, double kappa, const ConstantEstimate& value) {
  pickands_.push_back({positive_only(C), kappa, value});
}

void TableProvider::add_piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                  PiterbargVariant variant, const ConstantEstimate& value) {
  keyed_[key_of("pt", C, kappa, &drift, 0, 0, static_cast<int>(variant))] = value;
}

void TableProvider::add_window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                               double S2, const ConstantEstimate& value) {
  keyed_[key_of("win", C, kappa, &drift, S1, S2)] = value;
}

ConstantEstimate TableProvider::pickands(const std::vector<double>& C, double kappa) const {
  const auto c = positive_only(C);
  for (const auto& e : pickands_) {
    if (e.kappa != kappa || e.C.size() != c.size() || c.empty()) continue;
    const double lambda = c[0] / e.C[0];
    bool proportional = true;
    for (std::size_t i = 0; i < c.size() && proportional; ++i)
      proportional = std::abs(c[i] - lambda * e.C[i]) <= 1e-12 * c[i];
    if (!proportional) continue;
    ConstantEstimate out = e.value;
    const double scale = std::pow(lambda, 2.0 / kappa);
    out.value *= scale;
    out.se *= scale;
    return out;
  }
  throw ProviderError("table provider: no Pickands entry proportional to the requested C");
}

ConstantEstimate TableProvider::piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                          PiterbargVariant variant) const {
  auto it = keyed_.find(key_of("pt", C, kappa, &drift, 0, 0, static_cast<int>(variant)));
  if (it == keyed_.end()) throw ProviderError("table provider: no Piterbarg entry for the request");
  return it->second;
}

ConstantEstimate TableProvider::window(const std::vector<double>& C, double kappa, const DriftSpec& drift, double S1,
                                       double S2) const {
  auto it = keyed_.find(key_of("win", C, kappa, &drift, S1, S2));
  if (it == keyed_.end()) throw ProviderError("table provider: no window entry for the request");
  return it->second;
}

ConstantEstimate EstimatingProvider::pickands(const std::vector<double>& C, double kappa) const {
  const auto c = positive_only(C);
  if (c.empty()) throw ProviderError("estimating provider: C has no positive entry");
  if (budget_.closed_forms) {
    try {
      return closed_.pickands(c, kappa);
    } catch (const ProviderError&) {
    }
  }
  const double lambda = c[0];
  std::vector<double> unit(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) unit[i] = c[i] / lambda;
  const std::string key = key_of("pk", unit, kappa);

  ConstantEstimate base;
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      base = it->second;
    } else {
      const double step = budget_.grid_step > 0.0 ? budget_.grid_step
                                                  : default_window_step(budget_.S_ladder.back(), kappa);
      base = estimate_pickands(unit, kappa, budget_.S_ladder, step, budget_.replications,
                               derive_stream(budget_.seed, "provider-pickands", stable_hash(key)));
      cache_.emplace(key, base);
    }
  }
  const double scale = std::pow(lambda, 2.0 / kappa);
  base.value *= scale;
  base.se *= scale;
  return base;
}

ConstantEstimate EstimatingProvider::piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                               PiterbargVariant variant) const {
  const std::string key = key_of("pt", C, kappa, &drift, 0, 0, static_cast<int>(variant));
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double S_max = budget_.piterbarg_ladder.back();
  const double window = variant == PiterbargVariant::two_sided ? 2.0 * S_max : S_max;
  const double step = budget_.grid_step > 0.0 ? budget_.grid_step : default_window_step(window, kappa);
  auto est = estimate_piterbarg(C, kappa, drift, variant, budget_.piterbarg_ladder, step, budget_.replications,
                                derive_stream(budget_.seed, "provider-piterbarg", stable_hash(key)), false);
  cache_.emplace(key, est);
  return est;
}

ConstantEstimate EstimatingProvider::window(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                            double S1, double S2) const {
  if (budget_.closed_forms) {
    try {
      return closed_.window(C, kappa, drift, S1, S2);
    } catch (const ProviderError&) {
    }
  }
  const std::string key = key_of("win", C, kappa, &drift, S1, S2);
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double step = budget_.grid_step > 0.0 ? budget_.grid_step : default_window_step(S1 + S2, kappa);
  auto est = estimate_window_constant(C, kappa, drift, S1, S2, step, budget_.replications,
                                      derive_stream(budget_.seed, "provider-window", stable_hash(key)));
  cache_.emplace(key, est);
  return est;
}

std::size_t EstimatingProvider::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

AsymptoticApproximation approx_locally_stationary(const VectorProcessSpec& spec, const ThresholdFamily& thresholds,
                                                  double u, const ConstantProvider& provider) {
  require_valid(spec);
  if (!(u > 0.0)) throw DomainError("locally stationary approximation: u must be positive");
  const std::size_t n = spec.dim();
  if (thresholds.limits_c.size() != n) throw DomainError("locally stationary approximation: threshold size mismatch");

  std::vector<double> kappas(n);
  std::vector<const Profile*> profiles(n, nullptr);
  std::vector<double> a_const(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (const auto* s = std::get_if<Stationary>(&spec.coords[i])) {
      kappas[i] = s->kappa;
      a_const[i] = s->a;
    } else if (const auto* l = std::get_if<LocallyStationary>(&spec.coords[i])) {
      kappas[i] = l->kappa;
      if (l->a_profile.is_constant())
        a_const[i] = l->a_profile(0.0);
      else
        profiles[i] = &l->a_profile;
    } else {
      throw PreconditionError("locally stationary approximation: coordinate " + std::to_string(i) +
                              " is neither stationary nor locally stationary");
    }
  }
  const double kappa = *std::min_element(kappas.begin(), kappas.end());
  const double T = spec.horizon;
  const auto& c = thresholds.limits_c;

  auto a_at = [&](std::size_t i, double t) { return profiles[i] ? (*profiles[i])(t) : a_const[i]; };
  auto C_at = [&](double t) {
    std::vector<double> C(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (kappas[i] == kappa) C[i] = c[i] * std::sqrt(a_at(i, t));
    return C;
  };

  AsymptoticApproximation out;
  out.regime = Regime::locally_stationary;
  out.u = u;
  out.u_power = 2.0 / kappa;
  out.tail_args = thresholds.at(u);

  const bool all_constant =
      std::none_of(profiles.begin(), profiles.end(), [](const Profile* p) { return p != nullptr; });
  const ConstantEstimate H0 = provider.pickands(C_at(0.0), kappa);
  if (all_constant) {
    out.leading_constant = T * H0.value;
    out.leading_se = T * H0.se;
    out.notes.push_back("constant a: T * H");
    finish(out);
    return out;
  }

  // proportional profiles: C(t) = sqrt(rho(t)) C(0), so H(t) = rho(t)^{1/kappa} H(0)
  auto rho_at = [&](double t) -> double {
    double rho = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (kappas[i] != kappa) continue;
      const double r = a_at(i, t) / a_at(i, 0.0);
      if (rho < 0.0) {
        rho = r;
      } else if (std::abs(r - rho) > 1e-12 * rho) {
        return -1.0;
      }
    }
    return rho;
  };

  bool proportional = true;
  for (int j = 0; j <= 1024 && proportional; ++j) proportional = rho_at(T * j / 1024.0) >= 0.0;

  struct Node {
    double value, se;
  };
  auto eval = [&](double t) -> Node {
    if (proportional) {
      const double s = std::pow(rho_at(t), 1.0 / kappa);
      return {s * H0.value, s * H0.se};
    }
    const auto e = provider.pickands(C_at(t), kappa);
    return {e.value, e.se};
  };

  std::size_t N = 32;
  std::vector<Node> nodes(N + 1);
  for (std::size_t j = 0; j <= N; ++j) nodes[j] = eval(T * static_cast<double>(j) / static_cast<double>(N));
  auto simpson = [&](const std::vector<Node>& v, double& se) {
    const std::size_t m = v.size() - 1;
    const double h = T / static_cast<double>(m);
    double s = 0.0, var = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      s += w * v[j].value;
      var += (w * v[j].se) * (w * v[j].se);
    }
    se = h / 3.0 * std::sqrt(var);
    return h / 3.0 * s;
  };
  double se = 0.0;
  double integral = simpson(nodes, se);
  while (N < 1024) {
    std::vector<Node> finer(2 * N + 1);
    for (std::size_t j = 0; j <= N; ++j) finer[2 * j] = nodes[j];
    for (std::size_t j = 0; j < N; ++j)
      finer[2 * j + 1] = eval(T * static_cast<double>(2 * j + 1) / static_cast<double>(2 * N));
    double se_fine = 0.0;
    const double refined = simpson(finer, se_fine);
    const double change = std::abs(refined - integral);
    nodes = std::move(finer);
    N *= 2;
    integral = refined;
    se = se_fine;
    if (change < 1e-3 * std::abs(refined) || change < 2.0 * se_fine) break;
  }
  out.leading_constant = integral;
  out.leading_se = se;
  out.notes.push_back(std::string(proportional ? "proportional a(t): scaled H" : "per-node H") + ", Simpson on " +
                      std::to_string(N + 1) + " nodes");
  finish(out);
  return out;
}

double theta_factor(const VarianceProfileReport& profile) {
  const double inv_beta = 1.0 / profile.beta;
  auto side = [&](double theta, const char* name) {
    if (!(theta > 0.0)) throw HypothesisError(std::string("Theta: ") + name + " must be positive at this boundary");
    return std::pow(theta, -inv_beta);
  };
  switch (profile.boundary) {
    case BoundaryTag::left: return side(profile.theta_upper, "theta_upper");
    case BoundaryTag::right: return side(profile.theta_lower, "theta_lower");
    case BoundaryTag::interior:
      return side(profile.theta_lower, "theta_lower") + side(profile.theta_upper, "theta_upper");
  }
  return 0.0;
}

AsymptoticApproximation ns_case_i(double pickands_value, double pickands_se, const VarianceProfileReport& profile,
                                  double alpha, const std::vector<double>& c, double u) {
  if (!(alpha < profile.beta)) throw DomainError("case i requires alpha < beta");
  AsymptoticApproximation out;
  out.regime = Regime::ns_case_i;
  out.u = u;
  const double scale = theta_factor(profile) * std::tgamma(1.0 / profile.beta + 1.0);
  out.leading_constant = pickands_value * scale;
  out.leading_se = pickands_se * scale;
  out.u_power = 2.0 / alpha - 2.0 / profile.beta;
  for (double ci : c) out.tail_args.push_back(ci * u);
  finish(out);
  return out;
}

AsymptoticApproximation approx_nonstationary(const VectorProcessSpec& spec, double u,
                                             const VarianceProfileReport& profile,
                                             const ConstantProvider& provider) {
  require_valid(spec);
  if (!(u > 0.0)) throw DomainError("non-stationary approximation: u must be positive");
  const std::size_t n = spec.dim();
  std::vector<const NonStationary*> ns(n);
  for (std::size_t i = 0; i < n; ++i) {
    ns[i] = std::get_if<NonStationary>(&spec.coords[i]);
    if (!ns[i]) throw PreconditionError("non-stationary approximation: every coordinate must be non-stationary");
  }
  switch (profile.boundary) {
    case BoundaryTag::left:
      if (!(profile.theta_upper > 0.0)) throw HypothesisError("theta_upper = 0 at t0 = 0");
      break;
    case BoundaryTag::right:
      if (!(profile.theta_lower > 0.0)) throw HypothesisError("theta_lower = 0 at t0 = T");
      break;
    case BoundaryTag::interior:
      if (!(profile.theta_lower > 0.0 && profile.theta_upper > 0.0))
        throw HypothesisError("interior t0 needs theta_lower > 0 and theta_upper > 0");
      break;
  }

  double alpha = ns[0]->alpha;
  for (const auto* c : ns) alpha = std::min(alpha, c->alpha);
  const double beta = profile.beta;
  std::vector<double> c(n), C(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = 1.0 / ns[i]->sigma(profile.t0);
    if (ns[i]->alpha == alpha) C[i] = c[i] * std::sqrt(ns[i]->a);
  }

  if (alpha > beta && !same_exponent(alpha, beta)) {
    AsymptoticApproximation out;
    out.regime = Regime::ns_case_iii;
    out.u = u;
    out.leading_constant = 1.0;
    out.u_power = 0.0;
    for (double ci : c) out.tail_args.push_back(ci * u);
    finish(out);
    return out;
  }
  if (!same_exponent(alpha, beta)) {
    const auto H = provider.pickands(C, alpha);
    auto out = ns_case_i(H.value, H.se, profile, alpha, c, u);
    out.notes.push_back("H from " + std::string(to_string(H.tag)));
    return out;
  }

  DriftSpec drift;
  drift.exponent = alpha;
  drift.d_lower.resize(n);
  drift.d_upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    drift.d_lower[i] = c[i] * c[i] * ns[i]->b_lower;
    drift.d_upper[i] = c[i] * c[i] * ns[i]->b_upper;
  }
  PiterbargVariant variant = PiterbargVariant::two_sided;
  if (profile.boundary == BoundaryTag::left) variant = PiterbargVariant::right;
  if (profile.boundary == BoundaryTag::right) variant = PiterbargVariant::left;
  const auto H = provider.piterbarg(C, alpha, drift, variant);

  AsymptoticApproximation out;
  out.regime = Regime::ns_case_ii;
  out.u = u;
  out.leading_constant = H.value;
  out.leading_se = H.se;
  out.u_power = 0.0;
  for (double ci : c) out.tail_args.push_back(ci * u);
  out.notes.push_back(std::string("Piterbarg variant ") + to_string(variant));
  for (const auto& w : H.warnings) out.notes.push_back(w);
  finish(out);
  return out;
}

AsymptoticApproximation local_window_approx(const std::vector<double>& C_effective, double kappa,
                                            const DriftSpec& drift, double S1, double S2,
                                            const std::vector<double>& thresholds_at_u, double u,
                                            const ConstantProvider& provider) {
  if (!(std::max(S1, S2) > 0.0)) throw DomainError("local window: max(S1, S2) must be positive");
  if (thresholds_at_u.size() != C_effective.size()) throw DomainError("local window: threshold size mismatch");
  const auto H = provider.window(C_effective, kappa, drift, S1, S2);
  AsymptoticApproximation out;
  out.regime = Regime::local_window;
  out.u = u;
  out.leading_constant = H.value;
  out.leading_se = H.se;
  out.u_power = 0.0;
  out.tail_args = thresholds_at_u;
  finish(out);
  return out;
}

double order_stats_approx(std::size_t n, std::size_t r, double base_prob_min_r) {
  if (r < 1 || r > n) throw DomainError("order statistics: r must lie in 1..n");
  if (!(base_prob_min_r >= 0.0)) throw DomainError("order statistics: base probability must be nonnegative");
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(r)) *
         base_prob_min_r;
}

}  // namespace vgauss
