#include "vgauss/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <spdlog/spdlog.h>

#include "vgauss/error.hpp"
#include "vgauss/orthant.hpp"
#include "vgauss/parallel.hpp"
#include "vgauss/process.hpp"
#include "vgauss/sampler.hpp"

namespace vgauss {

DriftSpec DriftSpec::zero(std::size_t n, double exponent) {
  return {exponent, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

DriftSpec DriftSpec::one_sided(std::vector<double> d_upper, double exponent) {
  const std::size_t n = d_upper.size();
  return {exponent, std::vector<double>(n, 0.0), std::move(d_upper)};
}

DriftSpec DriftSpec::symmetric(std::vector<double> d, double exponent) { return {exponent, d, d}; }

double DriftSpec::at(std::size_t i, double t) const {
  if (t == 0.0) return 0.0;
  const double coef = t < 0.0 ? (i < d_lower.size() ? d_lower[i] : 0.0) : (i < d_upper.size() ? d_upper[i] : 0.0);
  return coef == 0.0 ? 0.0 : coef * std::pow(std::abs(t), exponent);
}

bool DriftSpec::is_zero() const {
  return std::all_of(d_lower.begin(), d_lower.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(d_upper.begin(), d_upper.end(), [](double v) { return v == 0.0; });
}

const char* to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::window: return "window";
    case EstimatorTag::slope: return "slope";
    case EstimatorTag::discrete_zero: return "discrete_zero";
    case EstimatorTag::closed_form: return "closed_form";
    case EstimatorTag::bound: return "bound";
  }
  return "?";
}

const char* to_string(PiterbargVariant v) {
  switch (v) {
    case PiterbargVariant::right: return "right";
    case PiterbargVariant::left: return "left";
    case PiterbargVariant::two_sided: return "two_sided";
  }
  return "?";
}

PiterbargVariant piterbarg_variant_from(const std::string& name) {
  if (name == "right") return PiterbargVariant::right;
  if (name == "left") return PiterbargVariant::left;
  if (name == "two_sided") return PiterbargVariant::two_sided;
  throw DomainError("unknown Piterbarg variant '" + name + "'");
}

double default_window_step(double S, double kappa) {
  if (!(S > 0.0)) return 1.0;
  return kappa <= 1.0 ? S / 1024.0 : S / 512.0;
}

namespace {

void check_common(const std::vector<double>& C, double kappa) {
  if (C.empty()) throw DomainError("constant: C must have at least one entry");
  // zero entries are allowed (a coordinate that only carries drift); at least one must be positive
  bool any = false;
  for (double c : C) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constant: C entries must be nonnegative and finite");
    any = any || c > 0.0;
  }
  if (!any) throw DomainError("constant: at least one C entry must be positive");
  if (!(kappa > 0.0 && kappa <= 2.0)) throw DomainError("constant: kappa must lie in (0,2]");
}

std::size_t steps_for(double length, double step) {
  if (length <= 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length / step)));
}

PathGenerator fbm_generator(std::size_t n, double kappa, double step, std::size_t nodes) {
  VectorProcessSpec spec;
  spec.coords.assign(n, FractionalBrownian{kappa});
  spec.horizon = std::max(step, step * static_cast<double>(nodes - 1));
  return PathGenerator(spec, SampleGrid{0.0, step, nodes});
}

// One replication's window statistic. The path lives on nodes idx = 0..P-1
// with time (idx - c) * step; window node j sits at time (j - left) * step.
class WindowKernel {
 public:
  WindowKernel(const std::vector<double>& C, double kappa, const DriftSpec& drift, double step, std::size_t left,
               std::size_t m, std::size_t c, std::size_t P)
      : C_(C), n_(C.size()), m_(m), left_(left), c_(c), P_(P), var_(n_ * P), drift_(n_ * m), log_weight_(m) {
    sliding_ = n_ == 1 && drift.is_zero();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t idx = 0; idx < P; ++idx) {
        const double t = (static_cast<double>(idx) - static_cast<double>(c)) * step;
        var_[i * P + idx] = C[i] * C[i] * std::pow(std::abs(t), kappa);
      }
      for (std::size_t j = 0; j < m; ++j) {
        const double t = (static_cast<double>(j) - static_cast<double>(left)) * step;
        drift_[i * m + j] = drift.at(i, t);
        log_weight_[j] -= drift_[i * m + j];
      }
    }
  }

  std::size_t nodes() const { return m_; }

  // n = 1 without drift: every shifted window is a slice of one array, so
  // exponentials are taken once per path.
  bool sliding() const { return sliding_; }

  void prepare(const double* path, std::vector<double>& A, std::vector<double>& E, double& G) const {
    A.resize(P_);
    E.resize(P_);
    const double base = path[c_];
    for (std::size_t idx = 0; idx < P_; ++idx)
      A[idx] = std::numbers::sqrt2 * C_[0] * (path[idx] - base) - var_[idx];
    G = *std::max_element(A.begin(), A.end());
    for (std::size_t idx = 0; idx < P_; ++idx) E[idx] = std::exp(A[idx] - G);
  }

  double shifted_sliding(const std::vector<double>& A, const std::vector<double>& E, double G,
                         std::size_t K) const {
    const std::size_t lo = c_ - K, hi = lo + m_;
    const double top = *std::max_element(A.begin() + static_cast<std::ptrdiff_t>(lo),
                                         A.begin() + static_cast<std::ptrdiff_t>(hi));
    double sum = 0.0;
    if (top - G < -600.0) {
      for (std::size_t idx = lo; idx < hi; ++idx) sum += std::exp(A[idx] - top);
      return 1.0 / sum;
    }
    for (std::size_t idx = lo; idx < hi; ++idx) sum += E[idx];
    return std::exp(top - G) / sum;
  }

  // EWV of the window with t = 0 at path node c.
  double plain(const double* path, std::vector<double>& xi, PointCloud& cloud) const {
    fill(path, left_, xi);
    return ewv_of(xi, cloud);
  }

  // exp(-d(t_K)) EWV / sum_j exp(sum_i xi_i(t_j)) for the path seen from
  // window node K; its mean over K times m is the window constant.
  double shifted(const double* path, std::size_t K, std::vector<double>& xi, PointCloud& cloud) const {
    fill(path, K, xi);
    for (std::size_t i = 0; i < n_; ++i) {
      double* x = xi.data() + i * m_;
      const double top = *std::max_element(x, x + m_);
      for (std::size_t j = 0; j < m_; ++j) x[j] -= top;
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += xi[i * m_ + j];
      denom += std::exp(s);
    }
    const double num = n_ == 1 ? 1.0 : ewv_of(xi, cloud);
    return std::exp(log_weight_[K]) * num / denom;
  }

 private:
  void fill(const double* path, std::size_t origin, std::vector<double>& xi) const {
    xi.resize(n_ * m_);
    const double root2 = std::numbers::sqrt2;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* p = path + i * P_;
      const double base = p[c_];
      for (std::size_t j = 0; j < m_; ++j) {
        const std::size_t idx = c_ + j - origin;
        xi[i * m_ + j] = root2 * C_[i] * (p[idx] - base) - var_[i * P_ + idx] - drift_[i * m_ + j];
      }
    }
  }

  double ewv_of(const std::vector<double>& xi, PointCloud& cloud) const {
    if (n_ == 1) return std::exp(*std::max_element(xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(m_)));
    cloud = PointCloud(n_);
    cloud.reserve(m_);
    std::vector<double> p(n_);
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) p[i] = xi[i * m_ + j];
      cloud.add(p);
    }
    return ewv_auto(cloud);
  }

  std::vector<double> C_;
  std::size_t n_, m_, left_, c_, P_;
  std::vector<double> var_;
  std::vector<double> drift_;
  std::vector<double> log_weight_;
  bool sliding_ = false;
};

struct WindowState {
  PathGenerator::ScratchPtr scratch;
  std::vector<double> path;
  std::vector<double> xi;
  PointCloud cloud;
  std::vector<double> u;
  std::vector<double> A, E;  // sliding-window arrays
  double G = 0.0;
  std::vector<std::size_t> ks;
};

// Stratified shift nodes: one uniform per stratum, or every node when the
// window has at most kShiftStrata nodes. Returns the factor m/J.
double shift_nodes(std::size_t m, const std::vector<double>& u, std::vector<std::size_t>& out) {
  out.clear();
  if (m <= kShiftStrata) {
    for (std::size_t k = 0; k < m; ++k) out.push_back(k);
    return 1.0;
  }
  const double width = static_cast<double>(m) / static_cast<double>(kShiftStrata);
  for (std::size_t s = 0; s < kShiftStrata; ++s)
    out.push_back(std::min(m - 1, static_cast<std::size_t>((static_cast<double>(s) + u[s]) * width)));
  return width;
}

double shifted_statistic(const WindowKernel& kernel, WindowState& st) {
  const double factor = shift_nodes(kernel.nodes(), st.u, st.ks);
  double sum = 0.0;
  if (kernel.sliding()) {
    for (std::size_t K : st.ks) sum += kernel.shifted_sliding(st.A, st.E, st.G, K);
  } else {
    for (std::size_t K : st.ks) sum += kernel.shifted(st.path.data(), K, st.xi, st.cloud);
  }
  return factor * sum;
}

}  // namespace

const char* to_string(WindowMethod m) { return m == WindowMethod::shift ? "shift" : "plain"; }

ConstantEstimate estimate_window_constant(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                          double S1, double S2, double grid_step, std::size_t replications,
                                          const RngStream& stream, WindowMethod method) {
  check_common(C, kappa);
  if (!(S1 >= 0.0 && S2 >= 0.0)) throw DomainError("window constant: S1, S2 must be nonnegative");
  if (!(grid_step > 0.0)) throw DomainError("window constant: grid step must be positive");
  if (replications < 1000) throw DomainError("window constant: at least 1000 replications required");
  const std::size_t n = C.size();
  if ((!drift.d_lower.empty() && drift.d_lower.size() != n) || (!drift.d_upper.empty() && drift.d_upper.size() != n))
    throw DomainError("window constant: drift size does not match C");

  ConstantEstimate out;
  out.S1 = S1;
  out.S2 = S2;
  out.grid_step = grid_step;
  out.replications = replications;
  out.tag = EstimatorTag::window;

  const std::size_t left = steps_for(S1, grid_step);
  const std::size_t right = steps_for(S2, grid_step);
  const std::size_t m = left + right + 1;
  if (m == 1) {
    out.value = 1.0;  // xi(0) = 0
    return out;
  }

  // plain: path on the window itself, t = 0 at node `left`;
  // shift: two-sided path on [-(m-1), m-1] steps around node m-1
  const bool shift = method == WindowMethod::shift;
  const std::size_t P = shift ? 2 * m - 1 : m;
  const std::size_t c = shift ? m - 1 : left;
  const WindowKernel kernel(C, kappa, drift, grid_step, left, m, c, P);
  const PathGenerator gen = fbm_generator(n, kappa, grid_step, P);
  auto stats = replicate<RunningStats>(
      replications,
      [&] { return WindowState{gen.make_scratch(), std::vector<double>(n * P), {}, PointCloud(n), {}, {}, {}, 0.0, {}}; },
      [&](WindowState& st, std::size_t r, RunningStats& acc) {
        Rng rng(stream.substream(r));
        gen.draw(rng, *st.scratch, st.path);
        if (!shift) {
          acc.add(kernel.plain(st.path.data(), st.xi, st.cloud));
          return;
        }
        st.u.resize(kShiftStrata);
        for (double& v : st.u) v = rng.uniform();
        if (kernel.sliding()) kernel.prepare(st.path.data(), st.A, st.E, st.G);
        acc.add(shifted_statistic(kernel, st));
      });
  out.value = stats.mean;
  out.se = stats.std_error();
  return out;
}

namespace {

struct LadderAcc {
  std::vector<RunningStats> rung;
  RunningStats slope_all;
  RunningStats slope_tail;

  void merge(const LadderAcc& o) {
    if (rung.size() < o.rung.size()) rung.resize(o.rung.size());
    for (std::size_t k = 0; k < o.rung.size(); ++k) rung[k].merge(o.rung[k]);
    slope_all.merge(o.slope_all);
    slope_tail.merge(o.slope_tail);
  }
};

std::vector<double> slope_weights(const std::vector<double>& S, std::size_t from) {
  const std::size_t k = S.size() - from;
  double mean = 0.0;
  for (std::size_t j = from; j < S.size(); ++j) mean += S[j];
  mean /= static_cast<double>(k);
  double sxx = 0.0;
  for (std::size_t j = from; j < S.size(); ++j) sxx += (S[j] - mean) * (S[j] - mean);
  std::vector<double> w(S.size(), 0.0);
  for (std::size_t j = from; j < S.size(); ++j) w[j] = (S[j] - mean) / sxx;
  return w;
}

}  // namespace

ConstantEstimate estimate_pickands(const std::vector<double>& C, double kappa, const std::vector<double>& S_ladder,
                                   double grid_step, std::size_t replications, const RngStream& stream,
                                   WindowMethod method) {
  check_common(C, kappa);
  if (S_ladder.size() < 3) throw DomainError("pickands: ladder needs at least three rungs");
  for (std::size_t k = 0; k < S_ladder.size(); ++k) {
    if (!(S_ladder[k] > 0.0)) throw DomainError("pickands: rungs must be positive");
    if (k > 0 && !(S_ladder[k] > S_ladder[k - 1])) throw DomainError("pickands: rungs must increase");
  }
  if (!(grid_step > 0.0)) throw DomainError("pickands: grid step must be positive");
  if (replications < 1000) throw DomainError("pickands: at least 1000 replications required");

  const std::size_t n = C.size();
  const std::size_t K = S_ladder.size();
  std::vector<std::size_t> counts(K);
  for (std::size_t k = 0; k < K; ++k) counts[k] = steps_for(S_ladder[k], grid_step) + 1;
  const std::size_t m = counts.back();
  const bool shift = method == WindowMethod::shift;
  const std::size_t P = shift ? 2 * m - 1 : m;
  const std::size_t c = shift ? m - 1 : 0;

  const DriftSpec none = DriftSpec::zero(n, kappa);
  std::vector<WindowKernel> kernels;
  kernels.reserve(K);
  for (std::size_t k = 0; k < K; ++k) kernels.emplace_back(C, kappa, none, grid_step, 0, counts[k], c, P);

  const auto w_all = slope_weights(S_ladder, 0);
  const auto w_tail = K >= 4 ? slope_weights(S_ladder, 1) : w_all;

  const PathGenerator gen = fbm_generator(n, kappa, grid_step, P);
  auto acc = replicate<LadderAcc>(
      replications,
      [&] { return WindowState{gen.make_scratch(), std::vector<double>(n * P), {}, PointCloud(n), {}, {}, {}, 0.0, {}}; },
      [&](WindowState& st, std::size_t r, LadderAcc& a) {
        if (a.rung.size() < K) a.rung.resize(K);
        Rng rng(stream.substream(r));
        gen.draw(rng, *st.scratch, st.path);
        if (shift) {
          st.u.resize(kShiftStrata);
          for (double& v : st.u) v = rng.uniform();
          if (kernels[0].sliding()) kernels[0].prepare(st.path.data(), st.A, st.E, st.G);
        }
        double s_all = 0.0, s_tail = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          const double v =
              shift ? shifted_statistic(kernels[k], st) : kernels[k].plain(st.path.data(), st.xi, st.cloud);
          a.rung[k].add(v);
          s_all += w_all[k] * v;
          s_tail += w_tail[k] * v;
        }
        a.slope_all.add(s_all);
        a.slope_tail.add(s_tail);
      });

  ConstantEstimate out;
  out.tag = EstimatorTag::slope;
  out.S1 = 0.0;
  out.S2 = S_ladder.back();
  out.grid_step = grid_step;
  out.replications = replications;
  for (std::size_t k = 0; k < K; ++k) out.rungs.push_back({S_ladder[k], acc.rung[k].mean, acc.rung[k].std_error()});

  // fitted line through all rungs; drop the first rung if it sits off the line
  double s_mean = 0.0, h_mean = 0.0;
  for (const auto& r : out.rungs) {
    s_mean += r.x;
    h_mean += r.value;
  }
  s_mean /= static_cast<double>(K);
  h_mean /= static_cast<double>(K);
  const double slope = acc.slope_all.mean;
  const double resid0 = out.rungs[0].value - (h_mean + slope * (out.rungs[0].x - s_mean));
  const bool drop = K >= 4 && std::abs(resid0) > 3.0 * out.rungs[0].se;
  const RunningStats& chosen = drop ? acc.slope_tail : acc.slope_all;
  out.value = chosen.mean;
  out.se = chosen.std_error();
  if (drop) out.warnings.push_back("first rung dropped from the slope fit (residual beyond 3 se)");

  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& a = out.rungs[k];
    const auto& b = out.rungs[k + 1];
    const double ra = a.value / a.x, rb = b.value / b.x;
    const double pooled = std::hypot(a.se / a.x, b.se / b.x);
    if (rb - ra > 3.0 * pooled) {
      std::ostringstream msg;
      msg << "H(S)/S increases between S=" << a.x << " and S=" << b.x << " beyond 3 se";
      out.warnings.push_back(msg.str());
      spdlog::warn("pickands: {}", msg.str());
    }
  }
  return out;
}

ConstantEstimate estimate_piterbarg(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                                    PiterbargVariant variant, const std::vector<double>& S_ladder, double grid_step,
                                    std::size_t replications, const RngStream& stream, bool strict,
                                    WindowMethod method) {
  check_common(C, kappa);
  if (S_ladder.empty()) throw DomainError("piterbarg: empty ladder");
  if (drift.exponent != kappa) throw DomainError("piterbarg: drift exponent must equal kappa");
  if (!drift.is_zero()) {
    auto positive_sum = [](const std::vector<double>& d) {
      double s = 0.0;
      for (double v : d) s += v;
      return s > 0.0;
    };
    if (variant != PiterbargVariant::left && !positive_sum(drift.d_upper))
      throw PreconditionError("piterbarg: sum of d_upper must be positive");
    if (variant != PiterbargVariant::right && !positive_sum(drift.d_lower))
      throw PreconditionError("piterbarg: sum of d_lower must be positive");
  }

  std::vector<RungValue> rungs;
  ConstantEstimate last;
  for (std::size_t k = 0; k < S_ladder.size(); ++k) {
    const double S = S_ladder[k];
    const double S1 = variant == PiterbargVariant::right ? 0.0 : S;
    const double S2 = variant == PiterbargVariant::left ? 0.0 : S;
    last = estimate_window_constant(C, kappa, drift, S1, S2, grid_step, replications, stream, method);
    rungs.push_back({S, last.value, last.se});
    if (k == 0) continue;
    const auto& prev = rungs[k - 1];
    const double gap = std::abs(last.value - prev.value);
    if (gap < std::max(2.0 * std::hypot(last.se, prev.se), 1e-3 * last.value)) {
      last.rungs = rungs;
      last.converged = true;
      return last;
    }
  }
  last.rungs = rungs;
  if (strict) {
    std::vector<double> values, errors;
    for (const auto& r : rungs) {
      values.push_back(r.value);
      errors.push_back(r.se);
    }
    throw ConvergenceError("piterbarg: ladder did not converge", values, errors);
  }
  last.converged = false;
  last.warnings.push_back("ladder did not converge; last rung reported");
  return last;
}

double default_discrete_horizon(const std::vector<double>& C, double kappa) {
  check_common(C, kappa);
  double cmin = std::numeric_limits<double>::infinity();
  for (double c : C)
    if (c > 0.0) cmin = std::min(cmin, c);
  return std::pow(40.0 / (cmin * cmin), 1.0 / kappa);
}

RungValue discrete_zero_rung(const std::vector<double>& C, double kappa, double u, double horizon,
                             std::size_t replications, const RngStream& stream) {
  check_common(C, kappa);
  if (!(u > 0.0)) throw DomainError("discrete zero: u must be positive");
  if (replications < 1000) throw DomainError("discrete zero: at least 1000 replications required");
  bool long_enough = false;
  for (double c : C) long_enough = long_enough || c * c * std::pow(horizon, kappa) >= 40.0;
  if (!long_enough) throw PreconditionError("discrete zero: horizon too short, truncation error not negligible");
  const auto K = static_cast<std::size_t>(std::floor(horizon / u * (1.0 + 1e-12)));
  if (K < 1) throw PreconditionError("discrete zero: no lattice point u*k inside the horizon (truncation)");

  const std::size_t n = C.size();
  const std::size_t m = K + 1;
  std::vector<double> shift(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      shift[i * m + j] = C[i] * C[i] * std::pow(static_cast<double>(j) * u, kappa);

  const PathGenerator gen = fbm_generator(n, kappa, u, m);
  const double root2 = std::numbers::sqrt2;
  struct State {
    PathGenerator::ScratchPtr scratch;
    std::vector<double> path;
    std::vector<double> e;
  };
  auto stats = replicate<RunningStats>(
      replications, [&] { return State{gen.make_scratch(), std::vector<double>(n * m), std::vector<double>(n)}; },
      [&](State& st, std::size_t r, RunningStats& acc) {
        Rng rng(stream.substream(r));
        gen.draw(rng, *st.scratch, st.path);
        for (std::size_t i = 0; i < n; ++i) st.e[i] = rng.exponential();
        bool all_nonpositive = true;
        for (std::size_t j = 1; j < m && all_nonpositive; ++j) {
          double z = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < n; ++i)
            z = std::min(z, root2 * C[i] * st.path[i * m + j] - shift[i * m + j] + st.e[i]);
          all_nonpositive = z <= 0.0;
        }
        acc.add(all_nonpositive ? 1.0 : 0.0);
      });
  return {u, stats.mean / u, stats.std_error() / u};
}

ConstantEstimate estimate_discrete_zero(const std::vector<double>& C, double kappa,
                                        const std::vector<double>& u_ladder, double horizon,
                                        std::size_t replications, const RngStream& stream) {
  check_common(C, kappa);
  if (u_ladder.size() < 2) throw DomainError("discrete zero: ladder needs at least two rungs");
  for (std::size_t k = 1; k < u_ladder.size(); ++k)
    if (!(u_ladder[k] < u_ladder[k - 1])) throw DomainError("discrete zero: u ladder must decrease");

  ConstantEstimate out;
  out.tag = EstimatorTag::discrete_zero;
  out.S2 = horizon;
  out.grid_step = u_ladder.back();
  out.replications = replications;
  for (std::size_t k = 0; k < u_ladder.size(); ++k)
    out.rungs.push_back(discrete_zero_rung(C, kappa, u_ladder[k], horizon, replications,
                                           stream.substream(static_cast<std::uint64_t>(k + 1) << 40)));
  // lattice bias scales like u^{kappa/2}; extrapolate linearly in that variable
  const auto& a = out.rungs[out.rungs.size() - 2];
  const auto& b = out.rungs.back();
  const double xa = std::pow(a.x, kappa / 2.0), xb = std::pow(b.x, kappa / 2.0);
  const double w = xb / (xa - xb);
  out.value = b.value + (b.value - a.value) * w;
  out.se = std::hypot((1.0 + w) * b.se, w * a.se);
  if (out.value < 0.0) {
    out.warnings.push_back("extrapolated value negative; clamped to 0");
    out.value = 0.0;
  }
  return out;
}

double closed_forms_n1(double C1, double kappa, std::optional<double> window_T) {
  if (!(C1 > 0.0)) throw DomainError("closed form: C1 must be positive");
  if (kappa != 1.0 && kappa != 2.0) throw UnsupportedError("closed form: only kappa in {1,2} has a closed form");
  const double scale = std::pow(C1, 2.0 / kappa);
  if (!window_T) return kappa == 1.0 ? scale : scale / std::sqrt(std::numbers::pi);
  if (!(*window_T >= 0.0)) throw DomainError("closed form: window length must be nonnegative");
  const double T = scale * *window_T;  // self-similarity: C B(t) on [0,T] ~ B on [0, C^{2/kappa} T]
  if (kappa == 2.0) return 1.0 + T / std::sqrt(std::numbers::pi);
  return (2.0 + T) * normal_cdf(std::sqrt(T / 2.0)) + std::sqrt(T / std::numbers::pi) * std::exp(-T / 4.0);
}

PickandsBounds pickands_bounds(std::size_t n, const std::vector<double>& C, double kappa) {
  if (n == 0 || C.size() != n) throw DomainError("pickands bounds: C must have n entries");
  check_common(C, kappa);
  double sum_sq = 0.0;
  for (double c : C) sum_sq += c * c;
  PickandsBounds out;
  out.lower = std::pow(sum_sq, 1.0 / kappa) / (std::pow(4.0, 1.0 + 1.0 / kappa) * std::tgamma(1.0 / kappa + 1.0));
  const bool unit = std::all_of(C.begin(), C.end(), [](double c) { return c == 1.0; });
  if (!unit || (kappa != 1.0 && kappa != 2.0)) return out;
  const double nn = static_cast<double>(n);
  const double ratio = n == 1 ? 1.0 : nn / (nn - 1.0);
  if (kappa == 1.0) {
    const double base = 2.0 + std::sqrt(2.0 / (std::numbers::pi * std::numbers::e));
    out.upper = nn * std::pow(ratio * base, nn - 1.0);
  } else {
    out.upper = nn * std::pow(ratio, nn - 1.0) / std::sqrt(std::numbers::pi);
  }
  return out;
}

double piterbarg_lower_bound(const std::vector<double>& C, double kappa, const DriftSpec& drift,
                             PiterbargVariant variant, double pickands_value) {
  check_common(C, kappa);
  if (!(pickands_value >= 0.0)) throw DomainError("piterbarg bound: Pickands value must be nonnegative");
  auto clamped_sum = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double v : d) s += std::max(0.0, v);
    return s;
  };
  const double ek = std::numbers::e * kappa;
  switch (variant) {
    case PiterbargVariant::right:
    case PiterbargVariant::left: {
      const double s = clamped_sum(variant == PiterbargVariant::right ? drift.d_upper : drift.d_lower);
      if (!(s > 0.0)) throw DomainError("piterbarg bound: all clamped drift coefficients are zero");
      return std::pow(ek * s, -1.0 / kappa) * pickands_value;
    }
    case PiterbargVariant::two_sided: {
      const double s = clamped_sum(drift.d_lower) + clamped_sum(drift.d_upper);
      if (!(s > 0.0)) throw DomainError("piterbarg bound: all clamped drift coefficients are zero");
      return 2.0 * std::pow(ek, -1.0 / kappa) * std::pow(s, -1.0 / kappa) * pickands_value;
    }
  }
  return 0.0;
}

}  // namespace vgauss
