#include "vgauss/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vgauss/error.hpp"

namespace vgauss {

PointCloud::PointCloud(std::size_t dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
  if (dim_ == 0) throw DomainError("point cloud: dimension must be positive");
  if (flat_.size() % dim_ != 0) throw DomainError("point cloud: flat size is not a multiple of dim");
}

PointCloud PointCloud::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  if (rows.size() == 0) throw DomainError("point cloud: no rows");
  PointCloud cloud(rows.begin()->size());
  for (const auto& r : rows) {
    if (r.size() != cloud.dim()) throw DomainError("point cloud: ragged rows");
    cloud.add(std::span<const double>(r.begin(), r.size()));
  }
  return cloud;
}

void PointCloud::add(std::span<const double> p) {
  if (p.size() != dim_) throw DomainError("point cloud: point has wrong dimension");
  flat_.insert(flat_.end(), p.begin(), p.end());
}

namespace {

void require_finite_nonempty(const PointCloud& cloud) {
  if (cloud.empty()) throw DomainError("orthant integral: empty point cloud");
  for (double v : cloud.flat())
    if (!std::isfinite(v)) throw DomainError("orthant integral: non-finite point");
}

std::vector<double> componentwise_max(const PointCloud& cloud) {
  std::vector<double> m(cloud.dim(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const auto p = cloud.point(j);
    for (std::size_t i = 0; i < cloud.dim(); ++i) m[i] = std::max(m[i], p[i]);
  }
  return m;
}

// Staircase of 2-D Pareto points sorted by x ascending (so y descending).
// Returns the integral of exp(w1 + w2) over the union.
double sweep2(std::vector<std::pair<double, double>>& pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  });
  // keep points with strictly increasing y while scanning x descending
  std::vector<std::pair<double, double>> stair;
  double best_y = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    if (p.second > best_y) {
      stair.push_back(p);
      best_y = p.second;
    }
  // stair: x descending, y ascending. The slab between consecutive y levels
  // has width exp(x) of the point with the larger x still above it.
  double total = 0.0;
  double below = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : stair) {
    // region w2 in (below, y) is covered for w1 < x
    const double part = std::exp(x + y) * (below == -std::numeric_limits<double>::infinity()
                                               ? 1.0
                                               : -std::expm1(below - y));
    total += part;
    below = y;
  }
  return total;
}

double sliced(const std::vector<double>& flat, std::size_t dim, std::size_t count);

double sliced_sorted_desc(std::vector<std::size_t>& order, const std::vector<double>& flat, std::size_t dim) {
  // order sorted by last coordinate descending
  const std::size_t last = dim - 1;
  double total = 0.0;
  std::vector<double> active;
  active.reserve(order.size() * last);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double* p = flat.data() + order[k] * dim;
    active.insert(active.end(), p, p + last);
    const double s_k = p[last];
    const double s_next =
        k + 1 < order.size() ? flat[order[k + 1] * dim + last] : -std::numeric_limits<double>::infinity();
    if (s_next == s_k) continue;  // equal levels: slab has zero width
    const double weight = std::exp(s_k) * (s_next == -std::numeric_limits<double>::infinity()
                                               ? 1.0
                                               : -std::expm1(s_next - s_k));
    total += weight * sliced(active, last, k + 1);
  }
  return total;
}

double sliced(const std::vector<double>& flat, std::size_t dim, std::size_t count) {
  if (dim == 1) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) m = std::max(m, flat[j]);
    return std::exp(m);
  }
  if (dim == 2) {
    std::vector<std::pair<double, double>> pts(count);
    for (std::size_t j = 0; j < count; ++j) pts[j] = {flat[2 * j], flat[2 * j + 1]};
    return sweep2(pts);
  }
  PointCloud cloud(dim, std::vector<double>(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(count * dim)));
  const PointCloud pruned = pareto_prune(cloud);
  std::vector<std::size_t> order(pruned.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& pf = pruned.flat();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pf[a * dim + dim - 1] > pf[b * dim + dim - 1]; });
  return sliced_sorted_desc(order, pf, dim);
}

// Shifted copy p - M so every coordinate is <= 0; returns sum(M).
double shift_to_max(const PointCloud& cloud, std::vector<double>& shifted) {
  const auto m = componentwise_max(cloud);
  shifted = cloud.flat();
  const std::size_t d = cloud.dim();
  for (std::size_t j = 0; j < cloud.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) shifted[j * d + i] -= m[i];
  return std::accumulate(m.begin(), m.end(), 0.0);
}

struct InclusionExclusion {
  const std::vector<double>& pts;
  std::size_t dim;
  std::size_t count;
  double sum = 0.0;

  // Adds signed terms for all nonempty subsets extending `mins` with indices >= start.
  void visit(std::size_t start, std::vector<double>& mins, int size) {
    for (std::size_t j = start; j < count; ++j) {
      std::vector<double> next(mins);
      double log_term = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        next[i] = std::min(next[i], pts[j * dim + i]);
        log_term += next[i];
      }
      const double term = std::exp(log_term);
      sum += (size % 2 == 0) ? term : -term;  // |J| = size + 1
      if (term < 1e-16 * std::abs(sum)) continue;
      visit(j + 1, next, size + 1);
    }
  }
};

}  // namespace

PointCloud pareto_prune(const PointCloud& cloud) {
  const std::size_t d = cloud.dim();
  const std::size_t m = cloud.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const auto& f = cloud.flat();
  auto sum_of = [&](std::size_t j) { return std::accumulate(f.begin() + j * d, f.begin() + (j + 1) * d, 0.0); };
  std::vector<double> sums(m);
  for (std::size_t j = 0; j < m; ++j) sums[j] = sum_of(j);
  // dominators come first: larger sum, ties broken lexicographically descending
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] > sums[b];
    return std::lexicographical_compare(f.begin() + b * d, f.begin() + (b + 1) * d, f.begin() + a * d,
                                        f.begin() + (a + 1) * d);
  });

  PointCloud out(d);
  if (d == 1) {
    if (m > 0) out.add(cloud.point(order.front()));
    return out;
  }
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const auto p = cloud.point(idx);
    bool dominated = false;
    for (std::size_t k : kept) {
      const auto q = cloud.point(k);
      bool all_ge = true;
      for (std::size_t i = 0; i < d && all_ge; ++i) all_ge = q[i] >= p[i];
      if (all_ge) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  out.reserve(kept.size());
  for (std::size_t k : kept) out.add(cloud.point(k));
  return out;
}

double ewv_exact(const PointCloud& cloud) {
  require_finite_nonempty(cloud);
  const std::size_t d = cloud.dim();
  if (d <= 2) return ewv_sliced(cloud);
  const PointCloud pruned = pareto_prune(cloud);
  if (pruned.size() > kInclusionExclusionCap)
    throw CapacityError("ewv_exact: Pareto set of " + std::to_string(pruned.size()) +
                        " points exceeds the inclusion-exclusion cap");
  std::vector<double> shifted;
  const double log_shift = shift_to_max(pruned, shifted);
  InclusionExclusion ie{shifted, d, pruned.size()};
  std::vector<double> start(d, std::numeric_limits<double>::infinity());
  ie.visit(0, start, 0);
  return std::exp(log_shift + std::log(ie.sum));
}

double ewv_auto(const PointCloud& cloud) {
  require_finite_nonempty(cloud);
  const std::size_t d = cloud.dim();
  const std::size_t m = cloud.size();
  if (d == 1 || m == 1) return ewv_sliced(cloud);

  // anchors: maximiser of each coordinate and of the coordinate sum
  const auto& f = cloud.flat();
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i <= d; ++i) {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      if (i < d) {
        v = f[j * d + i];
      } else {
        for (std::size_t k = 0; k < d; ++k) v += f[j * d + k];
      }
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    if (std::find(anchors.begin(), anchors.end(), best) == anchors.end()) anchors.push_back(best);
  }
  PointCloud kept(d);
  for (std::size_t j = 0; j < m; ++j) {
    bool dominated = false;
    const bool is_anchor = std::find(anchors.begin(), anchors.end(), j) != anchors.end();
    for (std::size_t a : anchors) {
      if (is_anchor) break;
      if (a == j) continue;
      bool all_ge = true;
      for (std::size_t k = 0; k < d && all_ge; ++k) all_ge = f[a * d + k] >= f[j * d + k];
      if (all_ge) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.add(cloud.point(j));
  }
  if (d == 2) return ewv_sliced(kept);
  const PointCloud pruned = pareto_prune(kept);
  if (pruned.size() <= 12) return ewv_exact(pruned);
  return ewv_sliced(pruned);
}

double log_ewv_sliced(const PointCloud& cloud) {
  require_finite_nonempty(cloud);
  std::vector<double> shifted;
  const double log_shift = shift_to_max(cloud, shifted);
  return log_shift + std::log(sliced(shifted, cloud.dim(), cloud.size()));
}

double ewv_sliced(const PointCloud& cloud) { return std::exp(log_ewv_sliced(cloud)); }

EwvMcEstimate ewv_mc(const PointCloud& cloud, std::size_t budget, const RngStream& stream) {
  require_finite_nonempty(cloud);
  if (budget < 100) throw DomainError("ewv_mc: budget must be at least 100");
  const PointCloud pruned = pareto_prune(cloud);
  const std::size_t d = cloud.dim();
  const auto m = componentwise_max(pruned);
  const double log_scale = std::accumulate(m.begin(), m.end(), 0.0);

  Rng rng(stream);
  std::vector<double> w(d);
  std::size_t hits = 0;
  for (std::size_t b = 0; b < budget; ++b) {
    for (std::size_t i = 0; i < d; ++i) w[i] = m[i] - rng.exponential();
    for (std::size_t j = 0; j < pruned.size(); ++j) {
      const auto p = pruned.point(j);
      bool below = true;
      for (std::size_t i = 0; i < d && below; ++i) below = w[i] < p[i];
      if (below) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(budget);
  const double scale = std::exp(log_scale);
  return {scale * frac, scale * std::sqrt(frac * (1.0 - frac) / static_cast<double>(budget))};
}

}  // namespace vgauss
