#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "vgauss/rng.hpp"

namespace vgauss {

/// Finite set of points in R^dim, stored row-major.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim = 1) : dim_(dim) {}
  PointCloud(std::size_t dim, std::vector<double> flat);
  static PointCloud from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  bool empty() const { return flat_.empty(); }
  std::span<const double> point(std::size_t j) const { return {flat_.data() + j * dim_, dim_}; }
  void add(std::span<const double> p);
  void clear() { flat_.clear(); }
  void reserve(std::size_t points) { flat_.reserve(points * dim_); }
  const std::vector<double>& flat() const { return flat_; }

 private:
  std::size_t dim_;
  std::vector<double> flat_;
};

/// Largest Pareto set handled by inclusion-exclusion in ewv_exact (n >= 3).
inline constexpr std::size_t kInclusionExclusionCap = 22;

/// Componentwise-maximal subset. Duplicates collapse to one point and weakly
/// dominated points are removed; the orthant union is unchanged.
PointCloud pareto_prune(const PointCloud& cloud);

/// EWV(P) = integral over R^n of exp(sum w) 1{exists p in P: w < p} dw.
/// n = 1: exp(max); n = 2: staircase sweep; n >= 3: inclusion-exclusion over
/// the Pareto set, which throws CapacityError beyond kInclusionExclusionCap.
double ewv_exact(const PointCloud& cloud);

/// Same integral by recursive slicing along the last axis; exact for every
/// dimension and Pareto-set size, cost O(K^(n-1) log K).
double ewv_sliced(const PointCloud& cloud);

/// log EWV by slicing; finite even when EWV itself would overflow.
double log_ewv_sliced(const PointCloud& cloud);

/// Exact EWV by the cheapest applicable method. Points weakly dominated by the
/// per-axis and sum maximisers are dropped first, then n <= 2 sweeps and
/// n >= 3 uses inclusion-exclusion for small Pareto sets and slicing beyond.
double ewv_auto(const PointCloud& cloud);

struct EwvMcEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

/// Unbiased estimator: draws w = M - E with M the componentwise maximum and E
/// i.i.d. unit exponentials, returns exp(sum M) times the covered fraction.
EwvMcEstimate ewv_mc(const PointCloud& cloud, std::size_t budget, const RngStream& stream);

}  // namespace vgauss
