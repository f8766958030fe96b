#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vgauss/sampler.hpp"

namespace testing {

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic two-sample critical value at level alpha.
inline double ks_critical(std::size_t na, std::size_t nb, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(na + nb) / (static_cast<double>(na) * static_cast<double>(nb)));
}

inline std::vector<double> node_values(const vgauss::PathBatch& b, std::size_t coord, std::size_t node) {
  std::vector<double> out(b.replications());
  for (std::size_t r = 0; r < b.replications(); ++r) out[r] = b.at(r, coord, node);
  return out;
}

struct CovCheck {
  double worst_z = 0.0;
};

/// Largest |empirical - target| / se over all covariance entries, with
/// se_jk = sqrt((c_jj c_kk + c_jk^2) / R) for a centered Gaussian.
inline CovCheck covariance_z(const vgauss::PathBatch& b, std::size_t coord, const Eigen::MatrixXd& target) {
  const std::size_t m = b.nodes(), R = b.replications();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < R; ++r) {
    const auto p = b.path(r, coord);
    for (std::size_t j = 0; j < m; ++j) x[static_cast<Eigen::Index>(j)] = p[j];
    s.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  s = s.selfadjointView<Eigen::Lower>();
  s /= static_cast<double>(R);
  CovCheck out;
  for (Eigen::Index j = 0; j < s.rows(); ++j)
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double se =
          std::sqrt((target(j, j) * target(k, k) + target(j, k) * target(j, k)) / static_cast<double>(R));
      if (se == 0.0) continue;
      out.worst_z = std::max(out.worst_z, std::abs(s(j, k) - target(j, k)) / se);
    }
  return out;
}

}  // namespace testing
