#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vgauss/process.hpp"
#include "vgauss/rng.hpp"

namespace vgauss {

/// Uniform grid origin + j*step, 0 <= j < count.
struct SampleGrid {
  double origin = 0.0;
  double step = 1.0;
  std::size_t count = 1;

  double node(std::size_t j) const { return origin + static_cast<double>(j) * step; }
  double end() const { return node(count - 1); }
  /// Grid with `count` chosen so the last node is `lo + step*round((hi-lo)/step)`.
  static SampleGrid covering(double lo, double hi, double step);
};

/// R replications of an n-coordinate path, stored replication-major,
/// coordinate-major, node-minor.
class PathBatch {
 public:
  PathBatch() = default;
  PathBatch(SampleGrid grid, std::size_t n_coords, std::size_t replications);

  const SampleGrid& grid() const { return grid_; }
  std::size_t n_coords() const { return n_; }
  std::size_t replications() const { return reps_; }
  std::size_t nodes() const { return grid_.count; }

  std::span<double> path(std::size_t rep, std::size_t coord) {
    return {values_.data() + (rep * n_ + coord) * grid_.count, grid_.count};
  }
  std::span<const double> path(std::size_t rep, std::size_t coord) const {
    return {values_.data() + (rep * n_ + coord) * grid_.count, grid_.count};
  }
  std::span<double> replication(std::size_t rep) {
    return {values_.data() + rep * n_ * grid_.count, n_ * grid_.count};
  }
  double at(std::size_t rep, std::size_t coord, std::size_t node) const { return path(rep, coord)[node]; }
  const std::vector<double>& values() const { return values_; }

 private:
  SampleGrid grid_{};
  std::size_t n_ = 0;
  std::size_t reps_ = 0;
  std::vector<double> values_;
};

/// Exact sampler for a stationary Gaussian sequence with autocovariance
/// c(0..m-1), by circulant embedding. One transform yields two independent
/// paths (real and imaginary parts).
class CirculantSampler {
 public:
  /// `autocov(k)` must be defined for every lag k >= 0; the embedding is
  /// enlarged (up to `max_growth` times the minimal power of two) while
  /// eigenvalues below -1e-8 * max remain.
  template <class Autocov>
  CirculantSampler(std::size_t m, Autocov autocov, std::size_t max_growth = 16) {
    init(m, [&](std::size_t k) { return static_cast<double>(autocov(k)); }, max_growth);
  }
  ~CirculantSampler();
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  class Workspace;
  struct WorkspaceDeleter {
    void operator()(Workspace* w) const;
  };
  using WorkspacePtr = std::unique_ptr<Workspace, WorkspaceDeleter>;
  WorkspacePtr make_workspace() const;

  std::size_t size() const { return m_; }
  std::size_t embedding_size() const { return big_m_; }
  /// Number of eigenvalues clamped to zero.
  std::size_t clamped() const { return clamped_; }

  void sample_pair(Rng& rng, Workspace& ws, std::span<double> first, std::span<double> second) const;
  /// One path from a Hermitian spectrum and a real transform (M normals).
  void sample_one(Rng& rng, Workspace& ws, std::span<double> out) const;

 private:
  void init(std::size_t m, const std::function<double(std::size_t)>& autocov, std::size_t max_growth);

  std::size_t m_ = 0;
  std::size_t big_m_ = 0;
  std::size_t clamped_ = 0;
  std::vector<double> scale_;  // sqrt(lambda_k / M)
  void* plan_ = nullptr;
  void* plan_real_ = nullptr;
};

/// Dense factor F with F F^T = cov, from a pivoted LDL^T factorization with
/// negative pivots (round-off) truncated to zero.
class DenseFactorSampler {
 public:
  explicit DenseFactorSampler(const Eigen::MatrixXd& cov);
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }
  void sample(Rng& rng, std::span<double> out, std::vector<double>& scratch) const;
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  Eigen::MatrixXd factor_;
};

/// Draws whole replications of a vector process on a grid. Coordinates are
/// mutually independent; coordinates sharing a circulant embedding consume
/// both halves of one transform.
class PathGenerator {
 public:
  PathGenerator(const VectorProcessSpec& spec, const SampleGrid& grid);
  ~PathGenerator();
  PathGenerator(PathGenerator&&) noexcept;

  /// Per-worker transform buffers.
  struct Scratch;
  struct ScratchDeleter {
    void operator()(Scratch* s) const;
  };
  using ScratchPtr = std::unique_ptr<Scratch, ScratchDeleter>;
  ScratchPtr make_scratch() const;

  std::size_t dim() const;
  std::size_t nodes() const { return grid_.count; }
  const SampleGrid& grid() const { return grid_; }

  /// Fills `out` (dim * nodes, coordinate-major) with one replication.
  void draw(Rng& rng, Scratch& scratch, std::span<double> out) const;

  /// Short description of the method used per coordinate ("ar1", "circulant", ...).
  std::vector<std::string> methods() const;

 private:
  struct Coord;
  SampleGrid grid_;
  std::vector<std::unique_ptr<Coord>> coords_;
};

/// Exact fractional Brownian motion on a grid starting at 0.
PathBatch sample_fbm(double kappa, const SampleGrid& grid, std::size_t replications, const RngStream& stream);

/// Independent coordinates of `spec` on `grid`; replication r uses stream.substream(r).
PathBatch sample_vector(const VectorProcessSpec& spec, const SampleGrid& grid, std::size_t replications,
                        const RngStream& stream);

/// Oracle sampler from an explicit covariance matrix.
PathBatch sample_cholesky_oracle(const Eigen::MatrixXd& cov, std::size_t replications, const RngStream& stream);

/// Covariance matrix of one coordinate on the grid.
Eigen::MatrixXd coordinate_covariance(const CoordinateSpec& coord, const SampleGrid& grid, double horizon);
/// Covariance matrix of standard fBm on the grid.
Eigen::MatrixXd fbm_covariance(double kappa, const SampleGrid& grid);

/// Binary dump: magic "GPB1", u64 n, u64 m, u64 R, f64 step, f64 origin,
/// then R*n*m little-endian f64 values.
void write_path_dump(const std::filesystem::path& file, const PathBatch& batch);
PathBatch read_path_dump(const std::filesystem::path& file);

}  // namespace vgauss
