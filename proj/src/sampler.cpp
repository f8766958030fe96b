#include "vgauss/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <spdlog/spdlog.h>
#include <boost/math/quadrature/gauss.hpp>

#include "vgauss/error.hpp"
#include "vgauss/parallel.hpp"

namespace vgauss {
namespace {

// FFTW planning is not thread safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
  std::size_t size;
};

std::size_t next_pow2(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

// ---------------------------------------------------------------------------
// SampleGrid / PathBatch
// ---------------------------------------------------------------------------

SampleGrid SampleGrid::covering(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("SampleGrid::covering: need step > 0 and hi >= lo");
  const auto intervals = static_cast<std::size_t>(std::llround((hi - lo) / step));
  return {lo, step, intervals + 1};
}

PathBatch::PathBatch(SampleGrid grid, std::size_t n_coords, std::size_t replications)
    : grid_(grid), n_(n_coords), reps_(replications), values_(replications * n_coords * grid.count, 0.0) {}

// ---------------------------------------------------------------------------
// CirculantSampler
// ---------------------------------------------------------------------------

class CirculantSampler::Workspace {
 public:
  explicit Workspace(std::size_t n) : in(n), out(n), real(fftw_alloc_real(n)) {
    if (!real) throw std::bad_alloc();
  }
  ~Workspace() { fftw_free(real); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  FftwBuffer in;
  FftwBuffer out;
  double* real;
};

void CirculantSampler::init(std::size_t m, const std::function<double(std::size_t)>& autocov,
                            std::size_t max_growth) {
  if (m == 0) throw DomainError("circulant embedding: empty sequence");
  m_ = m;
  if (m == 1) {
    big_m_ = 1;
    const double c0 = autocov(0);
    if (c0 < 0.0) throw EmbeddingError("circulant embedding: negative variance");
    scale_ = {std::sqrt(c0)};
    return;
  }
  const std::size_t base = next_pow2(2 * (m - 1));
  for (std::size_t big = base; big <= base * max_growth; big *= 2) {
    FftwBuffer row(big), eig(big);
    const std::size_t half = big / 2;
    for (std::size_t j = 0; j <= half; ++j) {
      row.data[j][0] = autocov(j);
      row.data[j][1] = 0.0;
    }
    for (std::size_t j = 1; j < half; ++j) {
      row.data[big - j][0] = row.data[j][0];
      row.data[big - j][1] = 0.0;
    }
    fftw_plan p;
    {
      std::lock_guard lock(fftw_planner_mutex());
      p = fftw_plan_dft_1d(static_cast<int>(big), row.data, eig.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(p);
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(p);
    }
    double lmax = 0.0, lmin = 0.0;
    for (std::size_t k = 0; k < big; ++k) {
      lmax = std::max(lmax, eig.data[k][0]);
      lmin = std::min(lmin, eig.data[k][0]);
    }
    if (!(lmax > 0.0)) throw EmbeddingError("circulant embedding: covariance is identically zero");
    if (lmin < -1e-8 * lmax) continue;

    big_m_ = big;
    scale_.resize(big);
    clamped_ = 0;
    const double roundoff = 1e-13 * lmax;
    bool warn = false;
    for (std::size_t k = 0; k < big; ++k) {
      double lambda = eig.data[k][0];
      if (lambda < roundoff) {
        if (lambda < -roundoff) {
          ++clamped_;
          warn = true;
        }
        lambda = 0.0;
      }
      scale_[k] = std::sqrt(lambda / static_cast<double>(big));
    }
    if (warn)
      spdlog::warn("circulant embedding (m={}, M={}): clamped {} negative eigenvalues (min {:.3g} of max)", m, big,
                   clamped_, lmin / lmax);
    Workspace ws(big);
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(big), ws.in.data, ws.out.data, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_real_ = fftw_plan_dft_c2r_1d(static_cast<int>(big), ws.in.data, ws.real, FFTW_ESTIMATE);
    return;
  }
  throw EmbeddingError("circulant embedding: negative eigenvalues persist up to M = " +
                       std::to_string(base * max_growth));
}

CirculantSampler::~CirculantSampler() {
  std::lock_guard lock(fftw_planner_mutex());
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (plan_real_) fftw_destroy_plan(static_cast<fftw_plan>(plan_real_));
}

void CirculantSampler::WorkspaceDeleter::operator()(Workspace* w) const { delete w; }

CirculantSampler::WorkspacePtr CirculantSampler::make_workspace() const {
  return WorkspacePtr(new Workspace(std::max<std::size_t>(big_m_, 1)));
}

void CirculantSampler::sample_pair(Rng& rng, Workspace& ws, std::span<double> first,
                                   std::span<double> second) const {
  if (m_ == 1) {
    first[0] = scale_[0] * rng.normal();
    second[0] = scale_[0] * rng.normal();
    return;
  }
  fftw_complex* in = ws.in.data;
  for (std::size_t k = 0; k < big_m_; ++k) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    in[k][0] = scale_[k] * z1;
    in[k][1] = scale_[k] * z2;
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_), in, ws.out.data);
  const fftw_complex* out = ws.out.data;
  for (std::size_t j = 0; j < m_; ++j) {
    first[j] = out[j][0];
    second[j] = out[j][1];
  }
}

void CirculantSampler::sample_one(Rng& rng, Workspace& ws, std::span<double> out) const {
  if (m_ == 1) {
    out[0] = scale_[0] * rng.normal();
    return;
  }
  // Hermitian spectrum: real weights at 0 and M/2, complex pairs in between
  // with half the variance in each part, so one real transform suffices.
  const std::size_t half = big_m_ / 2;
  fftw_complex* in = ws.in.data;
  in[0][0] = scale_[0] * rng.normal();
  in[0][1] = 0.0;
  for (std::size_t k = 1; k < half; ++k) {
    const double s = scale_[k] * (1.0 / std::numbers::sqrt2);
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    in[k][0] = s * z1;
    in[k][1] = s * z2;
  }
  in[half][0] = scale_[half] * rng.normal();
  in[half][1] = 0.0;
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_real_), in, ws.real);
  std::copy_n(ws.real, m_, out.begin());
}

// ---------------------------------------------------------------------------
// DenseFactorSampler
// ---------------------------------------------------------------------------

DenseFactorSampler::DenseFactorSampler(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) throw FactorizationError("dense factor: matrix must be square");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
    throw FactorizationError("dense factor: matrix is not symmetric");
  const double trace = cov.trace();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  Eigen::VectorXd d;
  if (ldlt.info() == Eigen::Success) d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() < -1e-10 * std::abs(trace)) {
    // near-singular kernels (kappa = 2) trip the pivoting; V sqrt(L) is exact too
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw FactorizationError("dense factor: eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::abs(trace))
      throw FactorizationError("dense factor: matrix is indefinite beyond tolerance");
    factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    return;
  }
  d = d.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd lower = ldlt.matrixL();
  lower = lower * d.asDiagonal();
  factor_ = ldlt.transpositionsP().transpose() * lower;
}

void DenseFactorSampler::sample(Rng& rng, std::span<double> out, std::vector<double>& scratch) const {
  const auto m = static_cast<Eigen::Index>(size());
  scratch.resize(static_cast<std::size_t>(m));
  rng.fill_normal(scratch);
  Eigen::Map<const Eigen::VectorXd> z(scratch.data(), m);
  Eigen::Map<Eigen::VectorXd> x(out.data(), m);
  x.noalias() = factor_ * z;
}

// ---------------------------------------------------------------------------
// Covariance matrices
// ---------------------------------------------------------------------------

Eigen::MatrixXd coordinate_covariance(const CoordinateSpec& coord, const SampleGrid& grid, double horizon) {
  const auto m = static_cast<Eigen::Index>(grid.count);
  Eigen::MatrixXd cov(m, m);
  if (const auto* ls = std::get_if<LocallyStationary>(&coord)) {
    std::vector<double> clock(grid.count);
    for (std::size_t j = 0; j < grid.count; ++j) clock[j] = local_clock(*ls, grid.node(j));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        cov(i, j) = cov(j, i) = std::exp(-std::pow(std::abs(clock[i] - clock[j]), ls->kappa));
    return cov;
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) = eval_covariance(coord, grid.node(i), grid.node(j), horizon);
  return cov;
}

Eigen::MatrixXd fbm_covariance(double kappa, const SampleGrid& grid) {
  return coordinate_covariance(FractionalBrownian{kappa}, grid, std::max(grid.end(), grid.origin));
}

// ---------------------------------------------------------------------------
// PathGenerator
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kDenseFallbackMax = 4096;

// fractional Gaussian noise autocovariance for step delta
struct FgnAutocov {
  double kappa;
  double delta;
  double operator()(std::size_t k) const {
    const double kk = static_cast<double>(k);
    const double scale = 0.5 * std::pow(delta, kappa);
    if (k == 0) return 2.0 * scale;
    return scale * (std::pow(kk + 1.0, kappa) - 2.0 * std::pow(kk, kappa) + std::pow(kk - 1.0, kappa));
  }
};

}  // namespace

struct PathGenerator::Coord {
  enum class Kind { ar1, circulant, dense };
  Kind kind = Kind::ar1;
  std::string method;
  std::vector<double> rho;    // ar1: rho[j] links node j-1 -> j
  std::vector<double> innov;  // ar1: sqrt(1 - rho^2)
  std::vector<double> scale;  // optional per-node multiplier (sigma(t))
  std::size_t circulant_slot = 0;
  std::shared_ptr<const CirculantSampler> circulant;
  std::shared_ptr<const DenseFactorSampler> dense;
  bool solo = false;         // only user of its circulant slot: real transform
  bool cumulative = false;   // fbm: path is prefix sum of increments, starting at 0
  std::size_t skip = 0;      // fbm on a grid not starting at 0: leading nodes to drop
};

struct PathGenerator::Scratch {
  struct Slot {
    CirculantSampler::WorkspacePtr ws;
    std::vector<double> first, second;
    bool pending = false;
  };
  std::vector<Slot> slots;
  std::vector<double> tmp;
  std::vector<double> dense_tmp;
};

namespace {

std::vector<double> sigma_on_grid(const NonStationary& c, const SampleGrid& grid) {
  std::vector<double> s(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) s[j] = c.sigma(grid.node(j));
  return s;
}

}  // namespace

PathGenerator::PathGenerator(const VectorProcessSpec& spec, const SampleGrid& grid) : grid_(grid) {
  if (grid.count == 0 || !(grid.step > 0.0)) throw DomainError("sampler: grid needs count >= 1 and step > 0");
  const double tol = 1e-9 * std::max(1.0, spec.horizon);
  if (grid.origin < -tol || grid.end() > spec.horizon + tol)
    throw DomainError("sampler: grid leaves the horizon [0, T]");

  const std::size_t m = grid.count;
  const double dt = grid.step;
  std::map<std::string, std::pair<std::size_t, std::shared_ptr<const CirculantSampler>>> cache;

  auto circulant_for = [&](const std::string& key, std::size_t len, auto autocov) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto s = std::make_shared<const CirculantSampler>(len, autocov);
    auto entry = std::make_pair(cache.size(), std::shared_ptr<const CirculantSampler>(s));
    cache.emplace(key, entry);
    return entry;
  };

  auto dense_for = [&](const CoordinateSpec& c, Coord& out) {
    if (m > kDenseFallbackMax)
      throw UnsupportedError("sampler: no exact method for this coordinate on " + std::to_string(m) + " nodes");
    out.kind = Coord::Kind::dense;
    out.method = "dense";
    out.dense = std::make_shared<const DenseFactorSampler>(coordinate_covariance(c, grid, spec.horizon));
  };

  auto ar1 = [&](Coord& out, const std::vector<double>& rho) {
    out.kind = Coord::Kind::ar1;
    out.method = "ar1";
    out.rho = rho;
    out.innov.resize(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) out.innov[j] = std::sqrt(std::max(0.0, 1.0 - rho[j] * rho[j]));
  };

  auto stationary_circulant = [&](const CoordinateSpec& c, Coord& out, double a, double kappa) {
    const std::string key = "st:" + std::to_string(a) + ":" + std::to_string(kappa);
    try {
      auto [slot, sampler] = circulant_for(key, m, [a, kappa, dt](std::size_t k) {
        return std::exp(-a * std::pow(static_cast<double>(k) * dt, kappa));
      });
      out.kind = Coord::Kind::circulant;
      out.method = "circulant";
      out.circulant = sampler;
      out.circulant_slot = slot;
    } catch (const EmbeddingError& e) {
      spdlog::info("{}; falling back to dense factorization", e.what());
      if (const auto* ns = std::get_if<NonStationary>(&c)) {
        dense_for(Stationary{ns->a, ns->alpha}, out);
      } else {
        dense_for(c, out);
      }
    }
  };

  for (const auto& spec_coord : spec.coords) {
    auto coord = std::make_unique<Coord>();
    std::visit(
        overloaded{
            [&](const Stationary& c) {
              if (c.kappa == 1.0)
                ar1(*coord, std::vector<double>(m, std::exp(-c.a * dt)));
              else
                stationary_circulant(spec_coord, *coord, c.a, c.kappa);
            },
            [&](const LocallyStationary& c) {
              if (c.a_profile.is_constant()) {
                const double a = c.a_profile(0.0);
                if (c.kappa == 1.0)
                  ar1(*coord, std::vector<double>(m, std::exp(-a * dt)));
                else
                  stationary_circulant(Stationary{a, c.kappa}, *coord, a, c.kappa);
                return;
              }
              if (c.kappa == 1.0) {
                std::vector<double> rho(m, 1.0);
                const double inv = 1.0 / c.kappa;
                for (std::size_t j = 1; j < m; ++j) {
                  const double lo = grid.node(j - 1), hi = grid.node(j);
                  const double dl = boost::math::quadrature::gauss<double, 10>::integrate(
                      [&](double v) { return std::pow(c.a_profile(v), inv); }, lo, hi);
                  rho[j] = std::exp(-dl);
                }
                ar1(*coord, rho);
              } else {
                dense_for(spec_coord, *coord);
              }
            },
            [&](const NonStationary& c) {
              if (c.alpha == 1.0)
                ar1(*coord, std::vector<double>(m, std::exp(-c.a * dt)));
              else
                stationary_circulant(spec_coord, *coord, c.a, c.alpha);
              coord->scale = sigma_on_grid(c, grid);
            },
            [&](const FractionalBrownian& c) {
              const double offset = grid.origin / dt;
              const auto skip = static_cast<std::size_t>(std::llround(offset));
              if (std::abs(offset - static_cast<double>(skip)) > 1e-9 * std::max(1.0, offset)) {
                dense_for(spec_coord, *coord);
                return;
              }
              const std::size_t total = m + skip;
              if (total == 1) {
                // single node at t = 0: identically zero
                ar1(*coord, std::vector<double>(1, 0.0));
                coord->scale = {0.0};
                return;
              }
              const std::string key = "fgn:" + std::to_string(c.kappa) + ":" + std::to_string(total - 1);
              try {
                auto [slot, sampler] = circulant_for(key, total - 1, FgnAutocov{c.kappa, dt});
                coord->kind = Coord::Kind::circulant;
                coord->method = "circulant-fgn";
                coord->circulant = sampler;
                coord->circulant_slot = slot;
                coord->cumulative = true;
                coord->skip = skip;
              } catch (const EmbeddingError&) {
                dense_for(spec_coord, *coord);
              }
            },
        },
        spec_coord);
    coords_.push_back(std::move(coord));
  }
  for (auto& c : coords_) {
    if (c->kind != Coord::Kind::circulant) continue;
    const auto users = std::count_if(coords_.begin(), coords_.end(), [&](const auto& o) {
      return o->kind == Coord::Kind::circulant && o->circulant_slot == c->circulant_slot;
    });
    c->solo = users == 1;
  }
}

PathGenerator::~PathGenerator() = default;
PathGenerator::PathGenerator(PathGenerator&&) noexcept = default;

std::size_t PathGenerator::dim() const { return coords_.size(); }

std::vector<std::string> PathGenerator::methods() const {
  std::vector<std::string> out;
  for (const auto& c : coords_) out.push_back(c->method);
  return out;
}

void PathGenerator::ScratchDeleter::operator()(Scratch* s) const { delete s; }

PathGenerator::ScratchPtr PathGenerator::make_scratch() const {
  ScratchPtr s(new Scratch);
  std::size_t slots = 0;
  for (const auto& c : coords_)
    if (c->kind == Coord::Kind::circulant) slots = std::max(slots, c->circulant_slot + 1);
  s->slots.resize(slots);
  for (const auto& c : coords_) {
    if (c->kind != Coord::Kind::circulant) continue;
    auto& slot = s->slots[c->circulant_slot];
    if (!slot.ws) {
      slot.ws = c->circulant->make_workspace();
      slot.first.resize(c->circulant->size());
      slot.second.resize(c->circulant->size());
    }
  }
  return s;
}

void PathGenerator::draw(Rng& rng, Scratch& scratch, std::span<double> out) const {
  const std::size_t m = grid_.count;
  for (auto& slot : scratch.slots) slot.pending = false;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const Coord& c = *coords_[i];
    std::span<double> path = out.subspan(i * m, m);
    switch (c.kind) {
      case Coord::Kind::ar1: {
        double x = rng.normal();
        path[0] = x;
        for (std::size_t j = 1; j < m; ++j) {
          x = c.rho[j] * x + c.innov[j] * rng.normal();
          path[j] = x;
        }
        break;
      }
      case Coord::Kind::dense:
        c.dense->sample(rng, path, scratch.dense_tmp);
        break;
      case Coord::Kind::circulant: {
        auto& slot = scratch.slots[c.circulant_slot];
        const std::vector<double>* src;
        if (c.solo) {
          c.circulant->sample_one(rng, *slot.ws, slot.first);
          src = &slot.first;
        } else if (slot.pending) {
          src = &slot.second;
          slot.pending = false;
        } else {
          c.circulant->sample_pair(rng, *slot.ws, slot.first, slot.second);
          src = &slot.first;
          slot.pending = true;
        }
        if (c.cumulative) {
          double level = 0.0;
          std::size_t j_out = 0;
          if (c.skip == 0) path[j_out++] = 0.0;
          for (std::size_t k = 0; k < src->size() && j_out < m; ++k) {
            level += (*src)[k];
            if (k + 1 >= c.skip) path[j_out++] = level;
          }
        } else {
          std::copy_n(src->begin(), m, path.begin());
        }
        break;
      }
    }
    if (!c.scale.empty())
      for (std::size_t j = 0; j < m; ++j) path[j] *= c.scale[j];
  }
}

// ---------------------------------------------------------------------------
// Batch samplers
// ---------------------------------------------------------------------------

namespace {

struct NoAcc {
  void merge(const NoAcc&) {}
};

PathBatch draw_batch(const PathGenerator& gen, std::size_t reps, const RngStream& stream) {
  PathBatch batch(gen.grid(), gen.dim(), reps);
  replicate<NoAcc>(
      reps, [&] { return gen.make_scratch(); },
      [&](auto& scratch, std::size_t r, NoAcc&) {
        Rng rng(stream.substream(r));
        gen.draw(rng, *scratch, batch.replication(r));
      });
  return batch;
}

}  // namespace

PathBatch sample_fbm(double kappa, const SampleGrid& grid, std::size_t replications, const RngStream& stream) {
  if (!(kappa > 0.0 && kappa <= 2.0)) throw DomainError("sample_fbm: kappa must lie in (0,2]");
  if (grid.origin != 0.0) throw DomainError("sample_fbm: grid must start at 0");
  VectorProcessSpec spec{{FractionalBrownian{kappa}}, std::max(grid.end(), grid.step)};
  return draw_batch(PathGenerator(spec, grid), replications, stream);
}

PathBatch sample_vector(const VectorProcessSpec& spec, const SampleGrid& grid, std::size_t replications,
                        const RngStream& stream) {
  require_valid(spec);
  return draw_batch(PathGenerator(spec, grid), replications, stream);
}

PathBatch sample_cholesky_oracle(const Eigen::MatrixXd& cov, std::size_t replications, const RngStream& stream) {
  DenseFactorSampler factor(cov);
  PathBatch batch(SampleGrid{0.0, 1.0, factor.size()}, 1, replications);
  replicate<NoAcc>(
      replications, [] { return std::vector<double>{}; },
      [&](std::vector<double>& scratch, std::size_t r, NoAcc&) {
        Rng rng(stream.substream(r));
        factor.sample(rng, batch.replication(r), scratch);
      });
  return batch;
}

// ---------------------------------------------------------------------------
// Raw dump
// ---------------------------------------------------------------------------

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("path dump: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_path_dump(const std::filesystem::path& file, const PathBatch& batch) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("path dump: cannot open " + file.string());
  os.write("GPB1", 4);
  put_u64(os, batch.n_coords());
  put_u64(os, batch.nodes());
  put_u64(os, batch.replications());
  put_f64(os, batch.grid().step);
  put_f64(os, batch.grid().origin);
  for (double v : batch.values()) put_f64(os, v);
  if (!os) throw Error("path dump: write failed for " + file.string());
}

PathBatch read_path_dump(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("path dump: cannot open " + file.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "GPB1", 4) != 0) throw Error("path dump: bad magic");
  const auto n = get_u64(is);
  const auto m = get_u64(is);
  const auto reps = get_u64(is);
  const double step = get_f64(is);
  const double origin = get_f64(is);
  PathBatch batch(SampleGrid{origin, step, m}, n, reps);
  for (std::size_t r = 0; r < reps; ++r) {
    auto rep = batch.replication(r);
    for (double& v : rep) v = get_f64(is);
  }
  return batch;
}

}  // namespace vgauss
