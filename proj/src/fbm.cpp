#include "cusploc/fbm.hpp"

#include <cmath>

#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"

namespace cusploc {

FbmGrid FbmGrid::symmetric(double half_width, std::size_t size) {
  if (!(half_width > 0) || size < 3 || size % 2 == 0)
    throw DomainError("symmetric grid needs half_width > 0 and an odd size >= 3");
  const long half = static_cast<long>(size / 2);
  return uniform(half_width / static_cast<double>(half), -half, half);
}

FbmGrid FbmGrid::uniform(double step, long first, long last) {
  if (!(step > 0) || first > 0 || last < 0 || first == last) throw DomainError("grid must contain 0 and two points");
  FbmGrid g;
  g.step = step;
  g.points.reserve(static_cast<std::size_t>(last - first + 1));
  for (long k = first; k <= last; ++k) g.points.push_back(static_cast<double>(k) * step);
  g.zero_index = static_cast<std::size_t>(-first);
  return g;
}

double FbmGrid::extent() const { return std::max(std::abs(min()), std::abs(max())); }

double fbm_covariance(Hurst H, double u1, double u2) {
  const double e = 2.0 * H.value();
  return 0.5 * (std::pow(std::abs(u1), e) + std::pow(std::abs(u2), e) - std::pow(std::abs(u1 - u2), e));
}

namespace {

Eigen::MatrixXd insert_zero_row(const Eigen::MatrixXd& w, std::size_t zero) {
  Eigen::MatrixXd out(w.rows() + 1, w.cols());
  const auto z = static_cast<Eigen::Index>(zero);
  out.topRows(z) = w.topRows(z);
  out.row(z).setZero();
  out.bottomRows(w.rows() - z) = w.bottomRows(w.rows() - z);
  return out;
}

FbmPath column_path(const FbmGrid& grid, const Eigen::MatrixXd& m) {
  FbmPath p{grid, std::vector<double>(m.rows())};
  for (Eigen::Index i = 0; i < m.rows(); ++i) p.values[static_cast<std::size_t>(i)] = m(i, 0);
  return p;
}

}  // namespace

ExactFbmSampler::ExactFbmSampler(Hurst H, FbmGrid grid) : H_(H), grid_(std::move(grid)) {
  const std::size_t n = grid_.size() - 1;
  std::vector<double> u;
  u.reserve(n);
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (i != grid_.zero_index) u.push_back(grid_.points[i]);
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = fbm_covariance(H_, u[i], u[j]);
  cov.diagonal().array() += 1e-12 * cov.trace() / static_cast<double>(n);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    throw FactorizationError("fBm covariance is not positive definite (min eigenvalue " + std::to_string(lo) + ")",
                             lo);
  }
  lower_ = llt.matrixL();
}

Eigen::MatrixXd ExactFbmSampler::sample_batch(const StreamSeed& seed, std::size_t first, std::size_t count,
                                              Purpose purpose) const {
  const auto n = lower_.rows();
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    Philox4x32 rng(StreamSeed{seed.master, seed.g, static_cast<std::uint32_t>(seed.r + first + j)}, purpose);
    rng.fill_normal({z.col(static_cast<Eigen::Index>(j)).data(), static_cast<std::size_t>(n)});
  }
  const Eigen::MatrixXd w = lower_.triangularView<Eigen::Lower>() * z;
  return insert_zero_row(w, grid_.zero_index);
}

FbmPath ExactFbmSampler::sample(const StreamSeed& seed) const { return column_path(grid_, sample_batch(seed, 0, 1)); }

double default_ma_truncation(const FbmGrid& grid) { return 50.0 * grid.extent(); }
double default_ma_inner_step(const FbmGrid& grid) { return grid.step / 64.0; }

MovingAverageFbmSampler::MovingAverageFbmSampler(Hurst H, FbmGrid grid, double truncation, double inner_step)
    : grid_(std::move(grid)) {
  if (!(inner_step > 0)) throw DomainError("inner step must be positive");
  if (!(truncation > grid_.extent())) throw DomainError("moving-average truncation must exceed the grid extent");
  const double kappa = H.value() - 0.5;
  const double gs = gamma_star(CuspExponent(kappa));
  const auto cells = static_cast<Eigen::Index>(std::llround(2.0 * truncation / inner_step));
  const auto rows = static_cast<Eigen::Index>(grid_.size() - 1);
  if (static_cast<double>(cells) * static_cast<double>(rows) > 2.5e8)
    throw DomainError("moving-average kernel too large; reduce truncation or increase inner step");
  const double cell = 2.0 * truncation / static_cast<double>(cells);
  sqrt_cell_ = std::sqrt(cell);
  kernel_.resize(rows, cells);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (i == grid_.zero_index) continue;
    const double u = grid_.points[i];
    for (Eigen::Index m = 0; m < cells; ++m) {
      const double v = -truncation + (static_cast<double>(m) + 0.5) * cell;
      kernel_(r, m) = (cusp_term(1.0, kappa, v - u) - cusp_term(1.0, kappa, v)) / gs;
    }
    ++r;
  }
}

Eigen::MatrixXd MovingAverageFbmSampler::sample_batch(const StreamSeed& seed, std::size_t first,
                                                      std::size_t count) const {
  constexpr std::size_t kChunk = 64;
  const auto c = kernel_.cols();
  Eigen::MatrixXd w(kernel_.rows(), static_cast<Eigen::Index>(count));
  Eigen::MatrixXd z(c, static_cast<Eigen::Index>(std::min(count, kChunk)));
  for (std::size_t j0 = 0; j0 < count; j0 += kChunk) {
    const std::size_t n = std::min(kChunk, count - j0);
    for (std::size_t j = 0; j < n; ++j) {
      Philox4x32 rng(StreamSeed{seed.master, seed.g, static_cast<std::uint32_t>(seed.r + first + j0 + j)},
                     Purpose::FbmMovingAverage);
      rng.fill_normal({z.col(static_cast<Eigen::Index>(j)).data(), static_cast<std::size_t>(c)});
    }
    const auto cols = static_cast<Eigen::Index>(n);
    w.middleCols(static_cast<Eigen::Index>(j0), cols).noalias() = sqrt_cell_ * (kernel_ * z.leftCols(cols));
  }
  return insert_zero_row(w, grid_.zero_index);
}

FbmPath MovingAverageFbmSampler::sample(const StreamSeed& seed) const {
  return column_path(grid_, sample_batch(seed, 0, 1));
}

FbmPath fbm_sample_exact(Hurst H, const FbmGrid& grid, const StreamSeed& seed) {
  return ExactFbmSampler(H, grid).sample(seed);
}

FbmPath fbm_sample_ma(Hurst H, const FbmGrid& grid, const StreamSeed& seed, double truncation, double inner_step) {
  return MovingAverageFbmSampler(H, grid, truncation, inner_step).sample(seed);
}

}  // namespace cusploc
