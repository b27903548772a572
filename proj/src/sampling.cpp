#include "volterra/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "volterra/rng.hpp"
#include "volterra/stats.hpp"

namespace volterra {

namespace {

struct EigenBasis {
  std::vector<double> sqrt_lambda;
  HOperator vectors;
};

// Eigen-decompose a covariance operator, clamping the tiny negative
// eigenvalues a PSD matrix picks up numerically and rejecting real ones.
EigenBasis psd_basis(const HOperator& q0, const char* who) {
  const SymEigen eig = sym_eigen(q0);
  double max_abs = 0.0;
  for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
  EigenBasis out;
  out.vectors = eig.vectors;
  out.sqrt_lambda.reserve(eig.values.size());
  for (double v : eig.values) {
    if (v < -1e-10 * (1.0 + max_abs))
      throw std::invalid_argument(std::string(who) +
                                  ": Q0 has a negative eigenvalue");
    out.sqrt_lambda.push_back(std::sqrt(v > 0.0 ? v : 0.0));
  }
  return out;
}

// Plain lower Cholesky; returns false on a non-positive pivot.
bool cholesky_lower(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
  }
  return true;
}

double fbm_r(double h, double s, double t) {
  const double e = 2.0 * h;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

}  // namespace

GridPath sample_qwiener(const SamplerConfig& cfg) {
  if (cfg.kind != SamplerKind::wiener)
    throw std::invalid_argument("sample_qwiener: config kind is not wiener");
  const EigenBasis basis = psd_basis(cfg.q0, "sample_qwiener");
  const std::size_t dim = cfg.q0.dim();
  const std::size_t pts = cfg.grid.points();
  const double sdt = std::sqrt(cfg.grid.step());

  GaussianStream rng(cfg.seed, cfg.sample_index);
  GridPath path(cfg.grid, dim);
  HVector y(dim);  // running value in the eigenbasis
  path.set_value(0, HVector(dim));
  for (std::size_t j = 1; j < pts; ++j) {
    for (std::size_t i = 0; i < dim; ++i)
      y[i] += basis.sqrt_lambda[i] * sdt * rng.next_normal();
    path.set_value(j, basis.vectors.apply(y));
  }
  return path;
}

FbmSampler::FbmSampler(const Grid& grid, double h, const HOperator& q0)
    : grid_(grid), h_(h), dim_(q0.dim()) {
  if (!(h > 0.0) || !(h < 1.0))
    throw std::invalid_argument("FbmSampler: h must lie in (0,1)");
  const EigenBasis basis = psd_basis(q0, "FbmSampler");
  sqrt_lambda_ = basis.sqrt_lambda;
  basis_ = basis.vectors;

  // Gram matrix of the scalar fBm at t_1..t_N (t_0 carries the zero start).
  const std::size_t n = grid.intervals();
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gram[i * n + j] = fbm_r(h, grid.time(i + 1), grid.time(j + 1));

  std::vector<double> attempt = gram;
  if (!cholesky_lower(attempt, n)) {
    // R^h Gram matrices for h near 1 are badly conditioned; one shot of
    // diagonal jitter is allowed before giving up.
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_diag = std::max(max_diag, gram[i * n + i]);
    const double jitter = 1e-12 * max_diag;
    attempt = gram;
    for (std::size_t i = 0; i < n; ++i) attempt[i * n + i] += jitter;
    if (!cholesky_lower(attempt, n))
      throw std::runtime_error(
          "FbmSampler: Gram matrix is numerically non-PSD even after adding "
          "diagonal jitter of 1e-12 * max diagonal; a larger jitter or a "
          "coarser grid is needed");
  }
  chol_ = std::move(attempt);
}

GridPath FbmSampler::sample(std::uint64_t seed, std::uint64_t sample_index) const {
  const std::size_t n = grid_.intervals();
  const std::size_t pts = grid_.points();
  GaussianStream rng(seed, sample_index);

  // Coordinate-major draws: coordinate i is an independent scalar fBm built
  // from N consecutive normals, scaled by sqrt(lambda_i) in the eigenbasis.
  std::vector<double> y(pts * dim_, 0.0);  // eigen-coordinates per point
  std::vector<double> z(n);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < n; ++k) z[k] = rng.next_normal();
    for (std::size_t j = 0; j < n; ++j) {
      double b = 0.0;
      for (std::size_t k = 0; k <= j; ++k) b += chol_[j * n + k] * z[k];
      y[(j + 1) * dim_ + i] = sqrt_lambda_[i] * b;
    }
  }

  GridPath path(grid_, dim_);
  HVector yj(dim_);
  path.set_value(0, HVector(dim_));
  for (std::size_t j = 1; j < pts; ++j) {
    for (std::size_t i = 0; i < dim_; ++i) yj[i] = y[j * dim_ + i];
    path.set_value(j, basis_.apply(yj));
  }
  return path;
}

GridPath sample_qfbm(const SamplerConfig& cfg) {
  if (cfg.kind != SamplerKind::fbm)
    throw std::invalid_argument("sample_qfbm: config kind is not fbm");
  return FbmSampler(cfg.grid, cfg.h, cfg.q0).sample(cfg.seed, cfg.sample_index);
}

GridPath shift_compose(const GridPath& b, const GridPath& z, bool take_abs) {
  if (z.dim() != 1)
    throw std::invalid_argument("shift_compose: Z must be a scalar path");
  GridPath out(z.grid(), b.dim());
  for (std::size_t i = 0; i < z.grid().points(); ++i) {
    double w = z.coord(i, 0);
    if (take_abs) w = std::abs(w);
    out.set_value(i, b.interpolate(w));  // throws if w escapes B's domain
  }
  return out;
}

double empirical_holder_exponent(const GridPath& p) {
  const std::size_t n = p.grid().intervals();
  if (n < 16)
    throw std::invalid_argument(
        "empirical_holder_exponent: grid too coarse (need at least 16 "
        "intervals for three dyadic lags)");
  // Keep the lag window narrow: the sup over ~n/m increments carries a
  // sqrt(2 log(n/m)) extreme-value factor whose drift across the window
  // biases the fitted slope downward. Stopping at n/64 keeps that drift
  // inside a few percent while still leaving >= 3 dyadic lags for n >= 16.
  const std::size_t m_max = std::max<std::size_t>(n / 64, 4);
  std::vector<double> log_lag, log_sup;
  for (std::size_t m = 1; m <= m_max; m *= 2) {
    double sup2 = 0.0;
    for (std::size_t i = 0; i + m <= n; ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < p.dim(); ++c) {
        const double d = p.coord(i + m, c) - p.coord(i, c);
        d2 += d * d;
      }
      if (d2 > sup2) sup2 = d2;
    }
    if (sup2 > 0.0) {
      log_lag.push_back(std::log(static_cast<double>(m) * p.grid().step()));
      log_sup.push_back(0.5 * std::log(sup2));
    }
  }
  if (log_lag.size() < 3)
    throw std::invalid_argument(
        "empirical_holder_exponent: path is constant (or nearly) — no "
        "increments to fit");
  return lsq_slope(log_lag, log_sup);
}

}  // namespace volterra
