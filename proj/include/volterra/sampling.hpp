#pragma once

#include <cstdint>
#include <vector>

#include "volterra/hilbert.hpp"
#include "volterra/paths.hpp"

namespace volterra {

enum class SamplerKind { wiener, fbm, composed };

// Everything a sampler needs to be a pure function: identical configs give
// bitwise-identical paths. Monte-Carlo batches vary only sample_index, so
// every sample draws from its own RNG stream and batches parallelize with
// no shared state.
struct SamplerConfig {
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
  Grid grid{1.0, 1};
  HOperator q0;
  SamplerKind kind = SamplerKind::wiener;
  double h = 0.5;  // Hurst index, fbm only
};

// Q-Wiener path: coordinates in Q0's eigenbasis receive independent
// sqrt(lambda_i * dt) N(0,1) increments, rotated back to the working basis.
// Starts at zero.
GridPath sample_qwiener(const SamplerConfig& cfg);

// Q-fBm path via Cholesky of the R^h Gram matrix (see FbmSampler). One-shot
// convenience; batches should reuse an FbmSampler.
GridPath sample_qfbm(const SamplerConfig& cfg);

// Caches the eigendecomposition of Q0 and the Cholesky factor of the
// R^h Gram matrix on the grid times (t_0 dropped; paths start at zero), so
// repeated sampling costs O(N^2 dim) per path instead of O(N^3).
class FbmSampler {
 public:
  FbmSampler(const Grid& grid, double h, const HOperator& q0);

  GridPath sample(std::uint64_t seed, std::uint64_t sample_index) const;

 private:
  Grid grid_;
  double h_;
  std::size_t dim_;
  std::vector<double> sqrt_lambda_;
  HOperator basis_;           // eigenvectors of Q0, column i per lambda_i
  std::vector<double> chol_;  // lower Cholesky factor, N x N row-major
};

// t -> B(Z(t)) on Z's grid, with linear interpolation of B between its grid
// points; with take_abs the iterated-process form B(|Z(t)|). Z must be
// scalar and map into B's time domain.
GridPath shift_compose(const GridPath& b, const GridPath& z, bool take_abs);

// Least-squares slope of log sup-increment against log lag over dyadic
// lags (up to a quarter of the grid). An estimate of the path's Hölder
// regularity, not a proof. Constant paths are an error.
double empirical_holder_exponent(const GridPath& p);

}  // namespace volterra
