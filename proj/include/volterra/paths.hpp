#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "volterra/hilbert.hpp"

namespace volterra {

// Uniform time grid 0 = t_0 < ... < t_N = T with N a power of two, so dyadic
// coarsenings of the grid are again grids.
class Grid {
 public:
  Grid(double horizon, std::size_t n_intervals);

  double horizon() const { return horizon_; }
  std::size_t intervals() const { return n_; }
  std::size_t points() const { return n_ + 1; }
  double step() const { return horizon_ / static_cast<double>(n_); }
  double time(std::size_t i) const;
  int level() const { return level_; }  // log2(intervals)

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && horizon_ == o.horizon_;
  }

 private:
  double horizon_;
  std::size_t n_;
  int level_;
};

// H-valued path sampled on a grid; contiguous (point-major) storage.
class GridPath {
 public:
  GridPath() = default;
  GridPath(Grid g, std::size_t dim);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  double coord(std::size_t i, std::size_t c) const { return v_[i * dim_ + c]; }
  double& coord(std::size_t i, std::size_t c) { return v_[i * dim_ + c]; }
  HVector value(std::size_t i) const;
  void set_value(std::size_t i, const HVector& x);

  // Linear interpolation between grid points; t must lie in [0, horizon].
  HVector interpolate(double t) const;

 private:
  Grid grid_{1.0, 1};
  std::size_t dim_ = 0;
  std::vector<double> v_;
};

// Two-parameter field f^tau(t) on the discrete simplex {t <= tau}, stored flat
// row-by-row (row tau holds entries t = 0..tau).
class VolterraGridPath {
 public:
  VolterraGridPath() = default;
  VolterraGridPath(Grid g, std::size_t dim);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  double coord(std::size_t tau, std::size_t t, std::size_t c) const {
    return v_[(offset(tau) + t) * dim_ + c];
  }
  double& coord(std::size_t tau, std::size_t t, std::size_t c) {
    return v_[(offset(tau) + t) * dim_ + c];
  }
  HVector value(std::size_t tau, std::size_t t) const;
  void set_value(std::size_t tau, std::size_t t, const HVector& x);

 private:
  static std::size_t offset(std::size_t tau) { return tau * (tau + 1) / 2; }
  Grid grid_{1.0, 1};
  std::size_t dim_ = 0;
  std::vector<double> v_;
};

// Rectangular increment of a two-parameter field over [s1,t1] x [s2,t2]:
// f(t1,t2) - f(t1,s2) - f(s1,t2) + f(s1,s2).
template <class F>
auto rect_increment(F&& f, double s1, double s2, double t1, double t2) {
  return f(t1, t2) - f(t1, s2) - f(s1, t2) + f(s1, s2);
}

// Classical Hölder seminorm sup |p(t)-p(s)| / (t-s)^gamma over grid pairs.
double holder_seminorm(const GridPath& p, double gamma);

// Volterra-Hölder seminorm in the time slot: sup over tau >= t > s of
// |f^tau(t)-f^tau(s)| / w with w = (tau-t)^{-eta}(t-s)^gamma  ∧  (tau-s)^{gamma-eta}.
// On the diagonal tau = t the first branch is +inf and the second applies.
double volterra_seminorm_1(const VolterraGridPath& f, double gamma, double eta,
                           std::size_t max_points = 129);

// Joint seminorm over quadruples tau' >= tau >= t >= s and exponent boxes
// theta in [0,1], zeta in [0, gamma-eta). The supplied grids pin the box; the
// ratio is log-linear in (theta, zeta) inside each branch of the weight, so the
// grid sup is attained at box corners (evaluated exactly).
double volterra_seminorm_12(const VolterraGridPath& f, double gamma, double eta,
                            const std::vector<double>& theta_grid,
                            const std::vector<double>& zeta_grid,
                            std::size_t max_points = 129);
double volterra_seminorm_12(const VolterraGridPath& f, double gamma, double eta,
                            std::size_t max_points = 129);

GridPath diagonal_restriction(const VolterraGridPath& f);

// Uniformly spaced values lo..hi inclusive (n >= 2).
std::vector<double> uniform_grid(double lo, double hi, int n);

// Index stride that caps an (N+1)-point grid enumeration at max_points.
std::size_t subsample_stride(std::size_t points, std::size_t max_points);

}  // namespace volterra
