#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "volterra/hilbert.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Operator-valued Volterra kernel K(tau, s), defined for s < tau. `eta`
// declares the singularity order — op_norm(K(tau,s)) should behave like
// C·(tau-s)^{-eta} near the diagonal. Integrators trust the declared eta;
// the seminorm estimators below provide empirical validation, not
// enforcement.
struct VolterraKernel {
  std::function<HOperator(double, double)> eval;  // (tau, s) with s < tau
  double eta = 0.0;
  std::size_t dim = 0;
  std::string label;

  // Stationary kernels depend on the gap tau - s only. Integrators exploit
  // this to cache one operator per distinct gap instead of one per pair.
  bool stationary = false;
  std::function<HOperator(double)> eval_gap;  // set when stationary

  // Checked evaluation. The kernel has no value on the diagonal, so s >= tau
  // is a contract violation rather than infinity: every Riemann sum we form
  // uses left endpoints u < v <= t <= tau, keeping tau - u >= mesh > 0.
  HOperator at(double tau, double s) const;
};

// (tau - s)^{-eta} A.
VolterraKernel fractional_kernel(double eta, const HOperator& a);

// (tau - s)^{alpha-1} E_{alpha,beta}(A (tau-s)^alpha), declared eta = 1 - alpha.
// alpha = 1 is accepted so the kernel degenerates to the matrix exponential.
VolterraKernel ml_kernel(double alpha, double beta, const HOperator& a);

// e^{-a (tau - s)} I, eta = 0.
VolterraKernel exp_kernel(double a, std::size_t dim);

// Constant identity kernel, eta = 0.
VolterraKernel identity_kernel(std::size_t dim);

VolterraKernel kernel_adjoint(const VolterraKernel& k);
VolterraKernel kernel_scale(double c, const VolterraKernel& k);
VolterraKernel kernel_difference(const VolterraKernel& a, const VolterraKernel& b);

struct KernelSeminorms {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  std::vector<double> theta_grid;
  std::vector<double> nu_grid;

  double total() const { return k1 + k2 + k3 + k4; }
};

// Discrete sups of the four kernel ratios over ordered tuples from `grid`.
// Tuples with a zero time gap are skipped (they make the numerator vanish
// or put an evaluation on the diagonal). The ratios are log-linear in the
// exponents, so the sup over a theta/nu grid is attained at the grid
// extremes and is evaluated there exactly.
//
// Cost control: pair and triple sups subsample the grid to at most 129
// points; quadruple sups to at most 33, so that the k4 lattice stays fixed
// once the grid is at least that fine. These are lower-bound estimates by
// construction.
double seminorm_k1(const VolterraKernel& k, const Grid& grid);
double seminorm_k2(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid);
double seminorm_k3(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid);
double seminorm_k4(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid,
                   const std::vector<double>& nu_grid);

// All four, with the default 11-point exponent grids on [0,1].
KernelSeminorms kernel_seminorms(const VolterraKernel& k, const Grid& grid);
KernelSeminorms kernel_seminorms(const VolterraKernel& k, const Grid& grid,
                                 const std::vector<double>& theta_grid,
                                 const std::vector<double>& nu_grid);

}  // namespace volterra
