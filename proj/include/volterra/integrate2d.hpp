#pragma once

#include <cstdint>
#include <vector>

#include "volterra/covariance.hpp"
#include "volterra/integrate1d.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Two kernels and a covariance field for the operator-valued double integral
// I(K,Q)(t,t') = ∫₀ᵗ∫₀ᵗ' K(τ,u) d²Q(u,u') K'(τ',u')^*. The Young-type
// admissibility alpha - max(eta, eta') > 0 is enforced at construction.
struct Cov2DSpec {
  VolterraKernel kernel;        // K
  VolterraKernel kernel_prime;  // K'
  CovarianceField cov;          // Q
  double alpha = 0.5;           // declared regularity of Q

  Cov2DSpec(VolterraKernel k, VolterraKernel kp, CovarianceField q, double a);
  // K' = K, alpha taken from the field's declaration.
  Cov2DSpec(VolterraKernel k, CovarianceField q);
};

// One nested left-endpoint Riemann sum over the level-(l1,l2) uniform
// partitions of [0,t] x [0,t']: Σ Σ K(tau,u) · boxQ((u,u'),(v,v')) · K'(tau',u')^*.
// Each term is multiplied left to right, (K · boxQ) · K'^*.
HOperator double_sum(const Cov2DSpec& spec, double tau, double tau_p, double t,
                     double t_p, std::size_t level_1, std::size_t level_2);

// Output of the field assembly. `field` pins tau = t, tau' = t' (the
// covariance use-case) and evaluates by nearest-grid-point snap into the
// computed table; it vanishes on the axes exactly. The report follows the
// diagonal (l,l) refinement schedule; per-pair values freeze once two
// consecutive refinements each move them by less than tol (same guard as the
// 1D integrator), and `unconverged` counts pairs whose final refinement step
// still exceeded tol. boundary1/boundary2 hold op-norms of the two boundary
// integrals at a fixed probe tuple (tau = tau' = T, [s,t] = [s',t'] =
// [T/4, 3T/4]) for every level in the schedule.
struct CovIntegralResult {
  CovarianceField field;
  RefinementReport report;
  std::vector<double> boundary1;
  std::vector<double> boundary2;
  std::size_t unconverged = 0;
};

CovIntegralResult cov_integral(const Cov2DSpec& spec, const Grid& grid,
                               std::size_t max_level, double tol);

// Level-l left-endpoint sum of the first boundary integral
// ∫ₛᵗ K(tau,r) [dQ(r,t') - dQ(r,s')] K'(tau',s')^* and its mirror in the
// primed slot. Degenerate rectangles return the zero operator outright.
HOperator boundary_integral_1(const Cov2DSpec& spec, double tau, double tau_p,
                              double s, double s_p, double t, double t_p,
                              std::size_t level);
HOperator boundary_integral_2(const Cov2DSpec& spec, double tau, double tau_p,
                              double s, double s_p, double t, double t_p,
                              std::size_t level);

// Stability comparison of two admissible spec pairs: `gap` is the
// Q_zeta-seminorm sum of the difference of the two output fields (both
// computed at the grid's finest level, so the comparison is exactly linear
// in Q), `input_dist` is ||K - K~|| + ||Q - Q~|| by the seminorm estimators.
// zeta = 0 is allowed and degenerates to unweighted sups.
struct StabilityGap {
  double gap = 0.0;
  double input_dist = 0.0;
};

StabilityGap stability_gap(const Cov2DSpec& spec_a, const Cov2DSpec& spec_b,
                           double zeta, const Grid& grid);

// Rough-path admissibility gate: scan gamma over {0.50, 0.51, ..., 0.99} and
// call gamma stable when each of the three seminorm components grows by at
// most 1% (plus 1e-12 absolute slack) from the gate grid to its doubling.
// certified_exponent is the largest stable gamma (0 if none); admissible
// requires it to exceed 1/2 strictly, so the Wiener field — stable exactly
// at the 0.50 boundary — is rejected. The per-gamma rows are exposed for
// diagnostics. Table-backed fields snap to their own lattice, so gate on a
// grid at most half as fine as the table's or the doubled grid sees no
// new increments.
struct RoughScanRow {
  double gamma = 0.0;
  CovSeminorms coarse;
  CovSeminorms fine;
  bool stable = false;
};

struct RoughGate {
  bool admissible = false;
  double certified_exponent = 0.0;
  std::vector<RoughScanRow> scan;
};

RoughGate rough_admissible(const CovarianceField& q, const Grid& grid);

}  // namespace volterra
