#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Kernel + driving path + the driver's declared Hölder regularity. The Young
// condition gamma - eta > 0 is checked at construction; everything downstream
// assumes it.
struct IntegrandSpec {
  VolterraKernel kernel;
  GridPath driver;
  double gamma = 0.0;

  IntegrandSpec(VolterraKernel k, GridPath w, double g);
};

// Left-endpoint Riemann sum of K(tau,.) against dW over the level-l dyadic
// partition of [0,t] (partition points are grid points; a trailing partial
// cell appears when t is not a level-l point). The singular endpoint s = tau
// is never sampled: left endpoints stay strictly below t <= tau.
HVector riemann_sum(const IntegrandSpec& spec, double tau, double t,
                    std::size_t level);

// Integral values on the whole discrete simplex plus per-entry refinement
// bookkeeping. An entry is "converged" once two consecutive dyadic
// refinements each move it by less than tol (one small step alone can be a
// fluke of cancellation); otherwise it carries the max_level value and is
// counted in `unconverged` when even the last refinement step exceeded tol.
struct Volterra1DResult {
  VolterraGridPath values;
  std::vector<std::uint8_t> levels;  // triangular, same layout as values
  std::size_t unconverged = 0;

  std::size_t level_at(std::size_t tau_idx, std::size_t t_idx) const {
    return levels[tau_idx * (tau_idx + 1) / 2 + t_idx];
  }
};

Volterra1DResult volterra_integral(const IntegrandSpec& spec,
                                   std::size_t max_level, double tol);

// |I(Xi^tau)(t,s) - Xi^tau(t,s)|_H at one level, next to the sewing weight
// (tau-t)^{-kappa} (t-s)^beta  ∧  (tau-s)^{beta-kappa} for caller-supplied
// exponents. The two-parameter integral increment is formed additively as
// I(t,0) - I(s,0).
struct SewingDefect {
  double defect = 0.0;
  double weight = 0.0;
};

SewingDefect sewing_defect(const IntegrandSpec& spec, double tau, double t,
                           double s, std::size_t level, double beta,
                           double kappa);

// Dyadic-refinement record: probe values per level, successive differences
// (max over probes, in |.|_H), the fitted decay rate of those differences,
// and the theoretical target beta - 1 under this implementation's exponent
// bookkeeping theta* = min(1, 1 + 0.01 - gamma).
struct RefinementReport {
  std::vector<std::size_t> levels;
  std::vector<std::vector<HVector>> values;  // values[k][p]: probe p, level k
  std::vector<double> diffs;                 // between levels k and k+1
  double fitted_rate = 0.0;
  double target_rate = 0.0;
};

RefinementReport convergence_study(
    const IntegrandSpec& spec,
    const std::vector<std::pair<double, double>>& probes,  // (tau, t)
    const std::vector<std::size_t>& levels);

}  // namespace volterra
