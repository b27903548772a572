#pragma once

#include <cstddef>

#include "volterra/covariance.hpp"
#include "volterra/hilbert.hpp"
#include "volterra/integrate1d.hpp"
#include "volterra/integrate2d.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"
#include "volterra/special.hpp"

namespace volterra {

// Fractional integral I^alpha(f)(t) = (1/Gamma(alpha)) ∫₀ᵗ (t-s)^{alpha-1} f(s) ds
// by the product-rectangle rule: f is frozen per grid step and the singular
// weight is integrated exactly over the step, so constants integrate exactly
// at every resolution.
GridPath frac_integral(const GridPath& f, double alpha);

// The fractional OU problem in integrated form Y = y0 + A I^alpha(Y) + X.
// alpha = 1 is accepted: the Mittag-Leffler kernel degenerates to the matrix
// exponential and the classical OU equation comes back. The admissibility
// gamma + alpha > 1 doubles as the Young condition for the convolution
// kernel, whose singularity order is 1 - alpha.
struct FracOUSpec {
  double alpha = 0.5;
  HOperator a;
  HVector y0;
  GridPath driver;
  double gamma = 0.0;  // declared driver regularity

  FracOUSpec(double alpha_, HOperator a_, HVector y0_, GridPath w, double g);
};

// Y(t) = E_{alpha,1}(A t^alpha) y0
//        + ∫₀ᵗ (t-s)^{alpha-1} E_{alpha,alpha}(A (t-s)^alpha) dW(s),
// the mean path and the stochastic convolution computed separately and
// summed. `unconverged`, when given, receives the count of simplex entries
// whose dyadic refinement was still moving at max_level.
GridPath solve_frac_ou(const FracOUSpec& spec, double tol,
                       std::size_t max_level,
                       std::size_t* unconverged = nullptr);

// Q_Y(t,t') = ∫∫ k d²Q_W k^* with k the Mittag-Leffler kernel in both slots
// (the adjoint slot realizes the E_{alpha,alpha}(A^* ...) factor), assembled
// on the driver's grid at its full depth. y0 shifts only the mean, so it
// does not enter. Returns the full integral result; the field is in .field.
CovIntegralResult frac_ou_covariance(const FracOUSpec& spec,
                                     const CovarianceField& qw, double tol);

// Both sides of the stochastic Fubini identity
//   ∫₀ᵗ G(t,s) Z(s) ds = ∫₀ᵗ [ ∫ₛᵗ G(t,r) K(r,s) dr ] dW(s),
// with Z(s) = ∫₀ˢ K(s,r) dW(r). Z is the full-depth left sum on the
// driver's grid; the outer quadrature and the composite inner kernel are
// discretized at the requested dyadic level, so the gap measures a real
// discretization disagreement that shrinks under refinement and collapses
// to rounding once the level reaches the grid's own resolution. The inner
// r-integral uses interior lattice nodes only, dodging both the K
// singularity at r = s and the G singularity at r = t.
struct FubiniCheck {
  HVector lhs;
  HVector rhs;
  double gap = 0.0;
};

FubiniCheck fubini_check(const VolterraKernel& g, const VolterraKernel& k,
                         const GridPath& w, double t, std::size_t level);

// Rough-volatility block Sigma(t) = Y(t) ⊗ z with constant unit direction z.
// `scale` caches |sqrt(QB) z|^2, which every moment formula multiplies by.
struct RoughVolSpec {
  HVector l;     // Riesz representer of the output functional
  HVector z;     // |z|_H = 1
  HOperator qb;  // covariance of the volatility noise, PSD
  double scale = 0.0;

  RoughVolSpec(HVector l_, HVector z_, HOperator qb_);
};

// sigma^2(t) = <L, Y(t)>^2 |sqrt(QB) z|^2.
double instantaneous_variance(const RoughVolSpec& spec, const HVector& y_t);

// E[sigma^{2k}(t)] = c^k (2k-1)!! <QY(t,t) L, L>^k for Gaussian Y(t),
// c = |sqrt(QB) z|^2.
double variance_moment(const RoughVolSpec& spec, const HOperator& qy_tt,
                       std::size_t k);

}  // namespace volterra
