#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "volterra/hilbert.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Two-parameter covariance field Q(t,t') with values in L(H). `alpha`
// declares the regularity: one-directional and rectangular increments are
// alpha-Hölder in operator norm. As with kernels, the declared alpha is
// metadata trusted by the integrators; cov_seminorms gives the empirical
// check.
struct CovarianceField {
  std::function<HOperator(double, double)> eval;
  double alpha = 0.5;
  std::size_t dim = 0;
  std::string label;
  // Latest time the field is defined for. Built-ins are global; empirical
  // fields end at their grid horizon.
  double domain_end = std::numeric_limits<double>::infinity();

  HOperator at(double t, double tp) const;
};

// min(t,t') Q0; alpha = 1/2.
CovarianceField wiener_cov(const HOperator& q0);

// R^h(t,t') Q0 with R^h(s,t) = (s^{2h} + t^{2h} - |t-s|^{2h}) / 2.
// alpha = h for h <= 1/2, else 1/2: the overlap bound still certifies 1/2,
// and a conservative declaration keeps integrator admissibility honest.
CovarianceField fbm_cov(double h, const HOperator& q0);

// Qbase(Z(t), Z(t')) for a scalar time-change path Z, linearly interpolated
// between its grid points. Composition scales the Hölder exponent by Z's,
// which is empirical for sampled Z — so the caller supplies it; declared
// alpha = base.alpha * z_exponent.
CovarianceField composed_cov(const CovarianceField& base, const GridPath& z,
                             double z_exponent);

// Raw second-moment estimator (1/N) Σ_k X_k(t) ⊗ X_k(t') over the common
// grid (no mean subtraction), evaluated with grid snapping and symmetrized
// as (Q(t,t') + Q(t',t)*)/2. The full entry table is computed up front.
CovarianceField empirical_cov(const std::vector<GridPath>& samples);

CovarianceField cov_scale(double c, const CovarianceField& q);
CovarianceField cov_difference(const CovarianceField& a, const CovarianceField& b);

// Rectangular increment of the field over [s,t] x [s',t'].
HOperator cov_rect(const CovarianceField& q, double s, double sp, double t,
                   double tp);

struct CovSeminorms {
  double q10 = 0.0;  // sup ||Q(t,u) - Q(s,u)||_op / |t-s|^alpha
  double q01 = 0.0;  // sup ||Q(u,t) - Q(u,s)||_op / |t-s|^alpha
  double q11 = 0.0;  // sup ||box Q||_op / (|t-s| |t'-s'|)^alpha

  double total() const { return q10 + q01 + q11; }
};

// Candidate numerator norms with their gap geometry, alpha-independent.
// Splitting the (expensive) evaluation pass from the (cheap) weighting lets
// exponent scans reuse one pass across many alphas.
struct CovSupSamples {
  struct OneSlot {
    double norm;  // ||Q(t,u) - Q(s,u)|| resp. ||Q(u,t) - Q(u,s)||
    double gap;   // t - s
  };
  struct TwoSlot {
    double norm;  // ||box Q over [s,t] x [s',t']||
    double gap1;  // t - s
    double gap2;  // t' - s'
  };
  std::vector<OneSlot> q10, q01;
  std::vector<TwoSlot> q11;
};

// Evaluates the candidate set: every adjacent grid cell, all pairs from a
// coarse sub-lattice, and zero-anchored intervals [0,t]. Zero-anchored
// candidates make the boundary-zero reduction q10 <= q11 * T^alpha hold
// structurally for fields vanishing on the axes.
CovSupSamples cov_sup_samples(const CovarianceField& q, const Grid& grid);

CovSeminorms cov_seminorms_from(const CovSupSamples& samples, double alpha);

// Discrete sups of the three ratios over the candidate set.
CovSeminorms cov_seminorms(const CovarianceField& q, double alpha,
                           const Grid& grid);

}  // namespace volterra
