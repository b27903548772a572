#pragma once

#include "volterra/hilbert.hpp"

namespace volterra {

// Euler gamma function and Beta(a,b) for positive arguments.
double gamma_fn(double x);
double beta_fn(double a, double b);

// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) = sum_k x^k / Gamma(alpha k + beta),
// evaluated by direct series summation.  Requires alpha > 0 and beta > 0.  The series is
// entire, but for large |x| cancellation makes doubles useless; the sum stops once the term
// drops below 1e-16 of the running sum and throws if 500 terms do not get there.
double mittag_leffler(double alpha, double beta, double x);

// Operator version E_{alpha,beta}(M) = sum_k M^k / Gamma(alpha k + beta), same stopping rule
// with the operator norm of the term against the norm of the partial sum.
HOperator mittag_leffler(double alpha, double beta, const HOperator& m);

}  // namespace volterra
