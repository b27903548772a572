#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace volterra {

// Element of the n-dimensional truncation of a separable Hilbert space,
// held as coordinates in a fixed orthonormal basis.
class HVector {
 public:
  HVector() = default;
  explicit HVector(std::size_t dim, double fill = 0.0) : c_(dim, fill) {}
  static HVector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return c_.size(); }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  const std::vector<double>& coords() const { return c_; }

  HVector& operator+=(const HVector& o);
  HVector& operator-=(const HVector& o);
  HVector& operator*=(double a);

 private:
  std::vector<double> c_;
};

HVector operator+(HVector a, const HVector& b);
HVector operator-(HVector a, const HVector& b);
HVector operator*(double a, HVector v);
double inner(const HVector& a, const HVector& b);
double norm(const HVector& a);

// Bounded linear operator on the truncation; dense row-major storage.
class HOperator {
 public:
  HOperator() = default;
  explicit HOperator(std::size_t dim) : n_(dim), a_(dim * dim, 0.0) {}
  HOperator(std::size_t dim, std::vector<double> entries);
  static HOperator identity(std::size_t dim);
  static HOperator diagonal(const std::vector<double>& d);

  std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const { return a_; }

  HVector apply(const HVector& v) const;
  HOperator adjoint() const;
  double trace() const;
  double max_abs() const;

  HOperator& operator+=(const HOperator& o);
  HOperator& operator-=(const HOperator& o);
  HOperator& operator*=(double a);

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

HOperator operator+(HOperator a, const HOperator& b);
HOperator operator-(HOperator a, const HOperator& b);
HOperator operator*(double a, HOperator m);
HOperator operator*(const HOperator& a, const HOperator& b);  // composition

// Rank-one operator with apply(tensor(g,h), x) = <g,x> h.
HOperator tensor(const HVector& g, const HVector& h);

// Operator norm via power iteration on M*M (no decomposition involved).
// Relative tolerance 1e-10; throws std::runtime_error if the iteration fails
// to settle rather than returning a stale iterate.
double op_norm(const HOperator& m);

// Symmetric eigendecomposition (cyclic Jacobi). values[i] belongs to column i
// of vectors. Throws std::invalid_argument when the symmetry defect exceeds tol.
struct SymEigen {
  std::vector<double> values;
  HOperator vectors;
};
SymEigen sym_eigen(const HOperator& m, double sym_tol = 1e-10);

// PSD square root: eigendecompose, clamp negative eigenvalues to zero,
// reassemble. Asymmetry beyond 1e-10 (absolute) is an error.
HOperator sqrt_psd(const HOperator& m);

}  // namespace volterra
