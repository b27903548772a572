#include "volterra/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volterra/rng.hpp"

namespace volterra {

namespace {

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

HVector HVector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw std::invalid_argument("HVector::basis: index out of range");
  HVector v(dim);
  v[k] = 1.0;
  return v;
}

HVector& HVector::operator+=(const HVector& o) {
  check_same_dim(dim(), o.dim(), "HVector::operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

HVector& HVector::operator-=(const HVector& o) {
  check_same_dim(dim(), o.dim(), "HVector::operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

HVector& HVector::operator*=(double a) {
  for (double& x : c_) x *= a;
  return *this;
}

HVector operator+(HVector a, const HVector& b) { return a += b; }
HVector operator-(HVector a, const HVector& b) { return a -= b; }
HVector operator*(double a, HVector v) { return v *= a; }

double inner(const HVector& a, const HVector& b) {
  check_same_dim(a.dim(), b.dim(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const HVector& a) { return std::sqrt(inner(a, a)); }

HOperator::HOperator(std::size_t dim, std::vector<double> entries)
    : n_(dim), a_(std::move(entries)) {
  if (a_.size() != n_ * n_) {
    throw std::invalid_argument("HOperator: entry count " + std::to_string(a_.size()) +
                                " does not match dim " + std::to_string(n_));
  }
}

HOperator HOperator::identity(std::size_t dim) {
  HOperator m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

HOperator HOperator::diagonal(const std::vector<double>& d) {
  HOperator m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

HVector HOperator::apply(const HVector& v) const {
  check_same_dim(n_, v.dim(), "HOperator::apply");
  HVector out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    const double* row = a_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

HOperator HOperator::adjoint() const {
  HOperator out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double HOperator::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

double HOperator::max_abs() const {
  double m = 0.0;
  for (double x : a_) m = std::max(m, std::abs(x));
  return m;
}

HOperator& HOperator::operator+=(const HOperator& o) {
  check_same_dim(n_, o.n_, "HOperator::operator+=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

HOperator& HOperator::operator-=(const HOperator& o) {
  check_same_dim(n_, o.n_, "HOperator::operator-=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

HOperator& HOperator::operator*=(double a) {
  for (double& x : a_) x *= a;
  return *this;
}

HOperator operator+(HOperator a, const HOperator& b) { return a += b; }
HOperator operator-(HOperator a, const HOperator& b) { return a -= b; }
HOperator operator*(double a, HOperator m) { return m *= a; }

HOperator operator*(const HOperator& a, const HOperator& b) {
  check_same_dim(a.dim(), b.dim(), "HOperator::operator*");
  const std::size_t n = a.dim();
  HOperator out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

HOperator tensor(const HVector& g, const HVector& h) {
  check_same_dim(g.dim(), h.dim(), "tensor");
  const std::size_t n = g.dim();
  HOperator m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = h[i] * g[j];
  return m;
}

double op_norm(const HOperator& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw std::invalid_argument("op_norm: empty operator");

  // Deterministic start vector with no special alignment.
  GaussianStream gen(0xC0FFEEu, 7u);
  std::vector<double> v(n);
  double vn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 1.0 + 0.125 * gen.next_normal();
    vn += v[i] * v[i];
  }
  vn = std::sqrt(vn);
  for (double& x : v) x /= vn;

  std::vector<double> mv(n), w(n);
  double prev = -1.0;
  const double rel_tol = 1e-13;
  const int max_iter = 200000;
  for (int it = 0; it < max_iter; ++it) {
    // w = M^T (M v); Rayleigh quotient of M^T M at unit v is |Mv|^2.
    double mv2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m(i, j) * v[j];
      mv[i] = s;
      mv2 += s * s;
    }
    const double sigma = std::sqrt(mv2);
    if (sigma == 0.0) return 0.0;
    if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) return sigma;
    prev = sigma;

    double wn2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += m(i, j) * mv[i];
      w[j] = s;
      wn2 += s * s;
    }
    if (wn2 == 0.0) return sigma;  // v in the kernel of M^T M after one step
    const double wn = std::sqrt(wn2);
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / wn;

    if (it == max_iter - 1 && std::abs(sigma - prev) > 1e-10 * std::max(sigma, 1e-300)) {
      throw std::runtime_error("op_norm: power iteration did not converge");
    }
  }
  return prev;
}

SymEigen sym_eigen(const HOperator& m, double sym_tol) {
  const std::size_t n = m.dim();
  if (n == 0) throw std::invalid_argument("sym_eigen: empty operator");
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      defect = std::max(defect, std::abs(m(i, j) - m(j, i)));
  if (defect > sym_tol) {
    throw std::invalid_argument("sym_eigen: symmetry defect " + std::to_string(defect) +
                                " exceeds tolerance");
  }

  HOperator a = m;
  // Work on the symmetrized copy so the defect below tolerance cannot bias rotations.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  HOperator v = HOperator::identity(n);

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) < 1e-14 * (1.0 + a.max_abs())) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = v;
  return out;
}

HOperator sqrt_psd(const HOperator& m) {
  SymEigen eig = sym_eigen(m, 1e-10);
  const std::size_t n = m.dim();
  HOperator out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.values[k] > 0.0 ? std::sqrt(eig.values[k]) : 0.0;
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = eig.vectors(i, k) * lam;
      if (vik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * eig.vectors(j, k);
    }
  }
  // Exact symmetry of the result regardless of rounding in the accumulation.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = avg;
      out(j, i) = avg;
    }
  return out;
}

}  // namespace volterra
