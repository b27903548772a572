#include "volterra/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>
#include <stdexcept>
#include <utility>

#include "volterra/parallel.hpp"

namespace volterra {

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_psd(const HOperator& q0, const char* who) {
  const SymEigen eig = sym_eigen(q0);  // rejects asymmetric input itself
  double max_abs = 0.0;
  for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
  for (double v : eig.values) {
    if (v < -1e-10 * (1.0 + max_abs))
      throw std::invalid_argument(std::string(who) +
                                  ": operator has negative eigenvalue " +
                                  fmt_double(v));
  }
}

// R^h(s,t) = (s^{2h} + t^{2h} - |t-s|^{2h}) / 2.
double fbm_r(double h, double s, double t) {
  const double e = 2.0 * h;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

}  // namespace

HOperator CovarianceField::at(double t, double tp) const {
  if (!eval) throw std::invalid_argument("covariance field has no evaluator");
  return eval(t, tp);
}

CovarianceField wiener_cov(const HOperator& q0) {
  check_psd(q0, "wiener_cov");
  CovarianceField q;
  q.alpha = 0.5;
  q.dim = q0.dim();
  q.label = "wiener";
  q.eval = [q0](double t, double tp) { return std::min(t, tp) * q0; };
  return q;
}

CovarianceField fbm_cov(double h, const HOperator& q0) {
  if (!(h > 0.0) || !(h < 1.0))
    throw std::invalid_argument("fbm_cov: h must lie in (0,1), got " +
                                fmt_double(h));
  check_psd(q0, "fbm_cov");
  CovarianceField q;
  q.alpha = h <= 0.5 ? h : 0.5;
  q.dim = q0.dim();
  q.label = "fbm:h=" + fmt_double(h);
  q.eval = [h, q0](double t, double tp) { return fbm_r(h, t, tp) * q0; };
  return q;
}

CovarianceField composed_cov(const CovarianceField& base, const GridPath& z,
                             double z_exponent) {
  if (z.dim() != 1)
    throw std::invalid_argument("composed_cov: Z must be a scalar path");
  if (!(z_exponent > 0.0))
    throw std::invalid_argument("composed_cov: Z exponent must be positive");
  // Linear interpolation stays inside the hull of the grid values, so
  // checking those is enough to confine Z to the base field's domain.
  for (std::size_t i = 0; i < z.grid().points(); ++i) {
    const double v = z.coord(i, 0);
    if (v < 0.0 || v > base.domain_end)
      throw std::invalid_argument("composed_cov: Z(" +
                                  fmt_double(z.grid().time(i)) + ") = " +
                                  fmt_double(v) +
                                  " escapes the base field's domain");
  }
  CovarianceField q;
  q.alpha = base.alpha * z_exponent;
  q.dim = base.dim;
  q.label = "composed(" + base.label + ")";
  q.domain_end = z.grid().horizon();
  auto base_eval = base.eval;
  q.eval = [base_eval, z](double t, double tp) {
    return base_eval(z.interpolate(t)[0], z.interpolate(tp)[0]);
  };
  return q;
}

CovarianceField empirical_cov(const std::vector<GridPath>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("empirical_cov: need at least 2 samples");
  const Grid grid = samples.front().grid();
  const std::size_t dim = samples.front().dim();
  for (const GridPath& p : samples) {
    if (!(p.grid() == grid) || p.dim() != dim)
      throw std::invalid_argument("empirical_cov: samples on mismatched grids");
  }
  const std::size_t pts = grid.points();
  if (pts > 513)
    throw std::invalid_argument(
        "empirical_cov: grid too fine for a dense entry table (subsample "
        "first)");

  // (1/N) sum of X(t_i) tensor X(t_j), accumulated per sample chunk and
  // folded in chunk order so the result is independent of the worker count.
  const std::size_t n = samples.size();
  const std::size_t chunk = 256;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(
      n_chunks, std::vector<double>(pts * pts * dim * dim, 0.0));
  for_chunks(n, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    std::vector<double>& acc = partial[c];
    for (std::size_t k = lo; k < hi; ++k) {
      const GridPath& p = samples[k];
      for (std::size_t i = 0; i < pts; ++i)
        for (std::size_t j = 0; j < pts; ++j) {
          // tensor(X(t_i), X(t_j)) entry (r,c) = X(t_j)[r] * X(t_i)[c]
          double* cell = &acc[(i * pts + j) * dim * dim];
          for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t s = 0; s < dim; ++s)
              cell[r * dim + s] += p.coord(j, r) * p.coord(i, s);
        }
    }
  });
  auto table = std::make_shared<std::vector<double>>(pts * pts * dim * dim, 0.0);
  for (const auto& acc : partial)
    for (std::size_t idx = 0; idx < table->size(); ++idx)
      (*table)[idx] += acc[idx];
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : *table) v *= inv_n;

  CovarianceField q;
  q.alpha = 0.5;  // estimator carries no analytic regularity; nominal value
  q.dim = dim;
  q.label = "empirical";
  q.domain_end = grid.horizon();
  q.eval = [table, grid, dim, pts](double t, double tp) {
    const double h = grid.step();
    const auto snap = [&](double x) {
      const long i = std::lround(x / h);
      if (i < 0 || static_cast<std::size_t>(i) >= pts)
        throw std::invalid_argument("empirical_cov: evaluation off the grid");
      return static_cast<std::size_t>(i);
    };
    const std::size_t i = snap(t), j = snap(tp);
    HOperator m(dim), mt(dim);
    const double* cell = &(*table)[(i * pts + j) * dim * dim];
    const double* rcell = &(*table)[(j * pts + i) * dim * dim];
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t s = 0; s < dim; ++s) {
        m(r, s) = cell[r * dim + s];
        mt(r, s) = rcell[s * dim + r];  // adjoint of the mirrored entry
      }
    return 0.5 * (m + mt);
  };
  return q;
}

CovarianceField cov_scale(double c, const CovarianceField& q) {
  CovarianceField out = q;
  out.label = fmt_double(c) + "*(" + q.label + ")";
  auto base = q.eval;
  out.eval = [c, base](double t, double tp) { return c * base(t, tp); };
  return out;
}

CovarianceField cov_difference(const CovarianceField& a, const CovarianceField& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("cov_difference: dimension mismatch (" +
                                std::to_string(a.dim) + " vs " +
                                std::to_string(b.dim) + ")");
  CovarianceField out;
  out.alpha = std::min(a.alpha, b.alpha);
  out.dim = a.dim;
  out.label = a.label + " - " + b.label;
  out.domain_end = std::min(a.domain_end, b.domain_end);
  auto ea = a.eval, eb = b.eval;
  out.eval = [ea, eb](double t, double tp) { return ea(t, tp) - eb(t, tp); };
  return out;
}

HOperator cov_rect(const CovarianceField& q, double s, double sp, double t,
                   double tp) {
  return rect_increment(q.eval, s, sp, t, tp);
}

namespace {

// Sup candidates. Pairs feed q10/q01 numerators; every pair also serves as
// a q11 interval, together with zero-anchored intervals [0, t'] for each
// candidate evaluation point — that containment is what makes the discrete
// boundary-zero reduction q10 <= q11 T^alpha structural.
struct Candidates {
  std::vector<std::pair<double, double>> pairs;  // (s, t) with s < t
  std::vector<double> points;                    // t' values
};

Candidates build_candidates(const Grid& grid) {
  const std::size_t pts = grid.points();
  std::set<std::pair<std::size_t, std::size_t>> pair_idx;
  for (std::size_t i = 0; i + 1 < pts; ++i) pair_idx.insert({i, i + 1});

  const std::size_t coarse_stride = subsample_stride(pts, 17);
  std::vector<std::size_t> coarse;
  for (std::size_t i = 0; i < pts; i += coarse_stride) coarse.push_back(i);
  for (std::size_t a = 0; a < coarse.size(); ++a)
    for (std::size_t b = a + 1; b < coarse.size(); ++b)
      pair_idx.insert({coarse[a], coarse[b]});

  const std::size_t point_stride = subsample_stride(pts, 33);
  std::vector<std::size_t> point_idx;
  for (std::size_t i = 0; i < pts; i += point_stride) point_idx.push_back(i);
  for (std::size_t i : point_idx)
    if (i > 0) pair_idx.insert({0, i});

  Candidates c;
  c.pairs.reserve(pair_idx.size());
  for (const auto& [i, j] : pair_idx)
    c.pairs.emplace_back(grid.time(i), grid.time(j));
  c.points.reserve(point_idx.size());
  for (std::size_t i : point_idx) c.points.push_back(grid.time(i));
  return c;
}

}  // namespace

CovSupSamples cov_sup_samples(const CovarianceField& q, const Grid& grid) {
  const Candidates cand = build_candidates(grid);
  const std::size_t np = cand.pairs.size();
  const std::size_t nu = cand.points.size();

  CovSupSamples out;
  out.q10.resize(np * nu);
  out.q01.resize(np * nu);
  out.q11.resize(np * np);
  for_chunks(np, 2, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const auto [s, t] = cand.pairs[k];
      for (std::size_t m = 0; m < nu; ++m) {
        const double u = cand.points[m];
        out.q10[k * nu + m] = {op_norm(q.eval(t, u) - q.eval(s, u)), t - s};
        out.q01[k * nu + m] = {op_norm(q.eval(u, t) - q.eval(u, s)), t - s};
      }
      for (std::size_t m = 0; m < np; ++m) {
        const auto [sp, tp] = cand.pairs[m];
        out.q11[k * np + m] = {op_norm(rect_increment(q.eval, s, sp, t, tp)),
                               t - s, tp - sp};
      }
    }
  });
  return out;
}

CovSeminorms cov_seminorms_from(const CovSupSamples& samples, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("cov_seminorms: alpha must lie in (0,1), got " +
                                fmt_double(alpha));
  CovSeminorms out;
  for (const auto& s : samples.q10)
    out.q10 = std::max(out.q10, s.norm / std::pow(s.gap, alpha));
  for (const auto& s : samples.q01)
    out.q01 = std::max(out.q01, s.norm / std::pow(s.gap, alpha));
  for (const auto& s : samples.q11)
    out.q11 = std::max(out.q11, s.norm / std::pow(s.gap1 * s.gap2, alpha));
  return out;
}

CovSeminorms cov_seminorms(const CovarianceField& q, double alpha,
                           const Grid& grid) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("cov_seminorms: alpha must lie in (0,1), got " +
                                fmt_double(alpha));
  return cov_seminorms_from(cov_sup_samples(q, grid), alpha);
}

}  // namespace volterra
