#include "volterra/integrate2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"

namespace volterra {

namespace {

// Raw dim x dim blocks; the field sweep is too hot for HOperator temporaries.

void mm_acc(std::size_t d, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * b[k * d + j];
      c[i * d + j] += s;
    }
}

// Operator-valued table on the (N+1)^2 grid lattice.
struct OpTable {
  std::size_t pts = 0, d = 0;
  std::vector<double> a;

  OpTable() = default;
  OpTable(std::size_t pts_, std::size_t d_)
      : pts(pts_), d(d_), a(pts_ * pts_ * d_ * d_, 0.0) {}
  double* at(std::size_t i, std::size_t j) {
    return a.data() + (i * pts + j) * d * d;
  }
  const double* at(std::size_t i, std::size_t j) const {
    return a.data() + (i * pts + j) * d * d;
  }
};

// out = q(r1,c1) - q(r1,c0) - q(r0,c1) + q(r0,c0)
void box_from(const OpTable& q, std::size_t r0, std::size_t r1, std::size_t c0,
              std::size_t c1, double* out) {
  const double* a = q.at(r1, c1);
  const double* b = q.at(r1, c0);
  const double* c = q.at(r0, c1);
  const double* e = q.at(r0, c0);
  const std::size_t m = q.d * q.d;
  for (std::size_t k = 0; k < m; ++k) out[k] = a[k] - b[k] - c[k] + e[k];
}

OpTable build_qtab(const CovarianceField& q, const Grid& g) {
  OpTable tab(g.points(), q.dim);
  const std::size_t m = q.dim * q.dim;
  for_chunks(g.points(), 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < tab.pts; ++j) {
        const HOperator v = q.at(g.time(i), g.time(j));
        std::copy(v.entries().begin(), v.entries().end(),
                  tab.a.begin() + (i * tab.pts + j) * m);
      }
  });
  return tab;
}

// Kernel values on the grid: one block per gap for stationary kernels, one
// per (i,u) pair otherwise. The primed slot stores adjoints directly.
class KernelOps {
 public:
  KernelOps(const VolterraKernel& k, const Grid& g, bool store_adjoint)
      : d_(k.dim), stationary_(k.stationary) {
    const std::size_t n = g.intervals();
    const std::size_t m = d_ * d_;
    if (stationary_) {
      a_.resize((n + 1) * m, 0.0);
      for (std::size_t gap = 1; gap <= n; ++gap) {
        HOperator v = k.eval_gap(static_cast<double>(gap) * g.step());
        if (store_adjoint) v = v.adjoint();
        std::copy(v.entries().begin(), v.entries().end(),
                  a_.begin() + gap * m);
      }
    } else {
      a_.resize(n * (n + 1) / 2 * m, 0.0);
      for_chunks(n + 1, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          for (std::size_t u = 0; u < i; ++u) {
            HOperator v = k.at(g.time(i), g.time(u));
            if (store_adjoint) v = v.adjoint();
            std::copy(v.entries().begin(), v.entries().end(),
                      a_.begin() + (tri(i) + u) * m);
          }
      });
    }
  }

  // K(t_i, t_u) (or its adjoint), u < i.
  const double* at(std::size_t i, std::size_t u) const {
    return stationary_ ? a_.data() + (i - u) * d_ * d_
                       : a_.data() + (tri(i) + u) * d_ * d_;
  }

 private:
  static std::size_t tri(std::size_t i) { return i * (i - 1) / 2; }

  std::size_t d_;
  bool stationary_;
  std::vector<double> a_;
};

// The whole field { M(i,j) : tau = t_i, tau' = t_j } at one diagonal level.
//
// Cells of [0,t_i] at level l are the grid-aligned dyadic cells of stride
// s = N/2^l plus a partial trailing cell [m_i, i]. Factoring the sum as
//   M(i,j) = sum_q B(i,q) K'(t_j, qs)^*  +  (partial-j column)
// with B(i,q) = sum over i-cells a of K(t_i, left(a)) boxQ(a x C_q) makes
// the per-level cost O(N 4^l + N^2 2^l) instead of O(N^2 4^l), and keeps
// every product in the pinned (K * boxQ) * K'^* order.
OpTable field_level(const Cov2DSpec& spec, const Grid& g, const OpTable& qt,
                    const KernelOps& kt, const KernelOps& kpt,
                    std::size_t lvl) {
  const std::size_t n = g.intervals();
  const std::size_t d = spec.kernel.dim;
  const std::size_t m = d * d;
  const std::size_t s = n >> lvl;
  const std::size_t cells = n / s;

  std::vector<double> bt((n + 1) * cells * m, 0.0);
  for_chunks(n + 1, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> box(m);
    for (std::size_t i = lo; i < hi; ++i) {
      if (i == 0) continue;
      const std::size_t mi = (i / s) * s;
      double* brow = bt.data() + i * cells * m;
      for (std::size_t p = 0; p * s < mi; ++p) {
        const double* k = kt.at(i, p * s);
        for (std::size_t q = 0; q < cells; ++q) {
          box_from(qt, p * s, p * s + s, q * s, q * s + s, box.data());
          mm_acc(d, k, box.data(), brow + q * m);
        }
      }
      if (i > mi) {
        const double* k = kt.at(i, mi);
        for (std::size_t q = 0; q < cells; ++q) {
          box_from(qt, mi, i, q * s, q * s + s, box.data());
          mm_acc(d, k, box.data(), brow + q * m);
        }
      }
    }
  });

  OpTable out(n + 1, d);
  for_chunks(n + 1, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> box(m), part(m);
    for (std::size_t i = lo; i < hi; ++i) {
      if (i == 0) continue;
      const std::size_t mi = (i / s) * s;
      const double* brow = bt.data() + i * cells * m;
      for (std::size_t j = 1; j <= n; ++j) {
        double* acc = out.at(i, j);
        const std::size_t mj = (j / s) * s;
        for (std::size_t q = 0; q * s < mj; ++q)
          mm_acc(d, brow + q * m, kpt.at(j, q * s), acc);
        if (j > mj) {
          std::fill(part.begin(), part.end(), 0.0);
          for (std::size_t p = 0; p * s < mi; ++p) {
            box_from(qt, p * s, p * s + s, mj, j, box.data());
            mm_acc(d, kt.at(i, p * s), box.data(), part.data());
          }
          if (i > mi) {
            box_from(qt, mi, i, mj, j, box.data());
            mm_acc(d, kt.at(i, mi), box.data(), part.data());
          }
          mm_acc(d, part.data(), kpt.at(j, mj), acc);
        }
      }
    }
  });
  return out;
}

void check_spec(const Cov2DSpec& s) {
  if (s.kernel.dim != s.kernel_prime.dim || s.kernel.dim != s.cov.dim)
    throw std::invalid_argument(
        "Cov2DSpec: kernel and field dimensions do not match");
  if (!(s.alpha > 0.0) || !(s.alpha < 1.0))
    throw std::invalid_argument("Cov2DSpec: alpha must lie in (0,1)");
  if (!(s.alpha - std::max(s.kernel.eta, s.kernel_prime.eta) > 0.0))
    throw std::invalid_argument(
        "Cov2DSpec: admissibility alpha - eta > 0 fails");
}

// Nearest-grid-point evaluation into a computed table; the table owns the
// values, the closure owns the table.
CovarianceField table_field(std::shared_ptr<OpTable> tab, const Grid& g,
                            double alpha, std::string label) {
  CovarianceField f;
  f.dim = tab->d;
  f.alpha = alpha;
  f.label = std::move(label);
  f.domain_end = g.horizon();
  const double h = g.step();
  const double hor = g.horizon();
  const std::size_t n = g.intervals();
  f.eval = [tab, h, hor, n](double t, double tp) {
    if (t < -1e-9 || t > hor * (1.0 + 1e-9) || tp < -1e-9 ||
        tp > hor * (1.0 + 1e-9))
      throw std::invalid_argument("cov table: evaluation outside [0, horizon]");
    const std::size_t i = static_cast<std::size_t>(
        std::min<long long>(static_cast<long long>(n),
                            std::max<long long>(0, std::llround(t / h))));
    const std::size_t j = static_cast<std::size_t>(
        std::min<long long>(static_cast<long long>(n),
                            std::max<long long>(0, std::llround(tp / h))));
    HOperator out(tab->d);
    const double* src = tab->at(i, j);
    for (std::size_t r = 0; r < tab->d; ++r)
      for (std::size_t c = 0; c < tab->d; ++c) out(r, c) = src[r * tab->d + c];
    return out;
  };
  return f;
}

double fit_rate(const std::vector<std::size_t>& sched,
                const std::vector<double>& steps) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < steps.size(); ++k)
    if (steps[k] > 0.0) {
      xs.push_back(static_cast<double>(sched[k + 1]) * std::log(2.0));
      ys.push_back(std::log(steps[k]));
    }
  return xs.size() < 2 ? std::numeric_limits<double>::infinity()
                       : -lsq_slope(xs, ys);
}

}  // namespace

Cov2DSpec::Cov2DSpec(VolterraKernel k, VolterraKernel kp, CovarianceField q,
                     double a)
    : kernel(std::move(k)),
      kernel_prime(std::move(kp)),
      cov(std::move(q)),
      alpha(a) {
  check_spec(*this);
}

Cov2DSpec::Cov2DSpec(VolterraKernel k, CovarianceField q)
    : kernel(k),
      kernel_prime(std::move(k)),
      cov(std::move(q)),
      alpha(cov.alpha) {
  check_spec(*this);
}

HOperator double_sum(const Cov2DSpec& spec, double tau, double tau_p, double t,
                     double t_p, std::size_t level_1, std::size_t level_2) {
  if (t < 0.0 || t > tau || t_p < 0.0 || t_p > tau_p)
    throw std::invalid_argument("double_sum: needs 0 <= t <= tau in each slot");
  if (level_1 > 24 || level_2 > 24)
    throw std::invalid_argument("double_sum: level beyond the sanity bound");
  const std::size_t d = spec.kernel.dim;
  if (t == 0.0 || t_p == 0.0) return HOperator(d);

  const std::size_t m = d * d;
  const std::size_t p1 = std::size_t{1} << level_1;
  const std::size_t p2 = std::size_t{1} << level_2;

  std::vector<double> col(p2 * m);
  for (std::size_t q = 0; q < p2; ++q) {
    const HOperator v =
        spec.kernel_prime
            .at(tau_p, t_p * static_cast<double>(q) / static_cast<double>(p2))
            .adjoint();
    std::copy(v.entries().begin(), v.entries().end(), col.begin() + q * m);
  }

  std::vector<double> line_lo((p2 + 1) * m), line_hi((p2 + 1) * m);
  auto fill_line = [&](double u, std::vector<double>& line) {
    for (std::size_t q = 0; q <= p2; ++q) {
      const HOperator v = spec.cov.at(
          u, t_p * static_cast<double>(q) / static_cast<double>(p2));
      std::copy(v.entries().begin(), v.entries().end(), line.begin() + q * m);
    }
  };
  fill_line(0.0, line_lo);

  std::vector<double> acc(m, 0.0), box(m), tmp(m);
  for (std::size_t p = 0; p < p1; ++p) {
    const double u = t * static_cast<double>(p) / static_cast<double>(p1);
    const double v = t * static_cast<double>(p + 1) / static_cast<double>(p1);
    fill_line(v, line_hi);
    const HOperator ku = spec.kernel.at(tau, u);
    const double* kd = ku.entries().data();
    for (std::size_t q = 0; q < p2; ++q) {
      for (std::size_t e = 0; e < m; ++e)
        box[e] = line_hi[(q + 1) * m + e] - line_hi[q * m + e] -
                 line_lo[(q + 1) * m + e] + line_lo[q * m + e];
      std::fill(tmp.begin(), tmp.end(), 0.0);
      mm_acc(d, kd, box.data(), tmp.data());
      mm_acc(d, tmp.data(), col.data() + q * m, acc.data());
    }
    line_lo.swap(line_hi);
  }
  return HOperator(d, std::move(acc));
}

CovIntegralResult cov_integral(const Cov2DSpec& spec, const Grid& grid,
                               std::size_t max_level, double tol) {
  if (static_cast<int>(max_level) > grid.level())
    throw std::invalid_argument(
        "cov_integral: max_level exceeds the grid resolution");
  if (!(tol > 0.0))
    throw std::invalid_argument("cov_integral: tol must be positive");

  const std::size_t n = grid.intervals();
  const std::size_t pts = n + 1;
  const std::size_t d = spec.kernel.dim;
  const std::size_t m = d * d;

  const OpTable qt = build_qtab(spec.cov, grid);
  const KernelOps kt(spec.kernel, grid, false);
  const KernelOps kpt(spec.kernel_prime, grid, true);

  auto result = std::make_shared<OpTable>(pts, d);
  std::vector<char> done(pts * pts, 0), prev_small(pts * pts, 0);
  std::vector<double> last_step(pts * pts, 0.0);
  std::size_t n_done = 0;
  for (std::size_t i = 0; i < pts; ++i) {
    // Axis pairs are exactly zero at every level; settle them up front.
    if (!done[i * pts]) done[i * pts] = 1, ++n_done;
    if (!done[i]) done[i] = 1, ++n_done;
  }
  const std::size_t total = pts * pts;

  std::vector<std::size_t> sched;
  std::vector<double> steps;
  OpTable prev;
  for (std::size_t lvl = 0; lvl <= max_level; ++lvl) {
    OpTable cur = field_level(spec, grid, qt, kt, kpt, lvl);
    sched.push_back(lvl);
    if (sched.size() >= 2) {
      const std::size_t stride = n >> lvl;
      std::vector<double> row_max(pts, 0.0);
      std::vector<std::size_t> row_done(pts, 0);
      for_chunks(pts, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t idx = i * pts + j;
            if (done[idx]) continue;
            // Until the stride drops below an index, that slot's partition
            // is the single cell [0, t]. A diff only counts once BOTH slots
            // have refined: degenerate fields (disjoint-rectangle boxes of
            // the Wiener field vanish) can hold the value exactly constant
            // while one slot is still a single cell, and that would fake
            // convergence.
            if (i <= stride || j <= stride) continue;
            HOperator diff(d);
            const double* ca = cur.at(i, j);
            const double* pa = prev.at(i, j);
            for (std::size_t r = 0; r < d; ++r)
              for (std::size_t c = 0; c < d; ++c)
                diff(r, c) = ca[r * d + c] - pa[r * d + c];
            const double step = op_norm(diff);
            last_step[idx] = step;
            row_max[i] = std::max(row_max[i], step);
            const bool small = step < tol;
            if (lvl >= 2 && small && prev_small[idx]) {
              done[idx] = 1;
              ++row_done[i];
              std::copy(ca, ca + m, result->at(i, j));
            }
            prev_small[idx] = small ? 1 : 0;
          }
      });
      double mx = 0.0;
      for (std::size_t i = 0; i < pts; ++i) {
        mx = std::max(mx, row_max[i]);
        n_done += row_done[i];
      }
      steps.push_back(mx);
    }
    prev = std::move(cur);
    if (n_done == total) break;
  }

  CovIntegralResult res;
  for (std::size_t i = 0; i < pts; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t idx = i * pts + j;
      if (done[idx]) continue;
      std::copy(prev.at(i, j), prev.at(i, j) + m, result->at(i, j));
      if (sched.size() >= 2 && last_step[idx] >= tol) ++res.unconverged;
    }

  res.report.levels = sched;
  res.report.diffs = steps;
  res.report.fitted_rate = fit_rate(sched, steps);
  const double theta_star = std::min(1.0, 1.0 + 0.01 - spec.alpha);
  res.report.target_rate = spec.alpha + theta_star - 1.0;

  const double hor = grid.horizon();
  for (std::size_t lv : sched) {
    res.boundary1.push_back(op_norm(boundary_integral_1(
        spec, hor, hor, hor / 4, hor / 4, 3 * hor / 4, 3 * hor / 4, lv)));
    res.boundary2.push_back(op_norm(boundary_integral_2(
        spec, hor, hor, hor / 4, hor / 4, 3 * hor / 4, 3 * hor / 4, lv)));
  }

  const double zeta =
      0.5 * (spec.alpha - std::max(spec.kernel.eta, spec.kernel_prime.eta));
  res.field = table_field(
      result, grid, zeta,
      "volterra-cov(" + spec.kernel.label + "," + spec.cov.label + ")");
  return res;
}

HOperator boundary_integral_1(const Cov2DSpec& spec, double tau, double tau_p,
                              double s, double s_p, double t, double t_p,
                              std::size_t level) {
  if (s < 0.0 || s > t || t > tau || s_p < 0.0 || s_p > t_p || t_p > tau_p)
    throw std::invalid_argument("boundary_integral_1: ordering violation");
  if (level > 24)
    throw std::invalid_argument(
        "boundary_integral_1: level beyond the sanity bound");
  const std::size_t d = spec.kernel.dim;
  if (t == s || t_p == s_p) return HOperator(d);

  const HOperator kp = spec.kernel_prime.at(tau_p, s_p).adjoint();
  const std::size_t cells = std::size_t{1} << level;
  HOperator acc(d);
  for (std::size_t p = 0; p < cells; ++p) {
    const double u =
        s + (t - s) * static_cast<double>(p) / static_cast<double>(cells);
    const double v =
        s + (t - s) * static_cast<double>(p + 1) / static_cast<double>(cells);
    const HOperator box = spec.cov.at(v, t_p) - spec.cov.at(v, s_p) -
                          spec.cov.at(u, t_p) + spec.cov.at(u, s_p);
    acc += (spec.kernel.at(tau, u) * box) * kp;
  }
  return acc;
}

HOperator boundary_integral_2(const Cov2DSpec& spec, double tau, double tau_p,
                              double s, double s_p, double t, double t_p,
                              std::size_t level) {
  if (s < 0.0 || s > t || t > tau || s_p < 0.0 || s_p > t_p || t_p > tau_p)
    throw std::invalid_argument("boundary_integral_2: ordering violation");
  if (level > 24)
    throw std::invalid_argument(
        "boundary_integral_2: level beyond the sanity bound");
  const std::size_t d = spec.kernel.dim;
  if (t == s || t_p == s_p) return HOperator(d);

  const HOperator k = spec.kernel.at(tau, s);
  const std::size_t cells = std::size_t{1} << level;
  HOperator acc(d);
  for (std::size_t q = 0; q < cells; ++q) {
    const double u = s_p + (t_p - s_p) * static_cast<double>(q) /
                               static_cast<double>(cells);
    const double v = s_p + (t_p - s_p) * static_cast<double>(q + 1) /
                               static_cast<double>(cells);
    const HOperator box = spec.cov.at(t, v) - spec.cov.at(t, u) -
                          spec.cov.at(s, v) + spec.cov.at(s, u);
    acc += (k * box) * spec.kernel_prime.at(tau_p, u).adjoint();
  }
  return acc;
}

StabilityGap stability_gap(const Cov2DSpec& spec_a, const Cov2DSpec& spec_b,
                           double zeta, const Grid& grid) {
  if (spec_a.kernel.dim != spec_b.kernel.dim)
    throw std::invalid_argument("stability_gap: dimension mismatch");
  const double slack_a =
      spec_a.alpha -
      std::max(spec_a.kernel.eta, spec_a.kernel_prime.eta);
  const double slack_b =
      spec_b.alpha -
      std::max(spec_b.kernel.eta, spec_b.kernel_prime.eta);
  if (!(zeta >= 0.0) || !(zeta < std::min(slack_a, slack_b)))
    throw std::invalid_argument(
        "stability_gap: zeta must lie in [0, alpha - eta)");

  // Both fields at one fixed (finest) level, so the comparison is exactly
  // linear in Q and free of adaptive-level artifacts.
  const std::size_t lvl = static_cast<std::size_t>(grid.level());
  auto field_of = [&](const Cov2DSpec& s) {
    const OpTable qt = build_qtab(s.cov, grid);
    const KernelOps kt(s.kernel, grid, false);
    const KernelOps kpt(s.kernel_prime, grid, true);
    return field_level(s, grid, qt, kt, kpt, lvl);
  };
  const OpTable fa = field_of(spec_a);
  const OpTable fb = field_of(spec_b);
  auto dt = std::make_shared<OpTable>(fa);
  for (std::size_t k = 0; k < dt->a.size(); ++k) dt->a[k] -= fb.a[k];
  const CovarianceField diff =
      table_field(dt, grid, std::max(zeta, 0.5), "stability-diff");

  StabilityGap out;
  if (zeta > 0.0) {
    out.gap = cov_seminorms(diff, zeta, grid).total();
  } else {
    // zeta = 0 degenerates to unweighted sups of the same candidate set.
    const CovSupSamples s = cov_sup_samples(diff, grid);
    double q10 = 0.0, q01 = 0.0, q11 = 0.0;
    for (const auto& c : s.q10) q10 = std::max(q10, c.norm);
    for (const auto& c : s.q01) q01 = std::max(q01, c.norm);
    for (const auto& c : s.q11) q11 = std::max(q11, c.norm);
    out.gap = q10 + q01 + q11;
  }

  out.input_dist =
      kernel_seminorms(kernel_difference(spec_a.kernel, spec_b.kernel), grid)
          .total() +
      cov_seminorms(cov_difference(spec_a.cov, spec_b.cov), spec_a.alpha, grid)
          .total();
  return out;
}

RoughGate rough_admissible(const CovarianceField& q, const Grid& grid) {
  const Grid fine(grid.horizon(), grid.intervals() * 2);
  const CovSupSamples coarse_s = cov_sup_samples(q, grid);
  const CovSupSamples fine_s = cov_sup_samples(q, fine);

  RoughGate out;
  auto grows = [](double c, double f) { return f > 1.01 * c + 1e-12; };
  for (int k = 0; k < 50; ++k) {
    RoughScanRow row;
    row.gamma = 0.5 + 0.01 * k;
    row.coarse = cov_seminorms_from(coarse_s, row.gamma);
    row.fine = cov_seminorms_from(fine_s, row.gamma);
    row.stable = !grows(row.coarse.q10, row.fine.q10) &&
                 !grows(row.coarse.q01, row.fine.q01) &&
                 !grows(row.coarse.q11, row.fine.q11);
    if (row.stable) out.certified_exponent = row.gamma;
    out.scan.push_back(row);
  }
  out.admissible = out.certified_exponent > 0.5;
  return out;
}

}  // namespace volterra
