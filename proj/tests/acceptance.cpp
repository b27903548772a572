// Acceptance gate: one line per criterion, [PASS]/[FAIL] plus the measured
// numbers, nonzero exit when anything fails. Tolerances are pinned here and
// nowhere else; the unit suites cover the fine-grained contracts.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "volterra/covariance.hpp"
#include "volterra/fracou.hpp"
#include "volterra/hilbert.hpp"
#include "volterra/integrate1d.hpp"
#include "volterra/integrate2d.hpp"
#include "volterra/kernels.hpp"
#include "volterra/parallel.hpp"
#include "volterra/paths.hpp"
#include "volterra/rng.hpp"
#include "volterra/sampling.hpp"
#include "volterra/special.hpp"
#include "volterra/stats.hpp"

using namespace volterra;

namespace {

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Line> g_lines;

void record(int id, const std::string& name, bool pass,
            const std::string& detail) {
  g_lines.push_back({id, name, pass, detail});
  std::printf("[%s] %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.3g", x);
  return b;
}

HOperator spd2() {
  HOperator q(2);
  q(0, 0) = 1.0; q(0, 1) = 0.3; q(1, 0) = 0.3; q(1, 1) = 0.7;
  return q;
}

GridPath linear_driver(const Grid& g) {
  GridPath p(g, 1);
  for (std::size_t i = 0; i <= g.intervals(); ++i) p.coord(i, 0) = g.time(i);
  return p;
}

GridPath wiener2(const Grid& g, std::uint64_t seed, std::uint64_t index = 0) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.sample_index = index;
  cfg.grid = g;
  cfg.q0 = spd2();
  return sample_qwiener(cfg);
}

HOperator quad_oracle(const Cov2DSpec& spec, const Grid& g, std::size_t i,
                      std::size_t j) {
  HOperator acc(spec.kernel.dim);
  for (std::size_t p = 0; p < i; ++p)
    for (std::size_t q = 0; q < j; ++q) {
      HOperator box = cov_rect(spec.cov, g.time(p), g.time(q), g.time(p + 1),
                               g.time(q + 1));
      acc += spec.kernel.at(g.time(i), g.time(p)) * box *
             spec.kernel_prime.at(g.time(j), g.time(q)).adjoint();
    }
  return acc;
}

HOperator expm_sym(const HOperator& a, double t) {
  SymEigen e = sym_eigen(a);
  std::vector<double> d(e.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(e.values[i] * t);
  return e.vectors * HOperator::diagonal(d) * e.vectors.adjoint();
}

// the admissible kernel x field matrix shared by criteria 4 and 6
struct MatrixRun {
  std::string label;
  double eta;
  double alpha;
  CovIntegralResult coarse;  // N = 128
  CovIntegralResult fine;    // N = 256
  KernelSeminorms ksem;      // on the fine grid
  CovSeminorms qsem;         // input field on the fine grid
};

std::vector<MatrixRun> run_matrix() {
  std::vector<MatrixRun> out;
  const HOperator one = HOperator::identity(1);
  Grid g128(1.0, 128), g256(1.0, 256);
  for (double eta : {0.1, 0.3})
    for (int fc = 0; fc < 2; ++fc) {
      CovarianceField q = fc ? fbm_cov(0.4, one) : wiener_cov(one);
      VolterraKernel k = fractional_kernel(eta, one);
      MatrixRun run;
      run.label = "frac" + fmt(eta) + "+" + (fc ? "fbm0.4" : "wiener");
      run.eta = eta;
      run.alpha = q.alpha;
      run.coarse = cov_integral(Cov2DSpec(k, q), g128, 7, 1e-14);
      run.fine = cov_integral(Cov2DSpec(k, q), g256, 8, 1e-14);
      run.ksem = kernel_seminorms(k, g256);
      run.qsem = cov_seminorms(q, q.alpha, g256);
      out.push_back(std::move(run));
    }
  return out;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
  // 1D: identity kernel telescopes to W(t) - W(0)
  Grid g(1.0, 256);
  GridPath w = wiener2(g, 0x5EED01);
  IntegrandSpec spec(identity_kernel(2), w, 0.49);
  Volterra1DResult res = volterra_integral(spec, 8, 1e-9);
  double err1 = 0.0;
  for (std::size_t tau = 0; tau <= 256; ++tau)
    for (std::size_t t = 0; t <= tau; ++t)
      for (std::size_t c = 0; c < 2; ++c)
        err1 = std::max(err1, std::abs(res.values.coord(tau, t, c) -
                                       (w.coord(t, c) - w.coord(0, c))));

  // 2D: identity kernels on the wiener field give min(t,t') Q0
  Grid g2(1.0, 64);
  HOperator q0 = spd2();
  CovIntegralResult cr =
      cov_integral(Cov2DSpec(identity_kernel(2), wiener_cov(q0)), g2, 6, 1e-9);
  double err2 = 0.0;
  for (std::size_t i = 0; i <= 64; ++i)
    for (std::size_t j = 0; j <= 64; ++j) {
      HOperator want = std::min(g2.time(i), g2.time(j)) * q0;
      err2 = std::max(err2,
                      (cr.field.at(g2.time(i), g2.time(j)) - want).max_abs());
    }

  const bool pass = err1 <= 1e-12 && err2 <= 1e-10;
  record(1, "telescoping exactness", pass,
         "1d err " + fmt(err1) + " (tol 1e-12), 2d err " + fmt(err2) +
             " (tol 1e-10)");
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
  // (a) level-12 left sums of (t-s)^{-1/4} against ds vs t^{3/4}/(3/4)
  Grid g(1.0, 4096);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  double err_a = 0.0;
  double at_t = 0.0;
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    const double got = riemann_sum(spec, t, t, 12)[0];
    const double want = std::pow(t, 0.75) / 0.75;
    if (std::abs(got - want) > err_a) {
      err_a = std::abs(got - want);
      at_t = t;
    }
  }

  // (b) smooth fractional-type kernel (t-s)^{1/4} on the wiener field:
  // diagonal of the double integral is t^{3/2}/(3/2)
  VolterraKernel smooth;
  smooth.dim = 1;
  smooth.eta = 0.0;
  smooth.label = "gap^0.25";
  smooth.stationary = true;
  smooth.eval_gap = [](double gap) {
    HOperator m(1);
    m(0, 0) = std::pow(gap, 0.25);
    return m;
  };
  smooth.eval = [](double tau, double s) {
    HOperator m(1);
    m(0, 0) = std::pow(tau - s, 0.25);
    return m;
  };
  Cov2DSpec spec_b(smooth, wiener_cov(HOperator::identity(1)));
  double err_b = 0.0;
  for (double t : {0.25, 0.5, 1.0}) {
    const double got = double_sum(spec_b, t, t, t, t, 10, 10)(0, 0);
    const double want = std::pow(t, 1.5) / 1.5;
    err_b = std::max(err_b, std::abs(got - want));
  }

  const bool pass_a = err_a <= 1e-3;
  const bool pass_b = err_b <= 1e-2;
  record(2, "analytic volterra values", pass_a && pass_b,
         "1d err " + fmt(err_a) + " at t=" + fmt(at_t) +
             " (tol 1e-3), 2d err " + fmt(err_b) + " (tol 1e-2)");
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
  Grid g(1.0, 16);
  HOperator a(2);
  a(0, 0) = 1.0; a(0, 1) = 0.25; a(1, 1) = 0.8;
  double worst = 0.0;
  for (double eta : {0.1, 0.3})
    for (int fc = 0; fc < 2; ++fc) {
      CovarianceField q = fc ? fbm_cov(0.4, spd2()) : wiener_cov(spd2());
      Cov2DSpec spec(fractional_kernel(eta, a), q);
      CovIntegralResult res = cov_integral(spec, g, 4, 1e-14);
      for (std::size_t i = 0; i <= 16; ++i)
        for (std::size_t j = 0; j <= 16; ++j) {
          HOperator want = quad_oracle(spec, g, i, j);
          worst = std::max(
              worst, (res.field.at(g.time(i), g.time(j)) - want).max_abs());
        }
    }
  record(3, "brute-force equivalence", worst <= 1e-12,
         "max entry gap " + fmt(worst) + " over 4 kernel/field combos (tol 1e-12)");
}

// ---------------------------------------------------------------- criterion 4
void criterion_4(const std::vector<MatrixRun>& matrix) {
  // 1D: refinement diffs on the smooth driver decrease monotonically past
  // level 5 and the tail levels fit a rate >= 0.7
  Grid g(1.0, 4096);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  const std::vector<std::pair<double, double>> probes = {
      {1.0, 1.0}, {1.0, 0.5}, {0.5, 0.5}};
  RefinementReport full =
      convergence_study(spec, probes, {5, 6, 7, 8, 9, 10, 11, 12});
  bool monotone1 = true;
  for (std::size_t k = 0; k + 1 < full.diffs.size(); ++k)
    if (full.diffs[k + 1] >= full.diffs[k]) monotone1 = false;
  RefinementReport tail = convergence_study(spec, probes, {9, 10, 11, 12});
  const bool rate1 = tail.fitted_rate >= 0.7;

  // 2D: the shared kernel x field matrix at N = 256, full-depth reports
  bool monotone2 = true, rate2 = true;
  double min_rate2 = 1e300;
  for (const MatrixRun& run : matrix) {
    const std::vector<double>& d = run.fine.report.diffs;
    // diffs[k] sits between schedule levels k and k+1; "past level 5"
    // means the steps (5,6), (6,7), (7,8)
    for (std::size_t k = 5; k + 1 < d.size(); ++k)
      if (d[k + 1] >= d[k]) monotone2 = false;
    if (!(run.fine.report.fitted_rate > 0.0)) rate2 = false;
    min_rate2 = std::min(min_rate2, run.fine.report.fitted_rate);
  }

  const bool pass = monotone1 && rate1 && monotone2 && rate2;
  record(4, "refinement cauchy rates", pass,
         std::string("1d diffs ") + (monotone1 ? "monotone" : "NOT monotone") +
             ", tail rate " + fmt(tail.fitted_rate) +
             " (>= 0.7); 2d diffs " + (monotone2 ? "monotone" : "NOT monotone") +
             ", min rate " + fmt(min_rate2) + " (> 0)");
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
  const std::size_t n = 64, nmc = 10000;
  Grid g(1.0, n);
  HOperator q0 = spd2();
  const double eta = 0.2, h = 0.4;

  CovIntegralResult pred = cov_integral(
      Cov2DSpec(fractional_kernel(eta, HOperator::identity(2)),
                fbm_cov(h, q0)),
      g, 6, 1e-9);

  // kernel weights per gap (scalar: the kernel matrix is the identity)
  std::vector<double> wk(n + 1, 0.0);
  for (std::size_t gap = 1; gap <= n; ++gap)
    wk[gap] = std::pow(static_cast<double>(gap) * g.step(), -eta);

  const std::size_t probe_idx[4] = {16, 32, 48, 64};
  FbmSampler sampler(g, h, q0);
  // per-sample X(t_P) for each probe index, filled by sample index
  std::vector<double> xs(nmc * 4 * 2);
  for_chunks(nmc, 250, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> dw(n * 2);
    for (std::size_t s = lo; s < hi; ++s) {
      GridPath w = sampler.sample(0xACCE5501, s);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < 2; ++c)
          dw[j * 2 + c] = w.coord(j + 1, c) - w.coord(j, c);
      for (int p = 0; p < 4; ++p) {
        const std::size_t pi = probe_idx[p];
        double acc0 = 0.0, acc1 = 0.0;
        for (std::size_t j = 0; j < pi; ++j) {
          const double wgt = wk[pi - j];
          acc0 += wgt * dw[j * 2 + 0];
          acc1 += wgt * dw[j * 2 + 1];
        }
        xs[(s * 4 + p) * 2 + 0] = acc0;
        xs[(s * 4 + p) * 2 + 1] = acc1;
      }
    }
  });

  // (a) covariance as quadratic forms u^T Q u at five probe pairs
  const std::pair<int, int> pairs[5] = {{0, 0}, {1, 1}, {3, 3}, {0, 2}, {1, 3}};
  double dirs[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {M_SQRT1_2, M_SQRT1_2}};
  double worst_cov_z = 0.0;
  for (const auto& pr : pairs) {
    const double ti = g.time(probe_idx[pr.first]);
    const double tj = g.time(probe_idx[pr.second]);
    HOperator qij = pred.field.at(ti, tj);
    HOperator qii = pred.field.at(ti, ti);
    HOperator qjj = pred.field.at(tj, tj);
    for (const auto& u : dirs) {
      double emp = 0.0;
      for (std::size_t s = 0; s < nmc; ++s) {
        const double yi = u[0] * xs[(s * 4 + pr.first) * 2 + 0] +
                          u[1] * xs[(s * 4 + pr.first) * 2 + 1];
        const double yj = u[0] * xs[(s * 4 + pr.second) * 2 + 0] +
                          u[1] * xs[(s * 4 + pr.second) * 2 + 1];
        emp += yi * yj;
      }
      emp /= static_cast<double>(nmc);
      auto quad = [&](const HOperator& m) {
        return u[0] * (m(0, 0) * u[0] + m(0, 1) * u[1]) +
               u[1] * (m(1, 0) * u[0] + m(1, 1) * u[1]);
      };
      const double want = quad(qij);
      const double var = quad(qii) * quad(qjj) + want * want;
      const double se = std::sqrt(var / static_cast<double>(nmc));
      worst_cov_z = std::max(worst_cov_z, std::abs(emp - want) / se);
    }
  }

  // (b) characteristic functional at 15 (f, t) probes
  double worst_cf_z = 0.0;
  for (int jf = 0; jf < 5; ++jf) {
    GaussianStream fs(0xF00D5EED, static_cast<std::uint64_t>(jf));
    double f[2] = {fs.next_normal(), fs.next_normal()};
    for (int p : {0, 1, 3}) {
      const double t = g.time(probe_idx[p]);
      HOperator qtt = pred.field.at(t, t);
      const double v = f[0] * (qtt(0, 0) * f[0] + qtt(0, 1) * f[1]) +
                       f[1] * (qtt(1, 0) * f[0] + qtt(1, 1) * f[1]);
      double emp = 0.0;
      for (std::size_t s = 0; s < nmc; ++s)
        emp += std::cos(f[0] * xs[(s * 4 + p) * 2 + 0] +
                        f[1] * xs[(s * 4 + p) * 2 + 1]);
      emp /= static_cast<double>(nmc);
      const double want = std::exp(-0.5 * v);
      const double var = 0.5 * (1.0 + std::exp(-2.0 * v)) - want * want;
      const double se = std::sqrt(var / static_cast<double>(nmc));
      worst_cf_z = std::max(worst_cf_z, std::abs(emp - want) / se);
    }
  }

  // (c) marginal excess kurtosis at the horizon
  double worst_kurt = 0.0;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> coord(nmc);
    for (std::size_t s = 0; s < nmc; ++s)
      coord[s] = xs[(s * 4 + 3) * 2 + c];
    worst_kurt =
        std::max(worst_kurt, std::abs(sample_moments(coord).excess_kurtosis));
  }
  const double kurt_band = 4.0 * std::sqrt(24.0 / static_cast<double>(nmc));

  const bool pass =
      worst_cov_z <= 4.0 && worst_cf_z <= 4.0 && worst_kurt <= kurt_band;
  record(5, "gaussian output law", pass,
         "cov |z| " + fmt(worst_cov_z) + ", charfn |z| " + fmt(worst_cf_z) +
             " (<= 4), kurtosis " + fmt(worst_kurt) + " (band " +
             fmt(kurt_band) + ")");
}

// ---------------------------------------------------------------- criterion 6
void criterion_6(const std::vector<MatrixRun>& matrix) {
  Grid g128(1.0, 128), g256(1.0, 256);
  bool growth_ok = true;
  double worst_growth = 0.0;
  double rmin = 1e300, rmax = 0.0;
  std::string detail;
  for (const MatrixRun& run : matrix) {
    const double zeta = (run.alpha - run.eta) / 2.0;
    const double tot_c =
        cov_seminorms(run.coarse.field, zeta, g128).total();
    const double tot_f = cov_seminorms(run.fine.field, zeta, g256).total();
    const double growth = tot_f / tot_c;
    worst_growth = std::max(worst_growth, growth);
    if (!(growth < 2.0)) growth_ok = false;
    const double ratio =
        tot_f / (run.ksem.total() * run.ksem.total() * run.qsem.total());
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  const double spread = rmax / rmin;
  const bool pass = growth_ok && spread < 3.0;
  record(6, "output regularity bounds", pass,
         "max seminorm growth 128->256: " + fmt(worst_growth) +
             " (< 2), bound-ratio spread " + fmt(spread) + " (< 3)");
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
  Grid g(1.0, 64);
  const HOperator one = HOperator::identity(1);
  VolterraKernel k = fractional_kernel(0.25, one);
  CovarianceField q = wiener_cov(one);
  Cov2DSpec base(k, q);
  const double zeta = 0.125;

  // (a) gap scales like the input distance under kernel perturbation
  std::vector<double> ratios;
  for (double eps : {0.1, 0.05, 0.025}) {
    Cov2DSpec pert(kernel_scale(1.0 + eps, k), q);
    StabilityGap sg = stability_gap(base, pert, zeta, g);
    ratios.push_back(sg.gap / sg.input_dist);
  }
  const double mean_r = (ratios[0] + ratios[1] + ratios[2]) / 3.0;
  double worst_dev = 0.0;
  for (double r : ratios)
    worst_dev = std::max(worst_dev, std::abs(r - mean_r) / mean_r);

  // (b) identical specs give an exactly zero gap
  StabilityGap same = stability_gap(base, base, zeta, g);
  const bool zero_ok = same.gap == 0.0 && same.input_dist == 0.0;

  // (c) exact linearity in the field: gap(Q, cQ) proportional to 1-c
  StabilityGap s25 = stability_gap(base, Cov2DSpec(k, cov_scale(0.25, q)), zeta, g);
  StabilityGap s75 = stability_gap(base, Cov2DSpec(k, cov_scale(0.75, q)), zeta, g);
  const double lin_dev =
      std::abs(s25.gap / 0.75 - s75.gap / 0.25) / (s25.gap / 0.75);

  const bool pass = worst_dev <= 0.30 && zero_ok && lin_dev <= 1e-10;
  record(7, "stability of the map", pass,
         "gap/dist spread " + fmt(worst_dev) + " (<= 0.3), zero gap " +
             (zero_ok ? "exact" : "NOT exact") + ", linearity dev " +
             fmt(lin_dev) + " (<= 1e-10)");
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
  // (a) alpha = 1 against the classical OU recursion
  Grid ga(1.0, 256);
  GridPath wa = wiener2(ga, 0x0FAC01);
  HOperator a(2);
  a(0, 0) = -0.6; a(0, 1) = 0.2; a(1, 0) = 0.2; a(1, 1) = -0.9;
  HVector y0(2);
  y0[0] = 0.5; y0[1] = -0.2;
  const double tol_a = 1e-8;
  GridPath ya = solve_frac_ou(FracOUSpec(1.0, a, y0, wa, 0.49), tol_a, 8);
  double err_a = 0.0;
  for (std::size_t i = 0; i <= 256; ++i) {
    HVector want = expm_sym(a, ga.time(i)).apply(y0);
    for (std::size_t j = 0; j < i; ++j) {
      HVector dw = wa.value(j + 1) - wa.value(j);
      want += expm_sym(a, ga.time(i) - ga.time(j)).apply(dw);
    }
    for (std::size_t c = 0; c < 2; ++c)
      err_a = std::max(err_a, std::abs(ya.coord(i, c) - want[c]));
  }
  const bool pass_a = err_a <= 5.0 * tol_a;

  // (b) deterministic fixed-point residual. The I^alpha in the check uses
  // the product-rectangle rule against a path with a t^{alpha-1} derivative
  // blow-up, so the residual obeys an O(h^alpha) law; assert the measured
  // level at N = 2048 and the refinement ratio from N = 512.
  const double alpha = 0.8, drift = -0.5, tol_b = 1e-5;
  auto residual_sup = [&](std::size_t n) {
    Grid gb(1.0, n);
    HVector y0b(1);
    y0b[0] = 0.3;
    FracOUSpec spec_b(alpha, HOperator::diagonal({drift}), y0b,
                      linear_driver(gb), 1.0);
    GridPath yb =
        solve_frac_ou(spec_b, tol_b, static_cast<std::size_t>(gb.level()));
    GridPath iy = frac_integral(yb, alpha);
    double worst = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = std::pow(gb.time(i), alpha) / gamma_fn(alpha + 1.0);
      worst = std::max(worst, std::abs(yb.coord(i, 0) -
                                       (y0b[0] + drift * iy.coord(i, 0) + x)));
    }
    return worst;
  };
  const double resid = residual_sup(2048);
  const double resid_c = residual_sup(512);
  const bool pass_b = resid <= 3e-3 && resid <= 0.5 * resid_c;

  // (c) Monte-Carlo covariance of the solved process
  Grid gc(1.0, 256);
  const std::size_t nmc = 10000;
  HOperator one = HOperator::identity(1);
  FracOUSpec spec_c(alpha, HOperator::diagonal({drift}), HVector(1),
                    GridPath(gc, 1), 0.49);
  CovIntegralResult predc =
      frac_ou_covariance(spec_c, wiener_cov(one), 1e-9);
  const std::size_t cprobe[5][2] = {
      {64, 64}, {128, 128}, {256, 256}, {64, 192}, {128, 256}};
  std::vector<double> ys(nmc * 4);
  const std::size_t yidx[4] = {64, 128, 192, 256};
  for_chunks(nmc, 100, [&](std::size_t, std::size_t lo, std::size_t hi) {
    SamplerConfig cfg;
    cfg.seed = 0x0FAC03;
    cfg.grid = gc;
    cfg.q0 = one;
    for (std::size_t s = lo; s < hi; ++s) {
      cfg.sample_index = s;
      GridPath w = sample_qwiener(cfg);
      FracOUSpec sp(alpha, HOperator::diagonal({drift}), HVector(1), w, 0.49);
      GridPath y = solve_frac_ou(sp, 1e-4, 8);
      for (int p = 0; p < 4; ++p) ys[s * 4 + p] = y.coord(yidx[p], 0);
    }
  });
  double worst_c = 0.0;
  for (const auto& pr : cprobe) {
    int pi = 0, pj = 0;
    for (int p = 0; p < 4; ++p) {
      if (yidx[p] == pr[0]) pi = p;
      if (yidx[p] == pr[1]) pj = p;
    }
    double emp = 0.0;
    for (std::size_t s = 0; s < nmc; ++s)
      emp += ys[s * 4 + pi] * ys[s * 4 + pj];
    emp /= static_cast<double>(nmc);
    const double ti = gc.time(pr[0]), tj = gc.time(pr[1]);
    const double want = predc.field.at(ti, tj)(0, 0);
    const double var = predc.field.at(ti, ti)(0, 0) *
                           predc.field.at(tj, tj)(0, 0) +
                       want * want;
    worst_c = std::max(worst_c, std::abs(emp - want) /
                                    std::sqrt(var / static_cast<double>(nmc)));
  }
  const bool pass_c = worst_c <= 4.0;

  // (d) kernel special-function identities
  double err_d = 0.0;
  for (double x : {-1.0, 0.5, 2.0})
    err_d = std::max(err_d, std::abs(mittag_leffler(1.0, 1.0, x) - std::exp(x)) /
                                std::exp(x));
  err_d = std::max(err_d, std::abs(mittag_leffler(2.0, 1.0, 1.3 * 1.3) -
                                   std::cosh(1.3)) /
                              std::cosh(1.3));
  for (double beta : {0.7, 1.0, 2.5})
    err_d = std::max(err_d, std::abs(mittag_leffler(0.7, beta, 0.0) -
                                     1.0 / gamma_fn(beta)));
  const bool pass_d = err_d <= 1e-12;

  record(8, "fractional ou solver", pass_a && pass_b && pass_c && pass_d,
         "classical gap " + fmt(err_a) + " (<= " + fmt(5.0 * tol_a) +
             "), residual " + fmt(resid) + " (<= 3e-3, ratio " +
             fmt(resid / resid_c) + " <= 0.5), mc |z| " + fmt(worst_c) +
             " (<= 4), ml err " + fmt(err_d) + " (<= 1e-12)");
}

// ---------------------------------------------------------------- criterion 9
void criterion_9() {
  VolterraKernel k = fractional_kernel(0.1, HOperator::identity(1));

  // smooth driver on a grid one level finer than the check, so the gap is a
  // real two-discretization disagreement (measured 1.8e-4), not rounding
  Grid g4(1.0, 4096);
  FubiniCheck smooth = fubini_check(k, k, linear_driver(g4), 1.0, 11);
  const bool pass_smooth = smooth.gap < 1e-3;

  // fixed rough sample: gap shrinks along a doubling-twice refinement ladder
  // and collapses to rounding once the level reaches the grid's resolution
  Grid g(1.0, 2048);
  FbmSampler sampler(g, 0.8, HOperator::identity(1));
  GridPath w = sampler.sample(0xF0B1, 1);
  std::vector<double> gaps;
  for (std::size_t lvl : {6, 8, 10})
    gaps.push_back(fubini_check(k, k, w, 1.0, lvl).gap);
  const double exact = fubini_check(k, k, w, 1.0, 11).gap;
  const bool decreasing = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  const bool collapses = exact <= 1e-12;

  record(9, "stochastic fubini identity",
         pass_smooth && decreasing && collapses,
         "smooth gap " + fmt(smooth.gap) + " (< 1e-3), sampled-path gaps " +
             fmt(gaps[0]) + " -> " + fmt(gaps[1]) + " -> " + fmt(gaps[2]) +
             (decreasing ? " decreasing" : " NOT decreasing") +
             ", full-depth gap " + fmt(exact) + " (<= 1e-12)");
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
  Grid g(1.0, 64);
  const HOperator one = HOperator::identity(1);
  RoughGate hi = rough_admissible(fbm_cov(0.75, one), g);
  RoughGate lo = rough_admissible(fbm_cov(0.25, one), g);
  RoughGate wn = rough_admissible(wiener_cov(one), g);
  const bool pass = hi.admissible && !lo.admissible && !wn.admissible &&
                    std::abs(wn.certified_exponent - 0.5) <= 1e-9;
  record(10, "rough-path admissibility", pass,
         "fbm0.75 " + std::string(hi.admissible ? "in" : "OUT") + " (cert " +
             fmt(hi.certified_exponent) + "), fbm0.25 " +
             (lo.admissible ? "IN" : "out") + ", wiener boundary " +
             (wn.admissible ? "IN" : "out") + " (cert " +
             fmt(wn.certified_exponent) + ")");
}

// --------------------------------------------------------------- criterion 11
void criterion_11() {
  const HOperator one = HOperator::identity(1);
  Grid g(1.0, 64);
  const std::size_t pairs[5][2] = {
      {16, 16}, {32, 32}, {64, 64}, {16, 48}, {32, 64}};
  auto fbm_r = [](double h, double s, double t) {
    const double e = 2.0 * h;
    return 0.5 *
           (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
  };

  // (a) second moments inside 3 CLT bands for three hurst indices
  double worst_mom_z = 0.0;
  const std::size_t nmc = 4000;
  for (double h : {0.3, 0.5, 0.8}) {
    FbmSampler sampler(g, h, one);
    std::vector<double> vals(nmc * 5);
    for_chunks(nmc, 250, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s) {
        GridPath p = sampler.sample(0x5A3B, s);
        for (int k = 0; k < 5; ++k)
          vals[s * 5 + k] =
              p.coord(pairs[k][0], 0) * p.coord(pairs[k][1], 0);
      }
    });
    for (int k = 0; k < 5; ++k) {
      double emp = 0.0;
      for (std::size_t s = 0; s < nmc; ++s) emp += vals[s * 5 + k];
      emp /= static_cast<double>(nmc);
      const double ti = g.time(pairs[k][0]), tj = g.time(pairs[k][1]);
      const double want = fbm_r(h, ti, tj);
      const double var = fbm_r(h, ti, ti) * fbm_r(h, tj, tj) + want * want;
      worst_mom_z = std::max(worst_mom_z,
                             std::abs(emp - want) /
                                 std::sqrt(var / static_cast<double>(nmc)));
    }
  }

  // (b) empirical holder exponents concentrate near h
  Grid gf(1.0, 1024);
  double worst_holder = 0.0;
  for (double h : {0.3, 0.5, 0.8}) {
    FbmSampler sampler(gf, h, one);
    std::vector<double> est(50);
    for_chunks(50, 5, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s)
        est[s] = empirical_holder_exponent(sampler.sample(0x401D, s));
    });
    std::sort(est.begin(), est.end());
    const double median = 0.5 * (est[24] + est[25]);
    worst_holder = std::max(worst_holder, std::abs(median - h));
  }

  // (c) bitwise reproducibility, including across worker counts
  bool reproducible = true;
  {
    FbmSampler sampler(g, 0.3, one);
    GridPath p1 = sampler.sample(42, 7);
    GridPath p2 = sampler.sample(42, 7);
    for (std::size_t i = 0; i <= 64; ++i)
      if (p1.coord(i, 0) != p2.coord(i, 0)) reproducible = false;

    std::vector<double> ends1(64), ends4(64);
    set_threads(1);
    for_chunks(64, 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s)
        ends1[s] = sampler.sample(7, s).coord(64, 0);
    });
    set_threads(4);
    for_chunks(64, 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s)
        ends4[s] = sampler.sample(7, s).coord(64, 0);
    });
    for (std::size_t s = 0; s < 64; ++s)
      if (ends1[s] != ends4[s]) reproducible = false;

    SamplerConfig cfg;
    cfg.seed = 3;
    cfg.grid = g;
    cfg.q0 = spd2();
    GridPath w1 = sample_qwiener(cfg);
    GridPath w2 = sample_qwiener(cfg);
    for (std::size_t i = 0; i <= 64; ++i)
      for (std::size_t c = 0; c < 2; ++c)
        if (w1.coord(i, c) != w2.coord(i, c)) reproducible = false;
  }

  const bool pass =
      worst_mom_z <= 3.0 && worst_holder <= 0.1 && reproducible;
  record(11, "driver sampler laws", pass,
         "moment |z| " + fmt(worst_mom_z) + " (<= 3), holder dev " +
             fmt(worst_holder) + " (<= 0.1), reproducible " +
             (reproducible ? "yes" : "NO"));
}

}  // namespace

int main() {
  set_threads(4);
  criterion_1();
  criterion_2();
  criterion_3();
  std::vector<MatrixRun> matrix = run_matrix();
  criterion_4(matrix);
  criterion_5();
  criterion_6(matrix);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();

  int failed = 0;
  for (const Line& l : g_lines)
    if (!l.pass) ++failed;
  std::printf("---\n%d of %d criteria passed\n",
              static_cast<int>(g_lines.size()) - failed,
              static_cast<int>(g_lines.size()));
  return failed == 0 ? 0 : 1;
}
