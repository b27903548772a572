#include "volterra/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "volterra/parallel.hpp"
#include "volterra/special.hpp"

namespace volterra {

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_exponent_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
  for (double v : g) {
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument(std::string(name) + " grid value " +
                                  fmt_double(v) + " outside [0,1]");
  }
}

std::pair<double, double> grid_extremes(const std::vector<double>& g) {
  double lo = g.front(), hi = g.front();
  for (double v : g) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {lo, hi};
}

// Uniformly subsampled index lattice over the grid points. Power-of-two
// grids land exactly on the endpoint, so the lattice is itself uniform.
std::vector<std::size_t> sup_lattice(const Grid& grid, std::size_t max_points) {
  const std::size_t pts = grid.points();
  const std::size_t stride = subsample_stride(pts, max_points);
  std::vector<std::size_t> idx;
  idx.reserve(pts / stride + 1);
  for (std::size_t i = 0; i < pts; i += stride) idx.push_back(i);
  return idx;
}

// Kernel evaluations for every lattice pair, computed once. For stationary
// kernels only one operator per distinct gap is needed.
struct KernelTable {
  bool by_gap_valid = false;
  std::vector<double> t;             // lattice times; t[0] == 0
  std::vector<HOperator> gap_ops;    // [m] = K at gap t[m], m >= 1
  std::vector<HOperator> pair_ops;   // triangular: (i,j), i > j

  const HOperator& operator()(std::size_t i, std::size_t j) const {
    return by_gap_valid ? gap_ops[i - j] : pair_ops[i * (i - 1) / 2 + j];
  }
};

KernelTable build_table(const VolterraKernel& k, const Grid& grid,
                        std::size_t max_points) {
  if (!k.eval && !(k.stationary && k.eval_gap))
    throw std::invalid_argument("kernel has no evaluator");
  KernelTable tab;
  const std::vector<std::size_t> idx = sup_lattice(grid, max_points);
  const std::size_t p = idx.size();
  tab.t.resize(p);
  for (std::size_t i = 0; i < p; ++i) tab.t[i] = grid.time(idx[i]);
  tab.by_gap_valid = k.stationary && static_cast<bool>(k.eval_gap);
  if (tab.by_gap_valid) {
    tab.gap_ops.reserve(p);
    tab.gap_ops.emplace_back();  // gap 0 placeholder, never read
    for (std::size_t m = 1; m < p; ++m) tab.gap_ops.push_back(k.eval_gap(tab.t[m]));
  } else {
    tab.pair_ops.reserve(p * (p - 1) / 2);
    for (std::size_t i = 1; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j)
        tab.pair_ops.push_back(k.eval(tab.t[i], tab.t[j]));
  }
  return tab;
}

constexpr std::size_t kPairTriplePoints = 129;
constexpr std::size_t kQuadPoints = 33;

}  // namespace

HOperator VolterraKernel::at(double tau, double s) const {
  if (!(s < tau))
    throw std::invalid_argument("kernel evaluation needs s < tau, got s = " +
                                fmt_double(s) + ", tau = " + fmt_double(tau));
  if (stationary && eval_gap) return eval_gap(tau - s);
  if (!eval) throw std::invalid_argument("kernel has no evaluator");
  return eval(tau, s);
}

VolterraKernel fractional_kernel(double eta, const HOperator& a) {
  if (!(eta > 0.0) || !(eta < 1.0))
    throw std::invalid_argument("fractional_kernel: eta must lie in (0,1), got " +
                                fmt_double(eta));
  VolterraKernel k;
  k.eta = eta;
  k.dim = a.dim();
  k.label = "frac:eta=" + fmt_double(eta);
  k.stationary = true;
  k.eval_gap = [eta, a](double gap) { return std::pow(gap, -eta) * a; };
  k.eval = [eta, a](double tau, double s) { return std::pow(tau - s, -eta) * a; };
  return k;
}

VolterraKernel ml_kernel(double alpha, double beta, const HOperator& a) {
  // alpha = 1 is admitted on purpose: the kernel then collapses to the
  // matrix exponential e^{A(tau-s)}, the classical Ornstein-Uhlenbeck case.
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("ml_kernel: alpha must lie in (0,1], got " +
                                fmt_double(alpha));
  if (!(beta > 0.0))
    throw std::invalid_argument("ml_kernel: beta must be positive, got " +
                                fmt_double(beta));
  VolterraKernel k;
  k.eta = 1.0 - alpha;
  k.dim = a.dim();
  k.label = "ml:alpha=" + fmt_double(alpha) + ",beta=" + fmt_double(beta);
  k.stationary = true;
  k.eval_gap = [alpha, beta, a](double gap) {
    return std::pow(gap, alpha - 1.0) *
           mittag_leffler(alpha, beta, std::pow(gap, alpha) * a);
  };
  auto g = k.eval_gap;
  k.eval = [g](double tau, double s) { return g(tau - s); };
  return k;
}

VolterraKernel exp_kernel(double a, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("exp_kernel: dim must be positive");
  VolterraKernel k;
  k.eta = 0.0;
  k.dim = dim;
  k.label = "exp:a=" + fmt_double(a);
  k.stationary = true;
  k.eval_gap = [a, dim](double gap) {
    return std::exp(-a * gap) * HOperator::identity(dim);
  };
  k.eval = [a, dim](double tau, double s) {
    return std::exp(-a * (tau - s)) * HOperator::identity(dim);
  };
  return k;
}

VolterraKernel identity_kernel(std::size_t dim) {
  VolterraKernel k = exp_kernel(0.0, dim);
  k.label = "id";
  return k;
}

VolterraKernel kernel_adjoint(const VolterraKernel& k) {
  VolterraKernel out;
  out.eta = k.eta;
  out.dim = k.dim;
  out.label = k.label + "^*";
  out.stationary = k.stationary;
  if (k.eval_gap) {
    auto base = k.eval_gap;
    out.eval_gap = [base](double gap) { return base(gap).adjoint(); };
  }
  if (k.eval) {
    auto base = k.eval;
    out.eval = [base](double tau, double s) { return base(tau, s).adjoint(); };
  }
  return out;
}

VolterraKernel kernel_scale(double c, const VolterraKernel& k) {
  VolterraKernel out;
  out.eta = k.eta;
  out.dim = k.dim;
  out.label = fmt_double(c) + "*(" + k.label + ")";
  out.stationary = k.stationary;
  if (k.eval_gap) {
    auto base = k.eval_gap;
    out.eval_gap = [c, base](double gap) { return c * base(gap); };
  }
  if (k.eval) {
    auto base = k.eval;
    out.eval = [c, base](double tau, double s) { return c * base(tau, s); };
  }
  return out;
}

VolterraKernel kernel_difference(const VolterraKernel& a, const VolterraKernel& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("kernel_difference: dimension mismatch (" +
                                std::to_string(a.dim) + " vs " +
                                std::to_string(b.dim) + ")");
  VolterraKernel out;
  out.eta = a.eta > b.eta ? a.eta : b.eta;
  out.dim = a.dim;
  out.label = a.label + " - " + b.label;
  out.stationary = a.stationary && b.stationary;
  if (out.stationary && a.eval_gap && b.eval_gap) {
    auto ga = a.eval_gap, gb = b.eval_gap;
    out.eval_gap = [ga, gb](double gap) { return ga(gap) - gb(gap); };
  }
  auto ea = a.eval, eb = b.eval;
  if (ea && eb)
    out.eval = [ea, eb](double tau, double s) { return ea(tau, s) - eb(tau, s); };
  else if (out.eval_gap) {
    auto g = out.eval_gap;
    out.eval = [g](double tau, double s) { return g(tau - s); };
  }
  return out;
}

double seminorm_k1(const VolterraKernel& k, const Grid& grid) {
  const KernelTable tab = build_table(k, grid, kPairTriplePoints);
  const std::size_t p = tab.t.size();
  const double eta = k.eta;
  if (tab.by_gap_valid) {
    double best = 0.0;
    for (std::size_t m = 1; m < p; ++m) {
      const double r = op_norm(tab.gap_ops[m]) * std::pow(tab.t[m], eta);
      if (r > best) best = r;
    }
    return best;
  }
  return max_chunks(p, 8, [&](std::size_t lo, std::size_t hi) {
    double best = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double r = op_norm(tab(i, j)) * std::pow(tab.t[i] - tab.t[j], eta);
        if (r > best) best = r;
      }
    return best;
  });
}

// k2 ratio with t-s = g1, u-s = g2 < g1: ||K(t,s)-K(u,s)|| * g2^eta * (g2/(g1-g2))^theta.
double seminorm_k2(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid) {
  check_exponent_grid(theta_grid, "theta");
  const auto [th_lo, th_hi] = grid_extremes(theta_grid);
  const KernelTable tab = build_table(k, grid, kPairTriplePoints);
  const std::size_t p = tab.t.size();
  const double eta = k.eta;

  auto ratio = [&](const HOperator& diff, double x, double a) {
    // x = t-u > 0, a = u-s > 0; log-linear in theta, so the grid sup sits
    // at an extreme.
    const double theta = a > x ? th_hi : th_lo;
    return op_norm(diff) * std::pow(a, eta) * std::pow(a / x, theta);
  };

  if (tab.by_gap_valid) {
    double best = 0.0;
    for (std::size_t g1 = 2; g1 < p; ++g1)
      for (std::size_t g2 = 1; g2 < g1; ++g2) {
        const double r = ratio(tab.gap_ops[g1] - tab.gap_ops[g2],
                               tab.t[g1] - tab.t[g2], tab.t[g2]);
        if (r > best) best = r;
      }
    return best;
  }
  return max_chunks(p, 1, [&](std::size_t lo, std::size_t hi) {
    double best = 0.0;
    for (std::size_t i = lo; i < hi; ++i)        // t
      for (std::size_t j = 1; j < i; ++j)        // u
        for (std::size_t l = 0; l < j; ++l) {    // s
          const double r = ratio(tab(i, l) - tab(j, l), tab.t[i] - tab.t[j],
                                 tab.t[j] - tab.t[l]);
          if (r > best) best = r;
        }
    return best;
  });
}

// k3 ratio with t-u = a, u-s = d: ||K(t,u)-K(t,s)|| * a^eta * (a/d)^theta.
double seminorm_k3(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid) {
  check_exponent_grid(theta_grid, "theta");
  const auto [th_lo, th_hi] = grid_extremes(theta_grid);
  const KernelTable tab = build_table(k, grid, kPairTriplePoints);
  const std::size_t p = tab.t.size();
  const double eta = k.eta;

  auto ratio = [&](const HOperator& diff, double a, double d) {
    const double theta = a > d ? th_hi : th_lo;
    return op_norm(diff) * std::pow(a, eta) * std::pow(a / d, theta);
  };

  if (tab.by_gap_valid) {
    double best = 0.0;
    // gaps a = t-u < b = t-s; d = u-s = b-a.
    for (std::size_t b = 2; b < p; ++b)
      for (std::size_t a = 1; a < b; ++a) {
        const double r = ratio(tab.gap_ops[a] - tab.gap_ops[b], tab.t[a],
                               tab.t[b] - tab.t[a]);
        if (r > best) best = r;
      }
    return best;
  }
  return max_chunks(p, 1, [&](std::size_t lo, std::size_t hi) {
    double best = 0.0;
    for (std::size_t i = lo; i < hi; ++i)        // t
      for (std::size_t j = 1; j < i; ++j)        // u
        for (std::size_t l = 0; l < j; ++l) {    // s
          const double r = ratio(tab(i, j) - tab(i, l), tab.t[i] - tab.t[j],
                                 tab.t[j] - tab.t[l]);
          if (r > best) best = r;
        }
    return best;
  });
}

// k4 ratio over (tau', tau, s, r) with x = tau'-tau, y = tau-s, z = s-r:
// num * y^eta * (y/x)^nu * (y/z)^theta. The singular weight references the
// approach distance tau-s between the upper pair and the top lower point,
// matching the k2/k3 weights; weighting by tau-r instead would make the sup
// diverge like step^-eta for the fractional kernel (spread quadruples with
// s one cell below tau keep the other factors O(1) while the box retains
// the full singularity).
double seminorm_k4(const VolterraKernel& k, const Grid& grid,
                   const std::vector<double>& theta_grid,
                   const std::vector<double>& nu_grid) {
  check_exponent_grid(theta_grid, "theta");
  check_exponent_grid(nu_grid, "nu");
  const auto [th_lo, th_hi] = grid_extremes(theta_grid);
  const auto [nu_lo, nu_hi] = grid_extremes(nu_grid);
  const KernelTable tab = build_table(k, grid, kQuadPoints);
  const std::size_t p = tab.t.size();
  const double eta = k.eta;

  auto ratio = [&](const HOperator& box, double x, double y, double z) {
    const double nu = y > x ? nu_hi : nu_lo;
    const double theta = y > z ? th_hi : th_lo;
    return op_norm(box) * std::pow(y, eta) * std::pow(y / x, nu) *
           std::pow(y / z, theta);
  };

  if (tab.by_gap_valid) {
    // Gaps in lattice units: tau-s = Y, s-r = Z, tau'-tau = X, all >= 1.
    double best = 0.0;
    for (std::size_t y = 1; y + 2 < p; ++y)
      for (std::size_t z = 1; y + z + 1 < p; ++z)
        for (std::size_t x = 1; x + y + z < p; ++x) {
          const HOperator box = tab.gap_ops[x + y] - tab.gap_ops[x + y + z] -
                                tab.gap_ops[y] + tab.gap_ops[y + z];
          const double r =
              ratio(box, tab.t[x], tab.t[y], tab.t[z]);
          if (r > best) best = r;
        }
    return best;
  }
  return max_chunks(p, 1, [&](std::size_t lo, std::size_t hi) {
    double best = 0.0;
    for (std::size_t i2 = lo; i2 < hi; ++i2)       // tau'
      for (std::size_t i1 = 2; i1 < i2; ++i1)      // tau
        for (std::size_t j = 1; j < i1; ++j)       // s
          for (std::size_t l = 0; l < j; ++l) {    // r
            const HOperator box =
                tab(i2, j) - tab(i2, l) - tab(i1, j) + tab(i1, l);
            const double r = ratio(box, tab.t[i2] - tab.t[i1],
                                   tab.t[i1] - tab.t[j], tab.t[j] - tab.t[l]);
            if (r > best) best = r;
          }
    return best;
  });
}

KernelSeminorms kernel_seminorms(const VolterraKernel& k, const Grid& grid) {
  const std::vector<double> unit = uniform_grid(0.0, 1.0, 11);
  return kernel_seminorms(k, grid, unit, unit);
}

KernelSeminorms kernel_seminorms(const VolterraKernel& k, const Grid& grid,
                                 const std::vector<double>& theta_grid,
                                 const std::vector<double>& nu_grid) {
  KernelSeminorms out;
  out.theta_grid = theta_grid;
  out.nu_grid = nu_grid;
  out.k1 = seminorm_k1(k, grid);
  out.k2 = seminorm_k2(k, grid, theta_grid);
  out.k3 = seminorm_k3(k, grid, theta_grid);
  out.k4 = seminorm_k4(k, grid, theta_grid, nu_grid);
  return out;
}

}  // namespace volterra
