#include "volterra/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace volterra {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

}  // namespace

Grid::Grid(double horizon, std::size_t n_intervals) : horizon_(horizon), n_(n_intervals) {
  if (!(horizon > 0.0)) throw std::invalid_argument("Grid: horizon must be positive");
  if (!is_power_of_two(n_intervals)) {
    throw std::invalid_argument("Grid: interval count " + std::to_string(n_intervals) +
                                " is not a power of two");
  }
  level_ = log2_exact(n_intervals);
}

double Grid::time(std::size_t i) const {
  if (i > n_) throw std::invalid_argument("Grid::time: index out of range");
  return horizon_ * static_cast<double>(i) / static_cast<double>(n_);
}

GridPath::GridPath(Grid g, std::size_t dim)
    : grid_(g), dim_(dim), v_(g.points() * dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("GridPath: dimension must be positive");
}

HVector GridPath::value(std::size_t i) const {
  HVector x(dim_);
  for (std::size_t c = 0; c < dim_; ++c) x[c] = coord(i, c);
  return x;
}

void GridPath::set_value(std::size_t i, const HVector& x) {
  if (x.dim() != dim_) throw std::invalid_argument("GridPath::set_value: dimension mismatch");
  for (std::size_t c = 0; c < dim_; ++c) coord(i, c) = x[c];
}

HVector GridPath::interpolate(double t) const {
  const double T = grid_.horizon();
  if (t < 0.0 || t > T * (1.0 + 1e-12)) {
    throw std::invalid_argument("GridPath::interpolate: time outside [0, horizon]");
  }
  t = std::min(t, T);
  const double x = t / grid_.step();
  const std::size_t i = std::min(static_cast<std::size_t>(x), grid_.intervals() - 1);
  const double w = x - static_cast<double>(i);
  HVector out(dim_);
  for (std::size_t c = 0; c < dim_; ++c)
    out[c] = (1.0 - w) * coord(i, c) + w * coord(i + 1, c);
  return out;
}

VolterraGridPath::VolterraGridPath(Grid g, std::size_t dim)
    : grid_(g), dim_(dim), v_(offset(g.points()) * dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("VolterraGridPath: dimension must be positive");
}

HVector VolterraGridPath::value(std::size_t tau, std::size_t t) const {
  if (t > tau || tau > grid_.intervals()) {
    throw std::invalid_argument("VolterraGridPath::value: (tau,t) outside simplex");
  }
  HVector x(dim_);
  for (std::size_t c = 0; c < dim_; ++c) x[c] = coord(tau, t, c);
  return x;
}

void VolterraGridPath::set_value(std::size_t tau, std::size_t t, const HVector& x) {
  if (t > tau || tau > grid_.intervals()) {
    throw std::invalid_argument("VolterraGridPath::set_value: (tau,t) outside simplex");
  }
  for (std::size_t c = 0; c < dim_; ++c) coord(tau, t, c) = x[c];
}

double holder_seminorm(const GridPath& p, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("holder_seminorm: gamma must lie in (0,1]");
  }
  const std::size_t pts = p.grid().points();
  const std::size_t dim = p.dim();
  const double h = p.grid().step();
  double best = 0.0;
  // sup over lag of sup-increment / lag^gamma; increments grouped by lag so the
  // power is taken once per lag.
  for (std::size_t lag = 1; lag < pts; ++lag) {
    double sup2 = 0.0;
    for (std::size_t i = 0; i + lag < pts; ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = p.coord(i + lag, c) - p.coord(i, c);
        d2 += d * d;
      }
      sup2 = std::max(sup2, d2);
    }
    best = std::max(best, std::sqrt(sup2) / std::pow(static_cast<double>(lag) * h, gamma));
  }
  return best;
}

double volterra_seminorm_1(const VolterraGridPath& f, double gamma, double eta,
                           std::size_t max_points) {
  if (!(gamma > 0.0) || !(eta >= 0.0) || !(gamma - eta > 0.0)) {
    throw std::invalid_argument("volterra_seminorm_1: need gamma > eta >= 0");
  }
  const std::size_t pts = f.grid().points();
  const std::size_t dim = f.dim();
  const std::size_t stride = subsample_stride(pts, max_points);
  const double h = f.grid().step();
  double best = 0.0;
  for (std::size_t a = 0; a < pts; a += stride) {        // tau index
    for (std::size_t b = stride; b <= a; b += stride) {  // t index
      for (std::size_t c0 = 0; c0 < b; c0 += stride) {   // s index < t
        double n2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double d = f.coord(a, b, c) - f.coord(a, c0, c);
          n2 += d * d;
        }
        if (n2 == 0.0) continue;
        const double dtau_t = static_cast<double>(a - b) * h;
        const double dt_s = static_cast<double>(b - c0) * h;
        const double dtau_s = static_cast<double>(a - c0) * h;
        const double branch2 = std::pow(dtau_s, gamma - eta);
        double w = branch2;
        if (a != b) {
          const double branch1 = std::pow(dtau_t, -eta) * std::pow(dt_s, gamma);
          w = std::min(branch1, branch2);
        }
        best = std::max(best, std::sqrt(n2) / w);
      }
    }
  }
  return best;
}

double volterra_seminorm_12(const VolterraGridPath& f, double gamma, double eta,
                            const std::vector<double>& theta_grid,
                            const std::vector<double>& zeta_grid,
                            std::size_t max_points) {
  if (!(gamma > 0.0) || !(eta >= 0.0) || !(gamma - eta > 0.0)) {
    throw std::invalid_argument("volterra_seminorm_12: need gamma > eta >= 0");
  }
  if (theta_grid.empty() || zeta_grid.empty()) {
    throw std::invalid_argument("volterra_seminorm_12: empty exponent grid");
  }
  for (double z : zeta_grid) {
    if (z < 0.0 || z >= gamma - eta) {
      throw std::invalid_argument("volterra_seminorm_12: zeta grid must lie in [0, gamma-eta)");
    }
  }
  const double th_lo = *std::min_element(theta_grid.begin(), theta_grid.end());
  const double th_hi = *std::max_element(theta_grid.begin(), theta_grid.end());
  const double ze_lo = *std::min_element(zeta_grid.begin(), zeta_grid.end());
  const double ze_hi = *std::max_element(zeta_grid.begin(), zeta_grid.end());

  const std::size_t pts = f.grid().points();
  const std::size_t dim = f.dim();
  const std::size_t stride = subsample_stride(pts, max_points);
  const double h = f.grid().step();

  double best = 0.0;
  std::vector<double> num(dim);
  for (std::size_t a2 = stride; a2 < pts; a2 += stride) {      // tau'
    for (std::size_t a1 = 0; a1 < a2; a1 += stride) {          // tau < tau'
      for (std::size_t b = stride; b <= a1; b += stride) {     // t <= tau
        for (std::size_t s = 0; s < b; s += stride) {          // s < t
          double n2 = 0.0;
          for (std::size_t c = 0; c < dim; ++c) {
            const double d = f.coord(a2, b, c) - f.coord(a1, b, c) -
                             f.coord(a2, s, c) + f.coord(a1, s, c);
            n2 += d * d;
          }
          if (n2 == 0.0) continue;
          const double lnum = 0.5 * std::log(n2);
          const double X = static_cast<double>(a2 - a1) * h;  // tau'-tau > 0
          const double Y = static_cast<double>(a1 - b) * h;   // tau-t >= 0
          const double S = static_cast<double>(b - s) * h;    // t-s > 0
          const double Z = static_cast<double>(a1 - s) * h;   // tau-s > 0
          const double lX = std::log(X), lS = std::log(S), lZ = std::log(Z);

          if (a1 == b) {
            // Diagonal tau = t: weight reduces to X^theta * 0^{zeta-theta} * Z^{g-e-zeta};
            // only theta == zeta survives (0^0 := 1), branch one is +inf.
            for (double th : theta_grid) {
              for (double ze : zeta_grid) {
                if (th != ze) continue;
                const double lw = th * lX + (gamma - eta - ze) * lZ;
                best = std::max(best, std::exp(lnum - lw));
              }
            }
            continue;
          }

          const double lY = std::log(Y);
          // log-weight, branch 1: th*lX + (ze-th)*lY + (-eta-ze)*lY + gamma*lS
          // log-weight, branch 2: th*lX + (ze-th)*lY + (gamma-eta-ze)*lZ
          // ratio = exp(lnum - min(b1,b2)); linear in (th,ze) per branch, so the
          // grid sup sits at the corner points of the exponent box.
          const double ths[2] = {th_lo, th_hi};
          const double zes[2] = {ze_lo, ze_hi};
          for (double th : ths) {
            for (double ze : zes) {
              const double common = th * lX + (ze - th) * lY;
              const double b1 = common - (eta + ze) * lY + gamma * lS;
              const double b2 = common + (gamma - eta - ze) * lZ;
              best = std::max(best, std::exp(lnum - std::min(b1, b2)));
            }
          }
        }
      }
    }
  }
  return best;
}

double volterra_seminorm_12(const VolterraGridPath& f, double gamma, double eta,
                            std::size_t max_points) {
  const double zmax = (gamma - eta) * (1.0 - 1e-9);
  return volterra_seminorm_12(f, gamma, eta, uniform_grid(0.0, 1.0, 11),
                              uniform_grid(0.0, zmax, 11), max_points);
}

GridPath diagonal_restriction(const VolterraGridPath& f) {
  GridPath p(f.grid(), f.dim());
  for (std::size_t i = 0; i <= f.grid().intervals(); ++i) {
    for (std::size_t c = 0; c < f.dim(); ++c) p.coord(i, c) = f.coord(i, i, c);
  }
  return p;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi >= lo)) throw std::invalid_argument("uniform_grid: bad range");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::size_t subsample_stride(std::size_t points, std::size_t max_points) {
  if (max_points < 2) throw std::invalid_argument("subsample_stride: max_points < 2");
  return points <= max_points ? 1 : (points + max_points - 1) / max_points;
}

}  // namespace volterra
