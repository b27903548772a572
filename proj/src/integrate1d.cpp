#include "volterra/integrate1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"

namespace volterra {

namespace {

std::size_t grid_index(const Grid& g, double t, const char* who) {
  const double h = g.step();
  const long long i = std::llround(t / h);
  if (i < 0 || i > static_cast<long long>(g.intervals()) ||
      std::abs(t - static_cast<double>(i) * h) >
          1e-9 * std::max(1.0, g.horizon()))
    throw std::invalid_argument(std::string(who) +
                                ": time is not a grid point");
  return static_cast<std::size_t>(i);
}

// out += K * (W(hi) - W(lo)), written against the flat coordinate accessors
// so the simplex sweep does not churn HVector temporaries.
void accum_cell(const HOperator& k, const GridPath& w, std::size_t hi,
                std::size_t lo, double* out) {
  const std::size_t d = k.dim();
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c)
      s += k(r, c) * (w.coord(hi, c) - w.coord(lo, c));
    out[r] += s;
  }
}

}  // namespace

IntegrandSpec::IntegrandSpec(VolterraKernel k, GridPath w, double g)
    : kernel(std::move(k)), driver(std::move(w)), gamma(g) {
  if (!(gamma - kernel.eta > 0.0))
    throw std::invalid_argument(
        "IntegrandSpec: Young condition gamma - eta > 0 fails");
  if (driver.dim() != kernel.dim)
    throw std::invalid_argument(
        "IntegrandSpec: driver dimension does not match the kernel");
}

HVector riemann_sum(const IntegrandSpec& spec, double tau, double t,
                    std::size_t level) {
  if (tau < t) throw std::invalid_argument("riemann_sum: needs t <= tau");
  const Grid& g = spec.driver.grid();
  if (static_cast<int>(level) > g.level())
    throw std::invalid_argument(
        "riemann_sum: level exceeds the grid resolution");
  const std::size_t it = grid_index(g, t, "riemann_sum");
  const std::size_t stride = g.intervals() >> level;

  HVector acc(spec.kernel.dim);
  std::size_t u = 0;
  while (u < it) {
    const std::size_t v = std::min(u + stride, it);
    const HOperator k = spec.kernel.at(tau, g.time(u));
    accum_cell(k, spec.driver, v, u, &acc[0]);
    u = v;
  }
  return acc;
}

Volterra1DResult volterra_integral(const IntegrandSpec& spec,
                                   std::size_t max_level, double tol) {
  const Grid& g = spec.driver.grid();
  if (static_cast<int>(max_level) > g.level())
    throw std::invalid_argument(
        "volterra_integral: max_level exceeds the grid resolution");
  if (!(tol > 0.0))
    throw std::invalid_argument("volterra_integral: tol must be positive");

  const std::size_t n = g.intervals();
  const std::size_t dim = spec.kernel.dim;
  const GridPath& w = spec.driver;

  Volterra1DResult res;
  res.values = VolterraGridPath(g, dim);
  res.levels.assign((n + 1) * (n + 2) / 2, 0);

  // Stationary kernels share K(tau, s) = k(tau - s) across rows; the gap
  // table is the dominant cost saver for the mittag-leffler family.
  std::vector<HOperator> gap_ops;
  if (spec.kernel.stationary) {
    gap_ops.resize(n + 1);
    for (std::size_t gi = 1; gi <= n; ++gi)
      gap_ops[gi] = spec.kernel.eval_gap(static_cast<double>(gi) * g.step());
  }

  std::vector<std::size_t> row_unconverged(n + 1, 0);

  // Rows of the simplex are independent; each is swept level-by-level with a
  // strided prefix walk, so a whole row at one level costs O(row length).
  for_chunks(n + 1, 1, [&](std::size_t, std::size_t row, std::size_t) {
    const std::size_t i = row;
    const double tau = g.time(i);
    const std::size_t len = i + 1;

    std::vector<HOperator> cache;
    std::vector<char> have;
    if (!spec.kernel.stationary) {
      cache.resize(i);
      have.assign(i, 0);
    }
    auto op_at = [&](std::size_t j) -> const HOperator& {
      if (spec.kernel.stationary) return gap_ops[i - j];
      if (!have[j]) {
        cache[j] = spec.kernel.at(tau, g.time(j));
        have[j] = 1;
      }
      return cache[j];
    };

    std::vector<double> cur(len * dim, 0.0), prev(len * dim, 0.0);
    std::vector<double> full(dim);
    std::vector<char> done(len, 0), prev_small(len, 0);
    std::vector<double> last_diff(len, 0.0);
    std::size_t n_done = 0;

    const std::size_t off = i * (i + 1) / 2;
    std::size_t lvl = 0;
    for (; lvl <= max_level; ++lvl) {
      const std::size_t stride = n >> lvl;
      std::fill(full.begin(), full.end(), 0.0);
      std::size_t last = 0;
      for (std::size_t j = 1; j < len; ++j) {
        if (j % stride == 0) {
          accum_cell(op_at(last), w, j, last, full.data());
          last = j;
        }
        double* dst = &cur[j * dim];
        std::copy(full.begin(), full.end(), dst);
        if (j != last) accum_cell(op_at(last), w, j, last, dst);
      }

      if (lvl >= 1) {
        for (std::size_t j = 0; j < len; ++j) {
          if (done[j]) continue;
          // The level-l partition of [0, t_j] only differs from the coarser
          // one when the stride drops below j; until then the value is
          // bit-identical and a zero diff would fake convergence.
          if (j <= stride) continue;
          double d2 = 0.0;
          for (std::size_t c = 0; c < dim; ++c) {
            const double d = cur[j * dim + c] - prev[j * dim + c];
            d2 += d * d;
          }
          const double diff = std::sqrt(d2);
          last_diff[j] = diff;
          const bool small = diff < tol;
          if (lvl >= 2 && small && prev_small[j]) {
            done[j] = 1;
            ++n_done;
            res.levels[off + j] = static_cast<std::uint8_t>(lvl);
            for (std::size_t c = 0; c < dim; ++c)
              res.values.coord(i, j, c) = cur[j * dim + c];
          }
          prev_small[j] = small ? 1 : 0;
        }
        if (n_done == len && lvl < max_level) break;
      }
      cur.swap(prev);
    }

    const std::vector<double>& final_row = (lvl <= max_level) ? cur : prev;
    for (std::size_t j = 0; j < len; ++j) {
      if (done[j]) continue;
      res.levels[off + j] = static_cast<std::uint8_t>(max_level);
      for (std::size_t c = 0; c < dim; ++c)
        res.values.coord(i, j, c) = final_row[j * dim + c];
      if (last_diff[j] >= tol && max_level >= 1) ++row_unconverged[i];
    }
  });

  for (std::size_t i = 0; i <= n; ++i) res.unconverged += row_unconverged[i];
  return res;
}

SewingDefect sewing_defect(const IntegrandSpec& spec, double tau, double t,
                           double s, std::size_t level, double beta,
                           double kappa) {
  if (s > t || t > tau)
    throw std::invalid_argument("sewing_defect: needs s <= t <= tau");
  SewingDefect out;
  if (t == s) return out;  // germ and integral both vanish on empty intervals

  const HVector i_t = riemann_sum(spec, tau, t, level);
  const HVector i_s = riemann_sum(spec, tau, s, level);
  const Grid& g = spec.driver.grid();
  const std::size_t is = grid_index(g, s, "sewing_defect");
  const std::size_t it = grid_index(g, t, "sewing_defect");
  const HOperator k = spec.kernel.at(tau, s);
  const HVector germ =
      k.apply(spec.driver.value(it) - spec.driver.value(is));
  out.defect = norm(i_t - i_s - germ);

  const double b1 =
      tau > t ? std::pow(tau - t, -kappa) * std::pow(t - s, beta)
              : std::numeric_limits<double>::infinity();
  const double b2 = std::pow(tau - s, beta - kappa);
  out.weight = std::min(b1, b2);
  return out;
}

RefinementReport convergence_study(
    const IntegrandSpec& spec,
    const std::vector<std::pair<double, double>>& probes,
    const std::vector<std::size_t>& levels) {
  if (levels.size() < 3)
    throw std::invalid_argument(
        "convergence_study: need at least three levels to fit a rate");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (levels[k] <= levels[k - 1])
      throw std::invalid_argument(
          "convergence_study: levels must be strictly increasing");
  if (probes.empty())
    throw std::invalid_argument("convergence_study: no probes given");
  const double horizon = spec.driver.grid().horizon();
  for (const auto& p : probes)
    if (p.second > p.first || p.first > horizon * (1.0 + 1e-12))
      throw std::invalid_argument(
          "convergence_study: probe outside the simplex");

  RefinementReport rep;
  rep.levels = levels;
  rep.values.resize(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    rep.values[k].reserve(probes.size());
    for (const auto& p : probes)
      rep.values[k].push_back(riemann_sum(spec, p.first, p.second, levels[k]));
  }
  for (std::size_t k = 1; k < levels.size(); ++k) {
    double d = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p)
      d = std::max(d, norm(rep.values[k][p] - rep.values[k - 1][p]));
    rep.diffs.push_back(d);
  }

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < rep.diffs.size(); ++k) {
    if (rep.diffs[k] > 0.0) {
      xs.push_back(static_cast<double>(levels[k + 1]) * std::log(2.0));
      ys.push_back(std::log(rep.diffs[k]));
    }
  }
  rep.fitted_rate = xs.size() < 2 ? std::numeric_limits<double>::infinity()
                                  : -lsq_slope(xs, ys);

  const double theta_star = std::min(1.0, 1.0 + 0.01 - spec.gamma);
  rep.target_rate = spec.gamma + theta_star - 1.0;
  return rep;
}

}  // namespace volterra
