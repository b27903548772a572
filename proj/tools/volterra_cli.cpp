// Command-line front end: sampling, pathwise Volterra integration, covariance
// fields, fractional OU, rough-volatility moments, Monte-Carlo verification.
//
// Exit codes: 0 success, 1 contract violation (bad inputs, inadmissible
// specs, failed verification), 2 flagged non-convergence, 64 usage errors.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
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
#include "volterra/serialize.hpp"
#include "volterra/stats.hpp"

using namespace volterra;
using nlohmann::json;

namespace {

std::uint64_t env_seed_override(std::uint64_t seed) {
  const char* s = std::getenv("VOLTERRA_SEED");
  if (s == nullptr || *s == '\0') return seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') {
    throw std::invalid_argument("VOLTERRA_SEED must be an unsigned integer");
  }
  return v;
}

double to_num(const std::string& s, const char* who) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::invalid_argument(std::string(who) + ": not a number: '" + s +
                                "'");
  }
  return v;
}

struct DriverLaw {
  SamplerKind kind = SamplerKind::wiener;
  double h = 0.5;
};

// Sampler selection reuses the covariance-field string so one flag names
// both the law to sample from and the field to integrate against.
DriverLaw driver_law(const std::string& text, const char* who) {
  if (text == "wiener") return {};
  if (text.rfind("fbm:h=", 0) == 0) {
    return {SamplerKind::fbm, to_num(text.substr(6), who)};
  }
  throw std::invalid_argument(std::string(who) +
                              ": driver must be 'wiener' or 'fbm:h=<v>'");
}

std::vector<GridPath> sample_batch(const DriverLaw& law, const Grid& g,
                                   const HOperator& q0, std::uint64_t seed,
                                   std::size_t samples) {
  std::vector<GridPath> out(samples);
  if (law.kind == SamplerKind::fbm) {
    const FbmSampler sampler(g, law.h, q0);
    for_chunks(samples, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s) out[s] = sampler.sample(seed, s);
    });
  } else {
    for_chunks(samples, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s) {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.sample_index = s;
        cfg.grid = g;
        cfg.q0 = q0;
        cfg.kind = SamplerKind::wiener;
        out[s] = sample_qwiener(cfg);
      }
    });
  }
  return out;
}

json refinement_json(const RefinementReport& r) {
  json j{{"levels", r.levels},
         {"diffs", r.diffs},
         {"target_rate", r.target_rate}};
  if (std::isfinite(r.fitted_rate)) {
    j["fitted_rate"] = r.fitted_rate;
  } else {
    j["fitted_rate"] = nullptr;  // fewer than two nonzero diffs
  }
  return j;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string kind = "wiener";
  double h = 0.5;
  std::string q0;
  std::size_t grid_n = 256;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
  if (o.kind != "wiener" && o.kind != "fbm") {
    throw std::invalid_argument("simulate: --kind must be wiener or fbm");
  }
  const HOperator q0 = load_operator(o.q0);
  const Grid g(o.horizon, o.grid_n);
  DriverLaw law;
  if (o.kind == "fbm") law = {SamplerKind::fbm, o.h};
  const std::vector<GridPath> batch =
      sample_batch(law, g, q0, env_seed_override(o.seed), o.samples);
  save_paths_csv(batch, o.out);
  return 0;
}

// -------------------------------------------------------------- integrate1d

struct Integrate1DOpts {
  std::string kernel;
  std::string driver;
  double gamma = 0.8;
  double tol = 1e-6;
  std::size_t max_level = 0;  // 0 -> grid level
  std::string out;
  std::string report;
};

int cmd_integrate1d(const Integrate1DOpts& o) {
  GridPath driver = load_path_csv(o.driver);
  const Grid g = driver.grid();
  const std::size_t dim = driver.dim();
  const VolterraKernel k = parse_kernel(o.kernel, dim);
  IntegrandSpec spec(k, std::move(driver), o.gamma);
  const std::size_t max_level =
      o.max_level == 0 ? static_cast<std::size_t>(g.level()) : o.max_level;
  const Volterra1DResult res = volterra_integral(spec, max_level, o.tol);
  save_paths_csv({diagonal_restriction(res.values)}, o.out);
  if (!o.report.empty()) {
    const std::size_t entries = (g.points() * (g.points() + 1)) / 2;
    save_json_file(json{{"kernel", k.label},
                        {"gamma", o.gamma},
                        {"tol", o.tol},
                        {"max_level", max_level},
                        {"grid_n", g.intervals()},
                        {"dim", dim},
                        {"entries", entries},
                        {"unconverged", res.unconverged}},
                   o.report);
  }
  if (res.unconverged > 0) {
    std::cerr << "integrate1d: " << res.unconverged
              << " simplex entries did not converge\n";
    return 2;
  }
  return 0;
}

// -------------------------------------------------------------------- cov2d

struct Cov2DOpts {
  std::string kernel;
  std::string kernel_prime;
  std::string cov;
  std::string q0;
  std::size_t grid_n = 256;
  double horizon = 1.0;
  double tol = 1e-4;
  std::size_t max_level = 0;
  std::string out;
  std::string report;
};

int cmd_cov2d(const Cov2DOpts& o) {
  const HOperator q0 = load_operator(o.q0);
  const CovarianceField qw = parse_cov(o.cov, q0);
  const VolterraKernel k = parse_kernel(o.kernel, q0.dim());
  const Cov2DSpec spec =
      o.kernel_prime.empty()
          ? Cov2DSpec(k, qw)
          : Cov2DSpec(k, parse_kernel(o.kernel_prime, q0.dim()), qw, qw.alpha);
  const Grid g(o.horizon, o.grid_n);
  const std::size_t max_level =
      o.max_level == 0 ? static_cast<std::size_t>(g.level()) : o.max_level;
  const CovIntegralResult res = cov_integral(spec, g, max_level, o.tol);
  save_json_file(field_to_json(res.field, g), o.out);
  if (!o.report.empty()) {
    json j = refinement_json(res.report);
    j["boundary1"] = res.boundary1;
    j["boundary2"] = res.boundary2;
    j["unconverged"] = res.unconverged;
    j["alpha"] = spec.alpha;
    save_json_file(j, o.report);
  }
  if (res.unconverged > 0) {
    std::cerr << "cov2d: " << res.unconverged << " grid pairs did not converge\n";
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------------- fracou

struct FracOUOpts {
  double alpha = 0.8;
  std::string a;
  std::string y0;
  std::string driver;
  double gamma = 0.8;
  double tol = 1e-8;
  std::size_t max_level = 0;
  std::string out;
  std::string report;
};

int cmd_fracou(const FracOUOpts& o) {
  const HVector y0 = load_vector(o.y0);
  const HOperator a = parse_operator_arg(o.a, y0.dim());
  GridPath driver = load_path_csv(o.driver);
  const Grid g = driver.grid();
  const FracOUSpec spec(o.alpha, a, y0, std::move(driver), o.gamma);
  const std::size_t max_level =
      o.max_level == 0 ? static_cast<std::size_t>(g.level()) : o.max_level;
  std::size_t unconverged = 0;
  const GridPath y = solve_frac_ou(spec, o.tol, max_level, &unconverged);
  save_paths_csv({y}, o.out);
  if (!o.report.empty()) {
    save_json_file(json{{"alpha", o.alpha},
                        {"gamma", o.gamma},
                        {"tol", o.tol},
                        {"max_level", max_level},
                        {"grid_n", g.intervals()},
                        {"unconverged", unconverged}},
                   o.report);
  }
  if (unconverged > 0) {
    std::cerr << "fracou: " << unconverged
              << " convolution entries did not converge\n";
    return 2;
  }
  return 0;
}

// --------------------------------------------------------------- fracou-cov

struct FracOUCovOpts {
  double alpha = 0.8;
  std::string cov;
  std::string q0;
  std::string a = "0";
  std::size_t grid_n = 256;
  double horizon = 1.0;
  double tol = 1e-6;
  std::string out;
  std::string report;
};

int cmd_fracou_cov(const FracOUCovOpts& o) {
  const HOperator q0 = load_operator(o.q0);
  const std::size_t dim = q0.dim();
  const HOperator a = parse_operator_arg(o.a, dim);
  const CovarianceField qw = parse_cov(o.cov, q0);
  const Grid g(o.horizon, o.grid_n);
  // The covariance needs only alpha, A and the grid; mean data is inert here.
  const FracOUSpec spec(o.alpha, a, HVector(dim), GridPath(g, dim), 1.0);
  const CovIntegralResult res = frac_ou_covariance(spec, qw, o.tol);
  save_json_file(field_to_json(res.field, g), o.out);
  if (!o.report.empty()) {
    json j = refinement_json(res.report);
    j["unconverged"] = res.unconverged;
    j["alpha"] = o.alpha;
    save_json_file(j, o.report);
  }
  if (res.unconverged > 0) {
    std::cerr << "fracou-cov: " << res.unconverged
              << " grid pairs did not converge\n";
    return 2;
  }
  return 0;
}

// ----------------------------------------------------------------- roughvol

struct RoughVolOpts {
  std::string l;
  std::string z;
  std::string qb;
  std::string qy;
  std::size_t k = 2;
  std::string out;
};

// --qy accepts either a bare operator (QY(t,t) itself) or a field table as
// written by fracou-cov, from which the latest diagonal entry is taken.
HOperator qy_diagonal(const std::string& path) {
  const json j = load_json_file(path);
  if (j.is_object()) return operator_from_json(j);
  const std::vector<FieldEntry> entries = field_entries_from_json(j);
  const FieldEntry* best = nullptr;
  for (const FieldEntry& e : entries) {
    if (e.t == e.tp && (best == nullptr || e.t > best->t)) best = &e;
  }
  if (best == nullptr) {
    throw std::invalid_argument(path + ": field table has no diagonal entry");
  }
  return best->op;
}

int cmd_roughvol(const RoughVolOpts& o) {
  const HVector l = load_vector(o.l);
  const HVector z = load_vector(o.z);
  const HOperator qb = load_operator(o.qb);
  const HOperator qy = qy_diagonal(o.qy);
  const RoughVolSpec spec(l, z, qb);
  json moments = json::array();
  for (std::size_t j = 1; j <= o.k; ++j) {
    moments.push_back(json{{"k", j}, {"value", variance_moment(spec, qy, j)}});
  }
  const json out{{"scale", spec.scale},
                 {"qy_quadratic", inner(qy.apply(l), l)},
                 {"moments", moments}};
  std::cout << out.dump(2) << "\n";
  if (!o.out.empty()) save_json_file(out, o.out);
  return 0;
}

// ---------------------------------------------------------------- mc-verify

struct McVerifyOpts {
  std::string kernel;
  std::string driver;
  std::string q0;
  std::size_t grid_n = 256;
  double horizon = 1.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  double tol = 1e-4;
  std::string out;
};

int cmd_mc_verify(const McVerifyOpts& o) {
  const HOperator q0 = load_operator(o.q0);
  const std::size_t d = q0.dim();
  const VolterraKernel k = parse_kernel(o.kernel, d);
  const CovarianceField qw = parse_cov(o.driver, q0);
  const DriverLaw law = driver_law(o.driver, "mc-verify");
  const Grid g(o.horizon, o.grid_n);
  if (g.intervals() < 4) {
    throw std::invalid_argument("mc-verify: need at least 4 grid intervals");
  }
  const std::uint64_t seed = env_seed_override(o.seed);
  const std::size_t n_samples = o.samples;
  if (n_samples < 16) {
    throw std::invalid_argument("mc-verify: need at least 16 samples");
  }

  const Cov2DSpec spec2(k, qw);
  const CovIntegralResult qx =
      cov_integral(spec2, g, static_cast<std::size_t>(g.level()), o.tol);

  // Probe times T/4, T/2, 3T/4, T and the kernel rows K(t, u_j) for every
  // full cell of [0, t], so each sample costs one pass of dot products.
  const std::size_t quarter = g.intervals() / 4;
  const std::vector<std::size_t> tidx = {quarter, 2 * quarter, 3 * quarter,
                                         4 * quarter};
  std::vector<std::vector<HOperator>> rows(tidx.size());
  for (std::size_t ti = 0; ti < tidx.size(); ++ti) {
    rows[ti].reserve(tidx[ti]);
    for (std::size_t j = 0; j < tidx[ti]; ++j) {
      rows[ti].push_back(k.at(g.time(tidx[ti]), g.time(j)));
    }
  }

  // X_s(t_ti) for every sample, disjoint writes indexed by sample.
  std::vector<double> xs(n_samples * tidx.size() * d, 0.0);
  std::optional<FbmSampler> fbm;
  if (law.kind == SamplerKind::fbm) fbm.emplace(g, law.h, q0);
  for_chunks(n_samples, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      GridPath path;
      if (fbm.has_value()) {
        path = fbm->sample(seed, s);
      } else {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.sample_index = s;
        cfg.grid = g;
        cfg.q0 = q0;
        path = sample_qwiener(cfg);
      }
      std::vector<double> dw(d);
      for (std::size_t ti = 0; ti < tidx.size(); ++ti) {
        double* x = xs.data() + (s * tidx.size() + ti) * d;
        for (std::size_t j = 0; j < tidx[ti]; ++j) {
          const std::vector<double>& op = rows[ti][j].entries();
          for (std::size_t c = 0; c < d; ++c) {
            dw[c] = path.coord(j + 1, c) - path.coord(j, c);
          }
          for (std::size_t r = 0; r < d; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) acc += op[r * d + c] * dw[c];
            x[r] += acc;
          }
        }
      }
    }
  });
  const auto x_at = [&](std::size_t s, std::size_t ti) {
    return xs.data() + (s * tidx.size() + ti) * d;
  };

  json checks = json::array();
  bool all_pass = true;
  const auto push_check = [&](const std::string& name, double observed,
                              double predicted, double band) {
    const bool pass = std::abs(observed - predicted) <= band;
    all_pass = all_pass && pass;
    checks.push_back(json{{"check", name},
                          {"observed", observed},
                          {"predicted", predicted},
                          {"band", band},
                          {"pass", pass}});
  };

  // (a) empirical second moments vs the integrated field, entry-wise.
  const std::size_t pairs[5][2] = {{0, 0}, {1, 1}, {3, 3}, {0, 2}, {1, 3}};
  for (const auto& pr : pairs) {
    const double ta = g.time(tidx[pr[0]]);
    const double tb = g.time(tidx[pr[1]]);
    const HOperator model = qx.field.at(ta, tb);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t s = 0; s < n_samples; ++s) {
          const double p = x_at(s, pr[0])[i] * x_at(s, pr[1])[j];
          sum += p;
          sumsq += p * p;
        }
        const double mean = sum / static_cast<double>(n_samples);
        const double var =
            std::max(0.0, (sumsq - static_cast<double>(n_samples) * mean * mean) /
                              static_cast<double>(n_samples - 1));
        const double band =
            4.0 * std::sqrt(var / static_cast<double>(n_samples)) + 1e-12;
        push_check("cov[" + std::to_string(i) + "," + std::to_string(j) +
                       "]@(" + std::to_string(ta) + "," + std::to_string(tb) +
                       ")",
                   mean, model(i, j), band);
      }
    }
  }

  // (b) characteristic functional at 5 deterministic unit directions and
  // 3 probe times: real part vs exp(-<Q_X f, f>/2), imaginary part vs 0.
  std::vector<HVector> fprobes;
  for (std::size_t j = 0; j < 5; ++j) {
    GaussianStream fs(0xF00D5EEDull, j);
    HVector f(d);
    for (std::size_t i = 0; i < d; ++i) f[i] = fs.next_normal();
    f *= 1.0 / norm(f);
    fprobes.push_back(std::move(f));
  }
  for (std::size_t ti = 1; ti < tidx.size(); ++ti) {
    const double t = g.time(tidx[ti]);
    const HOperator qtt = qx.field.at(t, t);
    for (std::size_t fj = 0; fj < fprobes.size(); ++fj) {
      const HVector& f = fprobes[fj];
      const double predicted = std::exp(-0.5 * inner(qtt.apply(f), f));
      double csum = 0.0, csumsq = 0.0, ssum = 0.0, ssumsq = 0.0;
      for (std::size_t s = 0; s < n_samples; ++s) {
        const double* x = x_at(s, ti);
        double ip = 0.0;
        for (std::size_t c = 0; c < d; ++c) ip += x[c] * f[c];
        const double cv = std::cos(ip), sv = std::sin(ip);
        csum += cv;
        csumsq += cv * cv;
        ssum += sv;
        ssumsq += sv * sv;
      }
      const double nn = static_cast<double>(n_samples);
      const double cmean = csum / nn;
      const double cband =
          4.0 * std::sqrt(std::max(0.0, (csumsq - nn * cmean * cmean) /
                                            (nn - 1.0)) /
                          nn) +
          1e-12;
      const double smean = ssum / nn;
      const double sband =
          4.0 * std::sqrt(std::max(0.0, (ssumsq - nn * smean * smean) /
                                            (nn - 1.0)) /
                          nn) +
          1e-12;
      push_check("char.re[f" + std::to_string(fj) + "]@t=" + std::to_string(t),
                 cmean, predicted, cband);
      push_check("char.im[f" + std::to_string(fj) + "]@t=" + std::to_string(t),
                 smean, 0.0, sband);
    }
  }

  // (c) marginal shape at the horizon: skew and excess kurtosis of each
  // coordinate against the Gaussian CLT bands.
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> coord(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) coord[s] = x_at(s, 3)[i];
    const Moments m = sample_moments(coord);
    const double nn = static_cast<double>(n_samples);
    push_check("skewness[c" + std::to_string(i) + "]@t=T", m.skewness, 0.0,
               4.0 * std::sqrt(6.0 / nn));
    push_check("excess_kurtosis[c" + std::to_string(i) + "]@t=T",
               m.excess_kurtosis, 0.0, 4.0 * std::sqrt(24.0 / nn));
  }

  std::size_t passed = 0;
  for (const json& c : checks) {
    if (c.at("pass").get<bool>()) ++passed;
  }
  const json report{{"kernel", k.label},
                    {"driver", qw.label},
                    {"samples", n_samples},
                    {"seed", seed},
                    {"grid_n", g.intervals()},
                    {"unconverged", qx.unconverged},
                    {"checks_passed", passed},
                    {"checks_total", checks.size()},
                    {"pass", all_pass},
                    {"checks", checks}};
  if (!o.out.empty()) save_json_file(report, o.out);
  std::cout << "mc-verify: " << passed << "/" << checks.size()
            << " checks passed\n";
  if (qx.unconverged > 0) {
    std::cerr << "mc-verify: model field left " << qx.unconverged
              << " pairs unconverged\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}

// ----------------------------------------------------------------- converge

struct ConvergeOpts {
  std::string kernel;
  std::string driver_kind = "smooth-linear";
  std::string driver;
  std::string q0;
  double gamma = 1.0;
  std::size_t grid_n = 1024;
  double horizon = 1.0;
  std::uint64_t seed = 7;
  std::size_t dim = 1;
  std::size_t min_level = 3;
  std::size_t max_level = 0;
  std::string out;
};

int cmd_converge(const ConvergeOpts& o) {
  GridPath driver;
  if (!o.driver.empty()) {
    driver = load_path_csv(o.driver);
  } else if (o.driver_kind == "smooth-linear") {
    GridPath p(Grid(o.horizon, o.grid_n), o.dim);
    for (std::size_t i = 0; i < p.grid().points(); ++i) {
      for (std::size_t c = 0; c < o.dim; ++c) {
        p.coord(i, c) = p.grid().time(i);
      }
    }
    driver = std::move(p);
  } else {
    const DriverLaw law = driver_law(o.driver_kind, "converge");
    const HOperator q0 =
        o.q0.empty() ? HOperator::identity(o.dim) : load_operator(o.q0);
    driver = sample_batch(law, Grid(o.horizon, o.grid_n), q0,
                          env_seed_override(o.seed), 1)
                 .front();
  }
  const Grid g = driver.grid();
  const VolterraKernel k = parse_kernel(o.kernel, driver.dim());
  const IntegrandSpec spec(k, std::move(driver), o.gamma);
  const std::size_t top =
      o.max_level == 0 ? static_cast<std::size_t>(g.level()) : o.max_level;
  if (top <= o.min_level + 1) {
    throw std::invalid_argument("converge: need at least three levels");
  }
  std::vector<std::size_t> levels;
  for (std::size_t l = o.min_level; l <= top; ++l) levels.push_back(l);
  const double T = g.horizon();
  const std::vector<std::pair<double, double>> probes = {
      {T, T}, {T, 0.5 * T}, {0.5 * T, 0.5 * T}};
  const RefinementReport rep = convergence_study(spec, probes, levels);
  json j = refinement_json(rep);
  j["kernel"] = k.label;
  j["gamma"] = o.gamma;
  if (!o.out.empty()) save_json_file(j, o.out);
  std::cout << "converge: fitted_rate = "
            << (std::isfinite(rep.fitted_rate) ? std::to_string(rep.fitted_rate)
                                               : std::string("inf"))
            << ", target_rate = " << rep.target_rate << "\n";
  return 0;
}

// ---------------------------------------------------------------- seminorms

struct SeminormsOpts {
  std::string kernel;
  std::string cov;
  std::string q0;
  double alpha = -1.0;  // <0 -> use the field's declared alpha
  std::size_t grid_n = 64;
  double horizon = 1.0;
  std::size_t dim = 1;
  std::string out;
};

int cmd_seminorms(const SeminormsOpts& o) {
  if (o.kernel.empty() && o.cov.empty()) {
    throw std::invalid_argument("seminorms: pass --kernel and/or --cov");
  }
  const Grid g(o.horizon, o.grid_n);
  json j;
  if (!o.kernel.empty()) {
    const std::size_t dim =
        o.q0.empty() ? o.dim : load_operator(o.q0).dim();
    const VolterraKernel k = parse_kernel(o.kernel, dim);
    const KernelSeminorms ks = kernel_seminorms(k, g);
    j["kernel"] = json{{"label", k.label}, {"eta", k.eta},     {"k1", ks.k1},
                       {"k2", ks.k2},      {"k3", ks.k3},      {"k4", ks.k4},
                       {"total", ks.total()}};
  }
  if (!o.cov.empty()) {
    if (o.q0.empty()) {
      throw std::invalid_argument("seminorms: --cov needs --q0");
    }
    const HOperator q0 = load_operator(o.q0);
    const CovarianceField qw = parse_cov(o.cov, q0);
    const double alpha = o.alpha < 0.0 ? qw.alpha : o.alpha;
    const CovSeminorms cs = cov_seminorms(qw, alpha, g);
    j["cov"] = json{{"label", qw.label}, {"alpha", alpha},
                    {"q10", cs.q10},     {"q01", cs.q01},
                    {"q11", cs.q11},     {"total", cs.total()}};
  }
  std::cout << j.dump(2) << "\n";
  if (!o.out.empty()) save_json_file(j, o.out);
  return 0;
}

// --------------------------------------------------------------- rough-gate

struct RoughGateOpts {
  std::string cov;
  std::string q0;
  std::size_t grid_n = 64;
  double horizon = 1.0;
  std::string out;
};

int cmd_rough_gate(const RoughGateOpts& o) {
  const HOperator q0 = load_operator(o.q0);
  const CovarianceField qw = parse_cov(o.cov, q0);
  const RoughGate gate = rough_admissible(qw, Grid(o.horizon, o.grid_n));
  json scan = json::array();
  for (const RoughScanRow& row : gate.scan) {
    scan.push_back(json{
        {"gamma", row.gamma},
        {"stable", row.stable},
        {"coarse", json{{"q10", row.coarse.q10},
                        {"q01", row.coarse.q01},
                        {"q11", row.coarse.q11}}},
        {"fine", json{{"q10", row.fine.q10},
                      {"q01", row.fine.q01},
                      {"q11", row.fine.q11}}}});
  }
  const json j{{"field", qw.label},
               {"admissible", gate.admissible},
               {"certified_exponent", gate.certified_exponent},
               {"scan", scan}};
  std::cout << "rough-gate: " << (gate.admissible ? "admissible" : "not admissible")
            << " (certified exponent " << gate.certified_exponent << ")\n";
  if (!o.out.empty()) save_json_file(j, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pathwise Volterra integration against Gaussian drivers in "
      "finite-dimensional Hilbert-space truncations"};
  app.require_subcommand(1);
  // Long-form help only: fbm's Hurst flag is literally `--h`.
  app.set_help_flag("--help", "print help and exit");
  unsigned n_threads = 1;
  app.add_option("--threads", n_threads, "worker threads (default 1)");

  SimulateOpts sim;
  {
    CLI::App* sc = app.add_subcommand("simulate", "sample driver paths to CSV");
    sc->fallthrough();
    sc->add_option("--kind", sim.kind, "wiener | fbm")->required();
    sc->add_option("--h", sim.h, "Hurst index (fbm)");
    sc->add_option("--q0", sim.q0, "base covariance operator JSON")->required();
    sc->add_option("--grid-n", sim.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", sim.horizon, "time horizon");
    sc->add_option("--seed", sim.seed, "RNG seed");
    sc->add_option("--samples", sim.samples, "number of paths");
    sc->add_option("--out", sim.out, "output CSV")->required();
  }

  Integrate1DOpts i1;
  {
    CLI::App* sc = app.add_subcommand(
        "integrate1d", "pathwise Volterra integral of a driver path");
    sc->fallthrough();
    sc->add_option("--kernel", i1.kernel, "kernel spec")->required();
    sc->add_option("--driver", i1.driver, "driver CSV")->required();
    sc->add_option("--gamma", i1.gamma, "declared driver regularity")
        ->required();
    sc->add_option("--tol", i1.tol, "refinement tolerance");
    sc->add_option("--max-level", i1.max_level,
                   "deepest dyadic level (default: grid level)");
    sc->add_option("--out", i1.out, "output CSV (diagonal X(t))")->required();
    sc->add_option("--report", i1.report, "convergence report JSON");
  }

  Cov2DOpts c2;
  {
    CLI::App* sc = app.add_subcommand(
        "cov2d", "operator-valued 2D Young integral of a covariance field");
    sc->fallthrough();
    sc->add_option("--kernel", c2.kernel, "kernel spec")->required();
    sc->add_option("--kernel-prime", c2.kernel_prime,
                   "second kernel spec (default: same as --kernel)");
    sc->add_option("--cov", c2.cov, "covariance field spec")->required();
    sc->add_option("--q0", c2.q0, "base covariance operator JSON")->required();
    sc->add_option("--grid-n", c2.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", c2.horizon, "time horizon");
    sc->add_option("--tol", c2.tol, "refinement tolerance");
    sc->add_option("--max-level", c2.max_level,
                   "deepest dyadic level (default: grid level)");
    sc->add_option("--out", c2.out, "output field JSON")->required();
    sc->add_option("--report", c2.report, "convergence report JSON");
  }

  FracOUOpts fo;
  {
    CLI::App* sc = app.add_subcommand(
        "fracou", "fractional OU solution along a driver path");
    sc->fallthrough();
    sc->add_option("--alpha", fo.alpha, "fractional order in (0,1]")->required();
    sc->add_option("--a", fo.a, "drift operator (JSON file or number)")
        ->required();
    sc->add_option("--y0", fo.y0, "initial state JSON")->required();
    sc->add_option("--driver", fo.driver, "driver CSV")->required();
    sc->add_option("--gamma", fo.gamma, "declared driver regularity")
        ->required();
    sc->add_option("--tol", fo.tol, "refinement tolerance");
    sc->add_option("--max-level", fo.max_level,
                   "deepest dyadic level (default: grid level)");
    sc->add_option("--out", fo.out, "output CSV")->required();
    sc->add_option("--report", fo.report, "report JSON");
  }

  FracOUCovOpts fc;
  {
    CLI::App* sc = app.add_subcommand(
        "fracou-cov", "covariance field of the fractional OU solution");
    sc->fallthrough();
    sc->add_option("--alpha", fc.alpha, "fractional order in (0,1]")->required();
    sc->add_option("--a", fc.a, "drift operator (JSON file or number, default 0)");
    sc->add_option("--cov", fc.cov, "driver covariance field spec")->required();
    sc->add_option("--q0", fc.q0, "base covariance operator JSON")->required();
    sc->add_option("--grid-n", fc.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", fc.horizon, "time horizon");
    sc->add_option("--tol", fc.tol, "refinement tolerance");
    sc->add_option("--out", fc.out, "output field JSON")->required();
    sc->add_option("--report", fc.report, "convergence report JSON");
  }

  RoughVolOpts rv;
  {
    CLI::App* sc = app.add_subcommand(
        "roughvol", "rough-volatility variance moments from a solved model");
    sc->fallthrough();
    sc->add_option("--l", rv.l, "output functional vector JSON")->required();
    sc->add_option("--z", rv.z, "unit direction vector JSON")->required();
    sc->add_option("--qb", rv.qb, "volatility noise covariance JSON")
        ->required();
    sc->add_option("--qy", rv.qy,
                   "QY(t,t) operator JSON, or a fracou-cov field table")
        ->required();
    sc->add_option("--k", rv.k, "highest moment order");
    sc->add_option("--out", rv.out, "report JSON");
  }

  McVerifyOpts mv;
  {
    CLI::App* sc = app.add_subcommand(
        "mc-verify", "Monte-Carlo Gaussianity and covariance verification");
    sc->fallthrough();
    sc->add_option("--kernel", mv.kernel, "kernel spec")->required();
    sc->add_option("--driver", mv.driver, "driver law: wiener | fbm:h=<v>")
        ->required();
    sc->add_option("--q0", mv.q0, "base covariance operator JSON")->required();
    sc->add_option("--grid-n", mv.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", mv.horizon, "time horizon");
    sc->add_option("--samples", mv.samples, "Monte-Carlo sample count");
    sc->add_option("--seed", mv.seed, "RNG seed");
    sc->add_option("--tol", mv.tol, "field refinement tolerance");
    sc->add_option("--out", mv.out, "report JSON");
  }

  ConvergeOpts cv;
  {
    CLI::App* sc = app.add_subcommand(
        "converge", "dyadic refinement study of the 1D integral");
    sc->fallthrough();
    sc->add_option("--kernel", cv.kernel, "kernel spec")->required();
    sc->add_option("--driver-kind", cv.driver_kind,
                   "smooth-linear | wiener | fbm:h=<v>");
    sc->add_option("--driver", cv.driver, "driver CSV (overrides --driver-kind)");
    sc->add_option("--q0", cv.q0, "base covariance operator JSON (sampled kinds)");
    sc->add_option("--gamma", cv.gamma, "declared driver regularity");
    sc->add_option("--grid-n", cv.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", cv.horizon, "time horizon");
    sc->add_option("--seed", cv.seed, "RNG seed (sampled kinds)");
    sc->add_option("--dim", cv.dim, "driver dimension (built-in kinds)");
    sc->add_option("--min-level", cv.min_level, "coarsest dyadic level");
    sc->add_option("--max-level", cv.max_level,
                   "finest dyadic level (default: grid level)");
    sc->add_option("--out", cv.out, "report JSON");
  }

  SeminormsOpts sn;
  {
    CLI::App* sc = app.add_subcommand(
        "seminorms", "kernel and covariance seminorm estimates");
    sc->fallthrough();
    sc->add_option("--kernel", sn.kernel, "kernel spec");
    sc->add_option("--cov", sn.cov, "covariance field spec");
    sc->add_option("--q0", sn.q0, "base covariance operator JSON");
    sc->add_option("--alpha", sn.alpha,
                   "exponent for the covariance seminorms (default: declared)");
    sc->add_option("--grid-n", sn.grid_n, "grid intervals (power of two)");
    sc->add_option("--horizon", sn.horizon, "time horizon");
    sc->add_option("--dim", sn.dim, "dimension when no --q0 is given");
    sc->add_option("--out", sn.out, "report JSON");
  }

  RoughGateOpts rg;
  {
    CLI::App* sc = app.add_subcommand(
        "rough-gate", "rough-path admissibility scan of a covariance field");
    sc->fallthrough();
    sc->add_option("--cov", rg.cov, "covariance field spec")->required();
    sc->add_option("--q0", rg.q0, "base covariance operator JSON")->required();
    sc->add_option("--grid-n", rg.grid_n, "gate grid intervals");
    sc->add_option("--horizon", rg.horizon, "time horizon");
    sc->add_option("--out", rg.out, "report JSON");
  }

  int rc = 0;
  try {
    app.parse(argc, argv);
    set_threads(n_threads);
    if (app.got_subcommand("simulate")) rc = cmd_simulate(sim);
    if (app.got_subcommand("integrate1d")) rc = cmd_integrate1d(i1);
    if (app.got_subcommand("cov2d")) rc = cmd_cov2d(c2);
    if (app.got_subcommand("fracou")) rc = cmd_fracou(fo);
    if (app.got_subcommand("fracou-cov")) rc = cmd_fracou_cov(fc);
    if (app.got_subcommand("roughvol")) rc = cmd_roughvol(rv);
    if (app.got_subcommand("mc-verify")) rc = cmd_mc_verify(mv);
    if (app.got_subcommand("converge")) rc = cmd_converge(cv);
    if (app.got_subcommand("seminorms")) rc = cmd_seminorms(sn);
    if (app.got_subcommand("rough-gate")) rc = cmd_rough_gate(rg);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 64;
  } catch (const std::invalid_argument& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
