#include "volterra/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace volterra {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_number(const std::string& s, const char* who) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::invalid_argument(std::string(who) + ": not a number: '" + s + "'");
  }
  return v;
}

// "k1=v1,k2=v2" -> map; values keep any '=' or ':' past the first '='.
std::map<std::string, std::string> parse_kv(const std::string& s,
                                            const char* who) {
  std::map<std::string, std::string> kv;
  if (s.empty()) return kv;
  for (const std::string& piece : split(s, ',')) {
    const std::size_t eq = piece.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument(std::string(who) +
                                  ": malformed option '" + piece + "'");
    }
    kv[piece.substr(0, eq)] = piece.substr(eq + 1);
  }
  return kv;
}

double require_number(const std::map<std::string, std::string>& kv,
                      const std::string& key, const char* who) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw std::invalid_argument(std::string(who) + ": missing option '" + key +
                                "='");
  }
  return to_number(it->second, who);
}

bool is_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  (void)std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

HOperator op_arg(const std::string& value, std::size_t dim, const char* who) {
  std::string v = value;
  if (v.rfind("scalar=", 0) == 0) v = v.substr(7);
  if (is_number(v)) {
    HOperator m = HOperator::identity(dim);
    m *= to_number(v, who);
    return m;
  }
  HOperator m = load_operator(value);
  if (m.dim() != dim) {
    throw std::invalid_argument(std::string(who) + ": operator file '" + value +
                                "' has dim " + std::to_string(m.dim()) +
                                ", expected " + std::to_string(dim));
  }
  return m;
}

}  // namespace

HOperator parse_operator_arg(const std::string& value, std::size_t dim) {
  return op_arg(value, dim, "parse_operator_arg");
}

nlohmann::json operator_to_json(const HOperator& m) {
  return nlohmann::json{{"dim", m.dim()}, {"entries", m.entries()}};
}

HOperator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw std::invalid_argument(
        "operator JSON must be {\"dim\": n, \"entries\": [...]}");
  }
  const std::size_t dim = j.at("dim").get<std::size_t>();
  std::vector<double> entries = j.at("entries").get<std::vector<double>>();
  if (entries.size() != dim * dim) {
    throw std::invalid_argument("operator JSON: entries length " +
                                std::to_string(entries.size()) +
                                " does not match dim " + std::to_string(dim));
  }
  return HOperator(dim, std::move(entries));
}

nlohmann::json vector_to_json(const HVector& v) {
  std::vector<double> coords(v.coords().begin(), v.coords().end());
  return nlohmann::json{{"dim", v.dim()}, {"coords", coords}};
}

HVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("coords")) {
    throw std::invalid_argument(
        "vector JSON must be {\"dim\": n, \"coords\": [...]}");
  }
  const std::size_t dim = j.at("dim").get<std::size_t>();
  const std::vector<double> coords = j.at("coords").get<std::vector<double>>();
  if (coords.size() != dim) {
    throw std::invalid_argument("vector JSON: coords length does not match dim");
  }
  HVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = coords[i];
  return v;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse JSON in " + path + ": " +
                                e.what());
  }
  return j;
}

void save_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << j.dump(2) << '\n';
}

HOperator load_operator(const std::string& path) {
  return operator_from_json(load_json_file(path));
}

HVector load_vector(const std::string& path) {
  return vector_from_json(load_json_file(path));
}

std::string paths_to_csv(const std::vector<GridPath>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("paths_to_csv: no samples");
  }
  const Grid& g = samples.front().grid();
  const std::size_t d = samples.front().dim();
  for (const GridPath& p : samples) {
    if (!(p.grid() == g) || p.dim() != d) {
      throw std::invalid_argument(
          "paths_to_csv: samples disagree on grid or dimension");
    }
  }
  const bool batch = samples.size() > 1;
  std::string out;
  if (batch) out += "sample,";
  out += "t";
  for (std::size_t c = 0; c < d; ++c) out += ",c_" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t i = 0; i < g.points(); ++i) {
      if (batch) out += std::to_string(s) + ",";
      out += fmt17(g.time(i));
      for (std::size_t c = 0; c < d; ++c) {
        out += ',';
        out += fmt17(samples[s].coord(i, c));
      }
      out += '\n';
    }
  }
  return out;
}

void save_paths_csv(const std::vector<GridPath>& samples,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << paths_to_csv(samples);
}

std::vector<GridPath> load_paths_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> head = split(line, ',');
  std::size_t col0 = 0;
  if (head[0] == "sample") col0 = 1;
  if (head.size() <= col0 || head[col0] != "t") {
    throw std::invalid_argument(path + ": expected header [sample,]t,c_1..c_n");
  }
  const std::size_t d = head.size() - col0 - 1;
  if (d == 0) {
    throw std::invalid_argument(path + ": no coordinate columns");
  }

  struct Row {
    std::size_t sample;
    double t;
    std::vector<double> c;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != head.size()) {
      throw std::invalid_argument(path + ": ragged CSV row '" + line + "'");
    }
    Row r;
    r.sample = col0 == 1 ? static_cast<std::size_t>(
                               to_number(cells[0], "load_paths_csv"))
                         : 0;
    r.t = to_number(cells[col0], "load_paths_csv");
    r.c.reserve(d);
    for (std::size_t c = 0; c < d; ++c) {
      r.c.push_back(to_number(cells[col0 + 1 + c], "load_paths_csv"));
    }
    rows.push_back(std::move(r));
  }
  if (rows.size() < 2) {
    throw std::invalid_argument(path + ": need at least two grid points");
  }

  // Points per sample = rows until the time restarts (or all of them).
  std::size_t pts = rows.size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].sample != rows[i - 1].sample) {
      pts = i;
      break;
    }
  }
  if (rows.size() % pts != 0) {
    throw std::invalid_argument(path + ": sample blocks have unequal length");
  }
  const std::size_t n_samples = rows.size() / pts;
  const double horizon = rows[pts - 1].t;
  Grid g(horizon, pts - 1);  // validates power-of-two interval count
  const double tol = 1e-9 * std::max(1.0, horizon);

  std::vector<GridPath> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    GridPath p(g, d);
    for (std::size_t i = 0; i < pts; ++i) {
      const Row& r = rows[s * pts + i];
      if (std::abs(r.t - g.time(i)) > tol) {
        throw std::invalid_argument(path +
                                    ": times are not a uniform dyadic grid");
      }
      for (std::size_t c = 0; c < d; ++c) p.coord(i, c) = r.c[c];
    }
    out.push_back(std::move(p));
  }
  return out;
}

GridPath load_path_csv(const std::string& path) {
  std::vector<GridPath> all = load_paths_csv(path);
  if (all.size() != 1) {
    throw std::invalid_argument(path + ": expected exactly one sample, found " +
                                std::to_string(all.size()));
  }
  return std::move(all.front());
}

nlohmann::json field_to_json(const CovarianceField& q, const Grid& g) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < g.points(); ++i) {
    for (std::size_t j = i; j < g.points(); ++j) {
      arr.push_back(nlohmann::json{{"t", g.time(i)},
                                   {"tp", g.time(j)},
                                   {"operator", operator_to_json(
                                        q.at(g.time(i), g.time(j)))}});
    }
  }
  return arr;
}

std::vector<FieldEntry> field_entries_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw std::invalid_argument(
        "field JSON must be an array of {t, tp, operator}");
  }
  std::vector<FieldEntry> out;
  out.reserve(j.size());
  for (const nlohmann::json& e : j) {
    if (!e.is_object() || !e.contains("t") || !e.contains("tp") ||
        !e.contains("operator")) {
      throw std::invalid_argument(
          "field JSON entries must be {t, tp, operator}");
    }
    FieldEntry fe;
    fe.t = e.at("t").get<double>();
    fe.tp = e.at("tp").get<double>();
    fe.op = operator_from_json(e.at("operator"));
    out.push_back(std::move(fe));
  }
  return out;
}

VolterraKernel parse_kernel(const std::string& text, std::size_t dim) {
  const std::size_t colon = text.find(':');
  const std::string head =
      colon == std::string::npos ? text : text.substr(0, colon);
  const std::map<std::string, std::string> kv = parse_kv(
      colon == std::string::npos ? "" : text.substr(colon + 1), "parse_kernel");

  if (head == "identity") {
    return identity_kernel(dim);
  }
  if (head == "frac") {
    const double eta = require_number(kv, "eta", "parse_kernel");
    const auto it = kv.find("a");
    const HOperator a = it == kv.end()
                            ? HOperator::identity(dim)
                            : op_arg(it->second, dim, "parse_kernel");
    return fractional_kernel(eta, a);
  }
  if (head == "ml") {
    const double alpha = require_number(kv, "alpha", "parse_kernel");
    const auto bit = kv.find("beta");
    const double beta =
        bit == kv.end() ? alpha : to_number(bit->second, "parse_kernel");
    const auto it = kv.find("a");
    if (it == kv.end()) {
      throw std::invalid_argument("parse_kernel: ml kernel needs a=");
    }
    return ml_kernel(alpha, beta, op_arg(it->second, dim, "parse_kernel"));
  }
  if (head == "exp") {
    return exp_kernel(require_number(kv, "a", "parse_kernel"), dim);
  }
  throw std::invalid_argument("parse_kernel: unknown kernel '" + text + "'");
}

CovarianceField parse_cov(const std::string& text, const HOperator& q0) {
  const std::size_t colon = text.find(':');
  const std::string head =
      colon == std::string::npos ? text : text.substr(0, colon);
  const std::map<std::string, std::string> kv = parse_kv(
      colon == std::string::npos ? "" : text.substr(colon + 1), "parse_cov");

  if (head == "wiener") {
    return wiener_cov(q0);
  }
  if (head == "fbm") {
    return fbm_cov(require_number(kv, "h", "parse_cov"), q0);
  }
  if (head == "composed") {
    const auto bit = kv.find("base");
    const auto zit = kv.find("zpath");
    if (bit == kv.end() || zit == kv.end()) {
      throw std::invalid_argument(
          "parse_cov: composed needs base= and zpath=");
    }
    const auto eit = kv.find("zexp");
    const double zexp =
        eit == kv.end() ? 1.0 : to_number(eit->second, "parse_cov");
    const GridPath z = load_path_csv(zit->second);
    return composed_cov(parse_cov(bit->second, q0), z, zexp);
  }
  throw std::invalid_argument("parse_cov: unknown covariance '" + text + "'");
}

}  // namespace volterra
