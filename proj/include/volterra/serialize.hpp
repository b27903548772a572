#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "volterra/covariance.hpp"
#include "volterra/hilbert.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Operators travel as {"dim": n, "entries": [row-major flat array]},
// vectors as {"dim": n, "coords": [...]}.
nlohmann::json operator_to_json(const HOperator& m);
HOperator operator_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const HVector& v);
HVector vector_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);
HOperator load_operator(const std::string& path);
HVector load_vector(const std::string& path);

// Paths travel as CSV with header `t,c_1..c_n`, one row per grid point;
// multi-sample batches prepend a `sample` column. Values are printed with
// 17 significant digits, so a load reproduces the written doubles exactly.
std::string paths_to_csv(const std::vector<GridPath>& samples);
void save_paths_csv(const std::vector<GridPath>& samples,
                    const std::string& path);
std::vector<GridPath> load_paths_csv(const std::string& path);
// Convenience for inputs that must be a single path.
GridPath load_path_csv(const std::string& path);

// A covariance field tabulated on a grid: JSON array of
// {"t": .., "tp": .., "operator": {..}} over all grid pairs t <= t'
// (the field is symmetric under (t,t') swap with an adjoint, so the upper
// triangle is not stored).
nlohmann::json field_to_json(const CovarianceField& q, const Grid& g);

struct FieldEntry {
  double t = 0.0;
  double tp = 0.0;
  HOperator op;
};
std::vector<FieldEntry> field_entries_from_json(const nlohmann::json& j);

// Factory strings used by the CLI.
//   kernels: `identity`, `frac:eta=0.25[,a=<op>]`, `ml:alpha=0.6[,beta=0.6],a=<op>`,
//            `exp:a=1.0`
//   fields:  `wiener`, `fbm:h=0.3`, `composed:base=<field>,zpath=<csv>[,zexp=<v>]`
// <op> is a bare number or `scalar=<v>` (both mean v·I), or a path to a JSON
// operator file whose dimension must match `dim`.
VolterraKernel parse_kernel(const std::string& text, std::size_t dim);
CovarianceField parse_cov(const std::string& text, const HOperator& q0);

// The <op> rule above, exposed for flags that take an operator directly.
HOperator parse_operator_arg(const std::string& value, std::size_t dim);

}  // namespace volterra
