#pragma once

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jctes/analytic.hpp"
#include "jctes/io.hpp"
#include "jctes/jc_model.hpp"
#include "jctes/oracle.hpp"
#include "jctes/wigner.hpp"

namespace jctes::cli {

using nlohmann::json;

/// Malformed or out-of-range configuration; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class OutputKind { trajectory, components, wigner, compare, snapshots };

inline const std::vector<std::pair<OutputKind, std::string>>& output_names() {
  static const std::vector<std::pair<OutputKind, std::string>> names = {{OutputKind::trajectory, "trajectory"},
                                                                        {OutputKind::components, "components"},
                                                                        {OutputKind::wigner, "wigner"},
                                                                        {OutputKind::compare, "compare"},
                                                                        {OutputKind::snapshots, "snapshots"}};
  return names;
}

/// Atom in `atom` and field in the coherent state |alpha0>, or an explicit
/// 2N x 2N joint density read from `matrix_file`.
struct InitialCondition {
  bool from_file = false;
  cplx coherent_alpha0 = 0.0;
  Spin atom = Spin::up;
  std::string matrix_file;

  bool operator==(const InitialCondition&) const = default;
};

struct WignerGridConfig {
  PhaseGridSpec spec{-3.0, 3.0, -3.0, 3.0, 41, 41};
  std::vector<double> times{0.0};

  bool operator==(const WignerGridConfig& o) const {
    return spec.re_min == o.spec.re_min && spec.re_max == o.spec.re_max && spec.im_min == o.spec.im_min &&
           spec.im_max == o.spec.im_max && spec.n_re == o.spec.n_re && spec.n_im == o.spec.n_im && times == o.times;
  }
};

struct RunConfig {
  ModelParams params;
  InitialCondition initial;
  TimeGrid grid;
  std::vector<OutputKind> outputs;
  WignerGridConfig wigner_grid;
  RhoCForm analytic_rho_c = RhoCForm::printed;
  /// Evenly spaced comparison times used by `compare`.
  std::size_t checkpoints = 10;
  /// Directory relative paths in the config resolve against.
  std::string base_dir = ".";

  bool wants(OutputKind k) const { return std::find(outputs.begin(), outputs.end(), k) != outputs.end(); }

  bool operator==(const RunConfig& o) const {
    return params.omega == o.params.omega && params.lambda_c == o.params.lambda_c && params.gamma == o.params.gamma &&
           params.n_trunc == o.params.n_trunc && initial == o.initial && grid.t_start == o.grid.t_start &&
           grid.t_end == o.grid.t_end && grid.n_steps == o.grid.n_steps && outputs == o.outputs &&
           wigner_grid == o.wigner_grid && analytic_rho_c == o.analytic_rho_c && checkpoints == o.checkpoints;
  }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path + "." + key + ": unknown field");
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key + ": missing required field");
  return obj.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": must be finite");
  return x;
}

inline std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

inline cplx complex_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline std::pair<double, double> range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected [min, max]");
  const double lo = number(j[0], path + "[0]");
  const double hi = number(j[1], path + "[1]");
  if (hi < lo) throw ConfigError(path + ": max must be >= min");
  return {lo, hi};
}

}  // namespace detail

inline RunConfig parse_config(const json& j, const std::string& base_dir = ".") {
  using namespace detail;
  reject_unknown(j, "config", {"params", "initial", "grid", "outputs", "wigner_grid", "analytic_rho_c", "checkpoints"});
  RunConfig c;
  c.base_dir = base_dir;

  const json& p = require(j, "config", "params");
  reject_unknown(p, "params", {"omega", "lambda", "gamma", "n_trunc"});
  c.params.omega = number(require(p, "params", "omega"), "params.omega");
  c.params.lambda_c = number(require(p, "params", "lambda"), "params.lambda");
  c.params.gamma = number(require(p, "params", "gamma"), "params.gamma");
  if (c.params.gamma < 0.0) throw ConfigError("params.gamma: must be >= 0");
  const auto n = integer(require(p, "params", "n_trunc"), "params.n_trunc");
  if (n < 2 || n > 400) throw ConfigError("params.n_trunc: must be in [2, 400]");
  c.params.n_trunc = static_cast<Index>(n);

  const json& init = require(j, "config", "initial");
  reject_unknown(init, "initial", {"coherent_alpha0", "atom", "matrix_file"});
  if (init.contains("matrix_file")) {
    if (init.contains("coherent_alpha0") || init.contains("atom"))
      throw ConfigError("initial.matrix_file: cannot be combined with coherent_alpha0/atom");
    if (!init.at("matrix_file").is_string() || init.at("matrix_file").get<std::string>().empty())
      throw ConfigError("initial.matrix_file: expected a non-empty path");
    c.initial.from_file = true;
    c.initial.matrix_file = init.at("matrix_file").get<std::string>();
  } else {
    c.initial.coherent_alpha0 = complex_pair(require(init, "initial", "coherent_alpha0"), "initial.coherent_alpha0");
    if (init.contains("atom")) {
      const json& a = init.at("atom");
      if (a == "up") c.initial.atom = Spin::up;
      else if (a == "down") c.initial.atom = Spin::down;
      else throw ConfigError("initial.atom: expected \"up\" or \"down\"");
    }
  }

  const json& g = require(j, "config", "grid");
  reject_unknown(g, "grid", {"t_start", "t_end", "n_steps"});
  c.grid.t_start = g.contains("t_start") ? number(g.at("t_start"), "grid.t_start") : 0.0;
  c.grid.t_end = number(require(g, "grid", "t_end"), "grid.t_end");
  if (!(c.grid.t_end > c.grid.t_start)) throw ConfigError("grid.t_end: must exceed grid.t_start");
  const auto steps = integer(require(g, "grid", "n_steps"), "grid.n_steps");
  if (steps < 1) throw ConfigError("grid.n_steps: must be >= 1");
  c.grid.n_steps = static_cast<std::size_t>(steps);

  const json& outs = require(j, "config", "outputs");
  if (!outs.is_array()) throw ConfigError("outputs: expected an array of strings");
  for (std::size_t k = 0; k < outs.size(); ++k) {
    const std::string path = "outputs[" + std::to_string(k) + "]";
    if (!outs[k].is_string()) throw ConfigError(path + ": expected a string");
    const auto name = outs[k].get<std::string>();
    const auto& names = output_names();
    auto it = std::find_if(names.begin(), names.end(), [&](const auto& e) { return e.second == name; });
    if (it == names.end()) throw ConfigError(path + ": unknown output \"" + name + "\"");
    if (!c.wants(it->first)) c.outputs.push_back(it->first);
  }

  if (j.contains("wigner_grid")) {
    const json& w = j.at("wigner_grid");
    reject_unknown(w, "wigner_grid", {"re_range", "im_range", "n_re", "n_im", "times"});
    auto& s = c.wigner_grid.spec;
    if (w.contains("re_range")) std::tie(s.re_min, s.re_max) = range(w.at("re_range"), "wigner_grid.re_range");
    if (w.contains("im_range")) std::tie(s.im_min, s.im_max) = range(w.at("im_range"), "wigner_grid.im_range");
    if (w.contains("n_re")) s.n_re = static_cast<Index>(integer(w.at("n_re"), "wigner_grid.n_re"));
    if (w.contains("n_im")) s.n_im = static_cast<Index>(integer(w.at("n_im"), "wigner_grid.n_im"));
    if (s.n_re < 1 || s.n_re > 2001) throw ConfigError("wigner_grid.n_re: must be in [1, 2001]");
    if (s.n_im < 1 || s.n_im > 2001) throw ConfigError("wigner_grid.n_im: must be in [1, 2001]");
    if (w.contains("times")) {
      const json& ts = w.at("times");
      if (!ts.is_array()) throw ConfigError("wigner_grid.times: expected an array of numbers");
      c.wigner_grid.times.clear();
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = number(ts[k], "wigner_grid.times[" + std::to_string(k) + "]");
        if (t < 0.0) throw ConfigError("wigner_grid.times[" + std::to_string(k) + "]: must be >= 0");
        c.wigner_grid.times.push_back(t);
      }
    }
  }

  if (j.contains("analytic_rho_c")) {
    const json& f = j.at("analytic_rho_c");
    if (f == "printed") c.analytic_rho_c = RhoCForm::printed;
    else if (f == "corrected") c.analytic_rho_c = RhoCForm::corrected;
    else throw ConfigError("analytic_rho_c: expected \"printed\" or \"corrected\"");
  }
  if (j.contains("checkpoints")) {
    const auto k = integer(j.at("checkpoints"), "checkpoints");
    if (k < 1 || static_cast<std::size_t>(k) > c.grid.n_steps)
      throw ConfigError("checkpoints: must be in [1, grid.n_steps]");
    c.checkpoints = static_cast<std::size_t>(k);
  }
  c.checkpoints = std::min(c.checkpoints, c.grid.n_steps);
  return c;
}

inline json emit_config(const RunConfig& c) {
  json j;
  j["params"] = {{"omega", c.params.omega},
                 {"lambda", c.params.lambda_c},
                 {"gamma", c.params.gamma},
                 {"n_trunc", c.params.n_trunc}};
  if (c.initial.from_file) {
    j["initial"] = {{"matrix_file", c.initial.matrix_file}};
  } else {
    j["initial"] = {{"coherent_alpha0", {c.initial.coherent_alpha0.real(), c.initial.coherent_alpha0.imag()}},
                    {"atom", c.initial.atom == Spin::up ? "up" : "down"}};
  }
  j["grid"] = {{"t_start", c.grid.t_start}, {"t_end", c.grid.t_end}, {"n_steps", c.grid.n_steps}};
  json outs = json::array();
  for (OutputKind k : c.outputs)
    for (const auto& [kind, name] : output_names())
      if (kind == k) outs.push_back(name);
  j["outputs"] = outs;
  json w = io::spec_to_json(c.wigner_grid.spec);
  w["times"] = c.wigner_grid.times;
  j["wigner_grid"] = w;
  j["analytic_rho_c"] = to_string(c.analytic_rho_c);
  j["checkpoints"] = c.checkpoints;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(j, dir.empty() ? "." : dir.string());
}

/// Initial joint density: |alpha0><alpha0| (x) |atom><atom|, or the matrix file.
inline JointDensity initial_density(const RunConfig& c) {
  const Index n = c.params.n_trunc;
  if (!c.initial.from_file) {
    const auto psi = coherent_state(c.initial.coherent_alpha0, n);
    return JointDensity::product(projector(psi.amplitudes), c.initial.atom);
  }
  std::filesystem::path file(c.initial.matrix_file);
  if (file.is_relative()) file = std::filesystem::path(c.base_dir) / file;
  std::ifstream in(file);
  if (!in) throw ConfigError("initial.matrix_file: cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("initial.matrix_file: invalid JSON: ") + e.what());
  }
  if (!j.contains("rho")) throw ConfigError("initial.matrix_file: missing \"rho\"");
  Eigen::MatrixXcd full;
  try {
    full = io::matrix_from_json(j.at("rho"), "initial.matrix_file.rho");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (full.rows() != 2 * n || full.cols() != 2 * n)
    throw ConfigError("initial.matrix_file: expected a " + std::to_string(2 * n) + "x" + std::to_string(2 * n) +
                      " matrix for n_trunc=" + std::to_string(n));
  return JointDensity::from_matrix(full);
}

}  // namespace jctes::cli
