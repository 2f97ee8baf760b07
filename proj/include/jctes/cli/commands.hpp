#pragma once

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jctes/analytic.hpp"
#include "jctes/cli/config.hpp"
#include "jctes/io.hpp"
#include "jctes/oracle.hpp"
#include "jctes/tes.hpp"
#include "jctes/wigner.hpp"

namespace jctes::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kNumericalError = 3, kComparisonFailure = 4 };

/// Tolerance of every tight comparison in the compare report.
inline constexpr double kTightTolerance = 1e-6;

struct CommandContext {
  fs::path out_dir = ".";
  bool quiet = false;
  std::ostream* log = &std::cerr;

  void note(const std::string& msg) const {
    if (!quiet) *log << msg << '\n';
  }
};

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void write_grid_files(const fs::path& stem, const PhaseGrid& g) {
  std::ofstream csv(stem.string() + ".csv");
  if (!csv) throw std::runtime_error("cannot write " + stem.string() + ".csv");
  write_csv(csv, g);
  write_json(stem.string() + ".json", io::phase_grid_to_json(g));
}

namespace detail {

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {"t", "tr_rho11", "n_mean", "sigma_z", "purity", "tail_weight"};
  return cols;
}

inline const std::vector<std::string>& component_columns() {
  static const std::vector<std::string> cols = {"t",           "tr_plus_re",  "tr_plus_im",  "tr_minus_re",
                                                "tr_minus_im", "tr_c_re",     "tr_c_im",     "a_plus_re",
                                                "a_plus_im",   "a_minus_re",  "a_minus_im"};
  return cols;
}

inline std::vector<double> trajectory_row(double t, const JointDensity& rho) {
  return {t, rho.up_up.trace().real(), photon_number(rho), sigma_z(rho), purity(rho), tail_weight(rho)};
}

inline std::vector<double> component_row(double t, const DerivedComponents& d) {
  const FockOperator a = annihilation(d.plus.rows());
  const cplx tp = d.plus.trace(), tm = d.minus.trace(), tc = d.c.trace();
  const cplx ap = (a * d.plus).trace(), am = (a * d.minus).trace();
  return {t, tp.real(), tp.imag(), tm.real(), tm.imag(), tc.real(), tc.imag(), ap.real(), ap.imag(), am.real(),
          am.imag()};
}

/// Step indices round(j n_steps / K), j = 0..K, without repeats.
inline std::vector<std::size_t> checkpoint_steps(const TimeGrid& grid, std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j <= k; ++j) {
    const auto s = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(grid.n_steps) / static_cast<double>(k)));
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

inline std::size_t step_of(const TimeGrid& grid, double t) {
  return static_cast<std::size_t>(std::llround((t - grid.t_start) / grid.step()));
}

inline json snapshot(double t, const JointDensity& rho) {
  return {{"t", t}, {"rho", io::matrix_to_json(rho.to_matrix())}};
}

/// Analytic rho_+-, rho_c at time t (measured from t = 0) from the t = 0 components.
inline DerivedComponents analytic_components(const DerivedComponents& d0, double t, const ModelParams& p,
                                             RhoCForm form) {
  return {rho_pm_analytic(d0.plus, t, p, +1), rho_pm_analytic(d0.minus, t, p, -1), rho_c_analytic(d0.c, t, p, form)};
}

inline void require_zero_start(const RunConfig& c, const char* verb) {
  if (c.grid.t_start != 0.0)
    throw ConfigError(std::string("grid.t_start: ") + verb + " needs the closed forms, which start at t = 0");
}

}  // namespace detail

/// Brute-force joint evolution: trajectory.csv, components.csv, snapshots.json.
inline int cmd_simulate(const RunConfig& c, const CommandContext& ctx) {
  const bool traj = c.wants(OutputKind::trajectory);
  const bool comps = c.wants(OutputKind::components);
  const bool snaps = c.wants(OutputKind::snapshots);
  if (!traj && !comps && !snaps) {
    ctx.note("simulate: no trajectory, components or snapshots output requested");
    return kOk;
  }
  const JointDensity rho0 = initial_density(c);
  fs::create_directories(ctx.out_dir);

  std::optional<CsvWriter> traj_csv, comp_csv;
  if (traj) traj_csv.emplace(ctx.out_dir / "trajectory.csv", detail::trajectory_columns());
  if (comps) comp_csv.emplace(ctx.out_dir / "components.csv", detail::component_columns());
  const auto marks = detail::checkpoint_steps(c.grid, c.checkpoints);
  json shots = json::array();

  IntegratorOptions opts;
  opts.keep_states = false;
  integrate_joint(rho0, c.params, c.grid, opts, [&](double t, const JointDensity& rho) {
    if (traj_csv) traj_csv->row(detail::trajectory_row(t, rho));
    if (comp_csv) comp_csv->row(detail::component_row(t, derived_components(split_components(rho))));
    if (snaps && std::binary_search(marks.begin(), marks.end(), detail::step_of(c.grid, t)))
      shots.push_back(detail::snapshot(t, rho));
  });
  if (snaps) write_json(ctx.out_dir / "snapshots.json", {{"n_trunc", c.params.n_trunc}, {"snapshots", shots}});
  ctx.note("simulate: wrote results to " + ctx.out_dir.string());
  return kOk;
}

/// Closed-form solution on the grid: solution.csv, solution_components.csv,
/// solution_snapshots.json.
inline int cmd_solve(const RunConfig& c, const CommandContext& ctx) {
  const bool traj = c.wants(OutputKind::trajectory);
  const bool comps = c.wants(OutputKind::components);
  const bool snaps = c.wants(OutputKind::snapshots);
  if (!traj && !comps && !snaps) {
    ctx.note("solve: no trajectory, components or snapshots output requested");
    return kOk;
  }
  detail::require_zero_start(c, "solve");
  const ModelParams& p = c.params;
  p.validate();
  const JointDensity rho0 = initial_density(c);
  const DerivedComponents d0 = derived_components(split_components(rho0));
  fs::create_directories(ctx.out_dir);

  std::vector<std::string> cols = {"t",        "lambda_plus_re", "lambda_plus_im", "lambda_minus_re",
                                   "lambda_minus_im", "alpha_plus_re", "alpha_plus_im", "alpha_minus_re",
                                   "alpha_minus_im",  "mu1_re",        "mu1_im",        "mu2_re",
                                   "mu2_im",          "F",             "T"};
  for (std::size_t i = 1; i < detail::trajectory_columns().size(); ++i) cols.push_back(detail::trajectory_columns()[i]);

  std::optional<CsvWriter> traj_csv, comp_csv;
  if (traj) traj_csv.emplace(ctx.out_dir / "solution.csv", cols);
  if (comps) comp_csv.emplace(ctx.out_dir / "solution_components.csv", detail::component_columns());
  const auto marks = detail::checkpoint_steps(c.grid, c.checkpoints);
  json shots = json::array();

  // The alpha columns follow the coherent amplitude of rho_+-; for a matrix-file
  // start they use alpha0 = Tr(a rho_+-(0)) / Tr rho_+-(0).
  const FockOperator a = annihilation(p.n_trunc);
  auto start_amplitude = [&](const FockOperator& m) {
    const cplx tr = m.trace();
    return std::abs(tr) > 0.0 ? cplx((a * m).trace() / tr) : cplx(0.0);
  };
  const cplx a0_plus = c.initial.from_file ? start_amplitude(d0.plus) : c.initial.coherent_alpha0;
  const cplx a0_minus = c.initial.from_file ? start_amplitude(d0.minus) : c.initial.coherent_alpha0;

  for (std::size_t k = 0; k <= c.grid.n_steps; ++k) {
    const double t = c.grid.time(k);
    const DerivedComponents d = detail::analytic_components(d0, t, p, c.analytic_rho_c);
    const JointDensity rho = combine_components(components_from_derived(d));
    if (traj_csv) {
      const cplx lp = lambda_pm(t, p, +1), lm = lambda_pm(t, p, -1);
      const cplx ap = alpha_of_t(t, p, +1, a0_plus), am = alpha_of_t(t, p, -1, a0_minus);
      const CSolutionParams cs = c_solution_params(t, p);
      std::vector<double> row = {t,
                                 lp.real(),
                                 lp.imag(),
                                 lm.real(),
                                 lm.imag(),
                                 ap.real(),
                                 ap.imag(),
                                 am.real(),
                                 am.imag(),
                                 cs.mu1.real(),
                                 cs.mu1.imag(),
                                 cs.mu2.real(),
                                 cs.mu2.imag(),
                                 cs.bigF.real(),
                                 kraus_weight_T(t, p.gamma)};
      const auto obs = detail::trajectory_row(t, rho);
      row.insert(row.end(), obs.begin() + 1, obs.end());
      traj_csv->row(row);
    }
    if (comp_csv) comp_csv->row(detail::component_row(t, d));
    if (snaps && std::binary_search(marks.begin(), marks.end(), k)) shots.push_back(detail::snapshot(t, rho));
  }
  if (snaps)
    write_json(ctx.out_dir / "solution_snapshots.json",
               {{"n_trunc", p.n_trunc}, {"rho_c_form", to_string(c.analytic_rho_c)}, {"snapshots", shots}});
  ctx.note("solve: wrote results to " + ctx.out_dir.string());
  return kOk;
}

/// Phase-space grids of the analytic rho_+- (grid and, for coherent starts,
/// closed form) and rho_c (grid only) at wigner_grid.times.
inline int cmd_wigner(const RunConfig& c, const CommandContext& ctx) {
  if (!c.wants(OutputKind::wigner)) {
    ctx.note("wigner: \"wigner\" is not in outputs");
    return kOk;
  }
  const ModelParams& p = c.params;
  p.validate();
  const PhaseGridSpec& spec = c.wigner_grid.spec;
  spec.validate();
  const JointDensity rho0 = initial_density(c);
  const DerivedComponents d0 = derived_components(split_components(rho0));
  fs::create_directories(ctx.out_dir);

  CsvWriter summary(ctx.out_dir / "wigner_summary.csv",
                    {"index", "t", "component", "source", "normalization", "peak_re", "peak_im", "peak_w",
                     "max_abs_closed_minus_grid"});
  auto summarize = [&](std::size_t i, double t, double component, double source, const PhaseGrid& g,
                       double closed_gap) {
    const auto [pi, pj] = g.argmax();
    const cplx z = spec.point(pi, pj);
    summary.row({static_cast<double>(i), t, component, source, g.normalization(), z.real(), z.imag(),
                 g.values(pi, pj), closed_gap});
  };

  for (std::size_t i = 0; i < c.wigner_grid.times.size(); ++i) {
    const double t = c.wigner_grid.times[i];
    const std::string tag = std::to_string(i);
    const DerivedComponents d = detail::analytic_components(d0, t, p, c.analytic_rho_c);
    for (int sign : {+1, -1}) {
      const std::string name = sign > 0 ? "plus" : "minus";
      const FockOperator& rho = sign > 0 ? d.plus : d.minus;
      const PhaseGrid grid = wigner_grid(rho, spec);
      write_grid_files(ctx.out_dir / ("wigner_" + name + "_grid_" + tag), grid);
      double gap = std::nan("");
      if (!c.initial.from_file) {
        const PhaseGrid closed = sample_phase_grid(
            spec, [&](cplx z) { return wigner_closed_pm(z, t, p, sign, c.initial.coherent_alpha0); });
        write_grid_files(ctx.out_dir / ("wigner_" + name + "_closed_" + tag), closed);
        gap = (closed.values - grid.values).cwiseAbs().maxCoeff();
        summarize(i, t, sign, 1.0, closed, std::nan(""));
      }
      summarize(i, t, sign, 0.0, grid, gap);
    }
    const auto [re, im] = wigner_grid_complex(d.c, spec);
    write_grid_files(ctx.out_dir / ("wigner_c_re_grid_" + tag), re);
    write_grid_files(ctx.out_dir / ("wigner_c_im_grid_" + tag), im);
    summarize(i, t, 0.0, 0.0, re, std::nan(""));
  }
  ctx.note("wigner: wrote results to " + ctx.out_dir.string());
  return kOk;
}

/// Entrywise interior deviations at the comparison checkpoints.
struct Deviation {
  std::vector<double> per_checkpoint;
  bool tight = false;

  double max() const { return per_checkpoint.empty() ? 0.0 : *std::max_element(per_checkpoint.begin(), per_checkpoint.end()); }
  double mean() const {
    double s = 0.0;
    for (double x : per_checkpoint) s += x;
    return per_checkpoint.empty() ? 0.0 : s / static_cast<double>(per_checkpoint.size());
  }
  bool pass() const { return !tight || max() <= kTightTolerance; }

  json to_json() const {
    json j = {{"max", max()}, {"mean", mean()}, {"per_checkpoint", per_checkpoint}, {"tight", tight}};
    if (tight) {
      j["tolerance"] = kTightTolerance;
      j["pass"] = pass();
    }
    return j;
  }
};

struct ComponentReport {
  ComponentKind kind = ComponentKind::plus;
  std::map<std::string, Deviation> deviations;
  double oracle_trace_drift = 0.0;
  double oracle_tail_weight_max = 0.0;
  json extra = json::object();

  bool pass() const {
    for (const auto& [_, d] : deviations)
      if (!d.pass()) return false;
    return true;
  }
};

struct CompareReport {
  std::vector<double> checkpoint_times;
  std::vector<ComponentReport> components;
  Deviation joint_vs_components;

  bool pass() const {
    for (const auto& c : components)
      if (!c.pass()) return false;
    return joint_vs_components.pass();
  }
};

/// Oracle (RK4 per component), closed form and doubled-space evolution of
/// rho_+, rho_-, rho_c at the checkpoints, plus a brute-force joint run.
/// The rho_+- comparisons and the rho_c doubled-space comparison are tight.
inline CompareReport run_comparison(const RunConfig& c) {
  detail::require_zero_start(c, "compare");
  const ModelParams& p = c.params;
  p.validate();
  const TimeGrid& grid = c.grid;
  grid.validate();
  const JointDensity rho0 = initial_density(c);
  const DerivedComponents d0 = derived_components(split_components(rho0));
  const auto marks = detail::checkpoint_steps(grid, c.checkpoints);

  CompareReport report;
  for (std::size_t k : marks) report.checkpoint_times.push_back(grid.time(k));

  const TesAlgebra alg = TesAlgebra::build(p.n_trunc);
  std::vector<FockOperator> oracle_schrodinger[3];

  const ComponentKind kinds[3] = {ComponentKind::plus, ComponentKind::minus, ComponentKind::c};
  const FockOperator* starts[3] = {&d0.plus, &d0.minus, &d0.c};
  for (int ci = 0; ci < 3; ++ci) {
    const ComponentKind kind = kinds[ci];
    const FockOperator& op0 = *starts[ci];
    ComponentReport cr;
    cr.kind = kind;

    // Oracle in the rotational picture, sampled at the checkpoints.
    std::vector<FockOperator> oracle_rot;
    const cplx trace0 = op0.trace();
    IntegratorOptions opts;
    opts.picture = Picture::rotational;
    opts.keep_states = false;
    const auto traj = integrate_component(kind, op0, p, grid, opts, [&](double t, const FockOperator& m) {
      cr.oracle_trace_drift = std::max(cr.oracle_trace_drift, std::abs(m.trace() - trace0));
      if (std::binary_search(marks.begin(), marks.end(), detail::step_of(grid, t))) oracle_rot.push_back(m);
    });
    for (double tw : traj.tail_weights) cr.oracle_tail_weight_max = std::max(cr.oracle_tail_weight_max, tw);
    for (std::size_t j = 0; j < marks.size(); ++j)
      oracle_schrodinger[ci].push_back(rotate_out_of(oracle_rot[j], p.omega * report.checkpoint_times[j]));

    // Doubled-space evolution, segment by segment on the same step.
    const LinearGenerator gen = kind == ComponentKind::c ? generator_c_family(p, alg)
                                                         : generator_pm_family(kind == ComponentKind::plus ? +1 : -1, p, alg);
    Deviation tes;
    tes.tight = true;
    DoubledVector v = vectorize(op0);
    tes.per_checkpoint.push_back(interior_max_abs(FockOperator(devectorize(v) - oracle_rot[0])));
    for (std::size_t j = 1; j < marks.size(); ++j) {
      const TimeGrid seg{grid.time(marks[j - 1]), grid.time(marks[j]), marks[j] - marks[j - 1]};
      v = evolve_vectorized(gen, v, seg);
      tes.per_checkpoint.push_back(interior_max_abs(FockOperator(devectorize(v) - oracle_rot[j])));
    }
    cr.deviations["tes_vs_oracle"] = tes;

    if (kind != ComponentKind::c) {
      const int sign = kind == ComponentKind::plus ? +1 : -1;
      Deviation an;
      an.tight = true;
      for (std::size_t j = 0; j < marks.size(); ++j) {
        const FockOperator closed = rho_pm_analytic(op0, report.checkpoint_times[j], p, sign);
        an.per_checkpoint.push_back(interior_max_abs(FockOperator(closed - oracle_schrodinger[ci][j])));
      }
      cr.deviations["analytic_vs_oracle"] = an;
    } else {
      Deviation printed, corrected;
      json ratio = json::array();
      for (std::size_t j = 0; j < marks.size(); ++j) {
        const double t = report.checkpoint_times[j];
        const FockOperator pr = rho_c_analytic(op0, t, p, RhoCForm::printed);
        const CSolutionParams cs = c_solution_params(t, p);
        const cplx scale = rho_c_prefactor(cs, RhoCForm::corrected) / rho_c_prefactor(cs, RhoCForm::printed);
        const FockOperator co = scale * pr;
        printed.per_checkpoint.push_back(interior_max_abs(FockOperator(pr - oracle_schrodinger[ci][j])));
        corrected.per_checkpoint.push_back(interior_max_abs(FockOperator(co - oracle_schrodinger[ci][j])));
        ratio.push_back({(1.0 / scale).real(), (1.0 / scale).imag()});
      }
      cr.deviations["analytic_printed_vs_oracle"] = printed;
      cr.deviations["analytic_corrected_vs_oracle"] = corrected;
      cr.deviations["analytic_vs_oracle"] = c.analytic_rho_c == RhoCForm::printed ? printed : corrected;
      cr.extra["analytic_form"] = to_string(c.analytic_rho_c);
      cr.extra["printed_over_corrected_prefactor"] = ratio;
    }
    report.components.push_back(std::move(cr));
  }

  // Joint run (rotational picture, rotated back exactly) split into
  // components; reported only.
  IntegratorOptions jopts;
  jopts.picture = Picture::rotational;
  jopts.keep_states = false;
  std::size_t j = 0;
  integrate_joint(rho0, p, grid, jopts, [&](double t, const JointDensity& rot) {
    if (!std::binary_search(marks.begin(), marks.end(), detail::step_of(grid, t))) return;
    const DerivedComponents d = derived_components(split_components(from_rotational_picture(rot, t, p)));
    const FockOperator* got[3] = {&d.plus, &d.minus, &d.c};
    double worst = 0.0;
    for (int ci = 0; ci < 3; ++ci)
      worst = std::max(worst, interior_max_abs(FockOperator(*got[ci] - oracle_schrodinger[ci][j])));
    report.joint_vs_components.per_checkpoint.push_back(worst);
    ++j;
  });
  return report;
}

inline json report_to_json(const CompareReport& r, const RunConfig& c) {
  json comps = json::object();
  for (const auto& cr : r.components) {
    json jc = cr.extra;
    for (const auto& [name, d] : cr.deviations) jc[name] = d.to_json();
    jc["oracle_trace_drift"] = cr.oracle_trace_drift;
    jc["oracle_tail_weight_max"] = cr.oracle_tail_weight_max;
    jc["pass"] = cr.pass();
    comps[to_string(cr.kind)] = jc;
  }
  return {{"config", emit_config(c)},
          {"checkpoint_times", r.checkpoint_times},
          {"tight_tolerance", kTightTolerance},
          {"components", comps},
          {"joint_vs_components", r.joint_vs_components.to_json()},
          {"pass", r.pass()}};
}

/// Writes compare.json; exit 4 if a tight comparison fails.
inline int cmd_compare(const RunConfig& c, const CommandContext& ctx) {
  if (!c.wants(OutputKind::compare)) {
    ctx.note("compare: \"compare\" is not in outputs");
    return kOk;
  }
  const CompareReport r = run_comparison(c);
  fs::create_directories(ctx.out_dir);
  write_json(ctx.out_dir / "compare.json", report_to_json(r, c));
  for (const auto& cr : r.components)
    for (const auto& [name, d] : cr.deviations)
      ctx.note(std::string("compare: ") + to_string(cr.kind) + " " + name + " max " + format_double(d.max()) +
               (d.tight ? (d.pass() ? " PASS" : " FAIL") : ""));
  return r.pass() ? kOk : kComparisonFailure;
}

/// Loads the config, runs the verb and maps failures to exit codes.
inline int run_verb(const std::string& verb, const std::string& config_path, const CommandContext& ctx) {
  try {
    const RunConfig c = load_config(config_path);
    if (verb == "simulate") return cmd_simulate(c, ctx);
    if (verb == "solve") return cmd_solve(c, ctx);
    if (verb == "wigner") return cmd_wigner(c, ctx);
    if (verb == "compare") return cmd_compare(c, ctx);
    *ctx.log << "unknown verb: " << verb << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    *ctx.log << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    *ctx.log << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    *ctx.log << "error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace jctes::cli
