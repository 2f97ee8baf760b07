#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "jctes/cli/commands.hpp"

namespace {

const char* kFooter = R"(Outputs (all numbers %.17g):
  simulate, solve (outputs: trajectory, components, snapshots)
    trajectory.csv / solution.csv
      t, tr_rho11, n_mean, sigma_z, purity, tail_weight
      solution.csv adds after t: lambda_plus_re/im, lambda_minus_re/im,
      alpha_plus_re/im, alpha_minus_re/im, mu1_re/im, mu2_re/im, F, T
    components.csv / solution_components.csv
      t, tr_plus_re/im, tr_minus_re/im, tr_c_re/im, a_plus_re/im, a_minus_re/im
      (traces of rho_+, rho_-, rho_c and <a> in rho_+-)
    snapshots.json / solution_snapshots.json
      full 2N x 2N density at the checkpoints, {"re": [[..]], "im": [[..]]}
  wigner (outputs: wigner)
    wigner_{plus,minus}_{grid,closed}_<i>.csv, wigner_c_{re,im}_grid_<i>.csv
      re, im, w   for wigner_grid.times[i]; each also as .json
    wigner_summary.csv
      index, t, component (+1, -1, 0 = rho_c), source (0 grid, 1 closed form),
      normalization, peak_re, peak_im, peak_w, max_abs_closed_minus_grid
  compare (outputs: compare)
    compare.json   deviations per component and checkpoint

Exit codes: 0 ok, 1 I/O error, 2 config error, 3 numerical error,
            4 tight comparison failed)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Jaynes-Cummings model: oracle, closed-form and doubled-space solvers"};
  app.footer(kFooter);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool quiet = false;
  std::string verb;

  for (const char* name : {"simulate", "solve", "wigner", "compare"}) {
    static const std::map<std::string, std::string> about = {
        {"simulate", "RK4 integration of the joint master equation"},
        {"solve", "closed-form rho_+-, rho_c on the time grid"},
        {"wigner", "Wigner grids of the closed-form components"},
        {"compare", "oracle vs closed form vs doubled-space report"}};
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_flag("--quiet", quiet, "suppress progress notes");
    sub->callback([&verb, name] { verb = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jctes::cli::kConfigError;
  }

  jctes::cli::CommandContext ctx;
  ctx.out_dir = out_dir;
  ctx.quiet = quiet;
  return jctes::cli::run_verb(verb, config_path, ctx);
}
