#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "jctes/cli/commands.hpp"
#include "jctes/cli/config.hpp"

using namespace jctes;
using namespace jctes::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json kBase = json::parse(R"({
  "params": {"omega": 1.0, "lambda": 0.1, "gamma": 0.2, "n_trunc": 20},
  "initial": {"coherent_alpha0": [1.0, 0.0], "atom": "up"},
  "grid": {"t_end": 1.0, "n_steps": 100},
  "outputs": ["trajectory", "components"]
})");

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("jctes_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

int run_cli(const std::string& verb, const fs::path& config, const fs::path& out) {
  const std::string cmd = std::string(JCTES_CLI_PATH) + " " + verb + " --config " + config.string() + " --out " +
                          out.string() + " --quiet 2>" + (out.parent_path() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Table = std::map<std::string, std::vector<double>>;

Table read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) names.push_back(cell);
  Table t;
  while (std::getline(in, line)) {
    std::stringstream rs(line);
    std::size_t k = 0;
    for (std::string cell; std::getline(rs, cell, ','); ++k) t[names.at(k)].push_back(std::stod(cell));
  }
  return t;
}

std::string config_error(const json& j) {
  try {
    parse_config(j, ".");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, RoundTrip) {
  json j = kBase;
  j["wigner_grid"] = {{"re_range", {-2.0, 2.5}}, {"n_re", 11}, {"times", {0.0, 0.5}}};
  j["analytic_rho_c"] = "corrected";
  j["checkpoints"] = 4;
  j["outputs"] = {"compare", "wigner", "snapshots"};
  const RunConfig c = parse_config(j, ".");
  EXPECT_EQ(c.params.n_trunc, 20);
  EXPECT_EQ(c.initial.coherent_alpha0, cplx(1.0, 0.0));
  EXPECT_EQ(c.wigner_grid.spec.n_re, 11);
  EXPECT_EQ(c.wigner_grid.spec.re_max, 2.5);
  EXPECT_TRUE(c.wants(OutputKind::wigner));
  EXPECT_FALSE(c.wants(OutputKind::trajectory));
  const json emitted = emit_config(c);
  const RunConfig again = parse_config(emitted, ".");
  EXPECT_TRUE(again == c);
  EXPECT_EQ(emit_config(again), emitted);
}

TEST(Config, RejectionNamesTheField) {
  auto with = [](const json::json_pointer& ptr, const json& v) {
    json j = kBase;
    j[ptr] = v;
    return j;
  };
  EXPECT_NE(config_error(with(json::json_pointer("/params/foo"), 1)).find("params.foo"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/extra"), 1)).find("extra"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/params/gamma"), -0.1)).find("params.gamma"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/params/n_trunc"), 1)).find("params.n_trunc"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/params/n_trunc"), 2.5)).find("params.n_trunc"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/grid/n_steps"), 0)).find("grid.n_steps"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/grid/t_end"), -1.0)).find("grid.t_end"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/initial/atom"), "left")).find("initial.atom"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/initial/coherent_alpha0"), 1.0)).find("initial.coherent_alpha0"),
            std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/outputs/0"), "movie")).find("outputs"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/wigner_grid/n_re"), 0)).find("wigner_grid.n_re"), std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/wigner_grid/bogus"), 0)).find("wigner_grid.bogus"),
            std::string::npos);
  EXPECT_NE(config_error(with(json::json_pointer("/checkpoints"), 1000)).find("checkpoints"), std::string::npos);
  json missing = kBase;
  missing.erase("grid");
  EXPECT_NE(config_error(missing).find("grid"), std::string::npos);
}

TEST(Config, MatrixFileInitialCondition) {
  const fs::path dir = scratch("matrix");
  const Index n = 6;
  const JointDensity rho = JointDensity::product(projector(coherent_state(0.3, n).amplitudes), Spin::down);
  std::ofstream(dir / "rho.json") << json{{"rho", io::matrix_to_json(rho.to_matrix())}}.dump();
  json j = kBase;
  j["params"]["n_trunc"] = n;
  j["initial"] = {{"matrix_file", "rho.json"}};
  const RunConfig c = parse_config(j, dir.string());
  EXPECT_LE(max_abs(initial_density(c) - rho), 0.0);
  j["params"]["n_trunc"] = 7;
  EXPECT_THROW(initial_density(parse_config(j, dir.string())), ConfigError);
  j["initial"]["atom"] = "up";
  EXPECT_THROW(parse_config(j, dir.string()), ConfigError);
}

TEST(Cli, ZeroOutputsWritesNothing) {
  const fs::path dir = scratch("empty");
  json j = kBase;
  j["outputs"] = json::array();
  const fs::path cfg = write_config(dir, j);
  for (const char* verb : {"simulate", "solve", "wigner", "compare"}) {
    EXPECT_EQ(run_cli(verb, cfg, dir / "out"), 0) << verb;
    EXPECT_FALSE(fs::exists(dir / "out") && !fs::is_empty(dir / "out")) << verb;
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  json bad = kBase;
  bad["params"]["typo"] = 1;
  EXPECT_EQ(run_cli("simulate", write_config(dir, bad), dir / "out"), 2);
  EXPECT_NE(slurp(dir / "stderr.txt").find("params.typo"), std::string::npos);
  EXPECT_EQ(run_cli("simulate", dir / "missing.json", dir / "out"), 2);

  // A coherent state close to the top of a small space overflows the tail.
  json overflow = kBase;
  overflow["params"]["n_trunc"] = 6;
  overflow["initial"]["coherent_alpha0"] = {1.5, 0.0};
  EXPECT_EQ(run_cli("simulate", write_config(dir, overflow), dir / "out"), 3);

  // Strong coupling at the largest allowed step: the oracle's own RK4 error
  // exceeds the tight tolerance, so the report is written and the exit is 4.
  json coarse = json::parse(R"({
    "params": {"omega": 0.0, "lambda": 1.0, "gamma": 0.0, "n_trunc": 60},
    "initial": {"coherent_alpha0": [3.0, 0.0], "atom": "up"},
    "grid": {"t_end": 1.0, "n_steps": 10},
    "outputs": ["compare"], "checkpoints": 2})");
  EXPECT_EQ(run_cli("compare", write_config(dir, coarse), dir / "coarse"), 4);
  const json report = json::parse(slurp(dir / "coarse" / "compare.json"));
  EXPECT_FALSE(report.at("pass").get<bool>());

  // Writing into a path that is a regular file is an I/O failure.
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(run_cli("simulate", write_config(dir, kBase), dir / "blocker"), 1);
}

TEST(Cli, DeterministicOutputs) {
  const fs::path dir = scratch("determinism");
  json j = kBase;
  j["outputs"] = {"trajectory", "components", "snapshots"};
  j["checkpoints"] = 2;
  const fs::path cfg = write_config(dir, j);
  for (const char* verb : {"simulate", "solve"}) {
    ASSERT_EQ(run_cli(verb, cfg, dir / "a"), 0);
    ASSERT_EQ(run_cli(verb, cfg, dir / "b"), 0);
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 6u);
}

TEST(Cli, SimulateLossyCavityDecay) {
  // lambda = 0: <a^+ a> = |alpha0|^2 e^{-gamma t}; fit log n linearly in t.
  const fs::path dir = scratch("decay");
  json j = kBase;
  j["params"]["lambda"] = 0.0;
  j["params"]["n_trunc"] = 30;
  j["grid"] = {{"t_end", 10.0}, {"n_steps", 1000}};
  j["outputs"] = {"trajectory"};
  ASSERT_EQ(run_cli("simulate", write_config(dir, j), dir / "out"), 0);
  const Table t = read_csv(dir / "out" / "trajectory.csv");
  const auto& ts = t.at("t");
  const auto& ns = t.at("n_mean");
  ASSERT_EQ(ts.size(), 1001u);
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double y = std::log(ns[k]);
    st += ts[k];
    sy += y;
    stt += ts[k] * ts[k];
    sty += ts[k] * y;
  }
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  const double icept = (sy - slope * st) / m;
  double residual = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k)
    residual = std::max(residual, std::abs(std::log(ns[k]) - (icept + slope * ts[k])));
  EXPECT_LT(residual, 1e-6);
  EXPECT_NEAR(slope, -0.2, 1e-6);
  EXPECT_NEAR(t.at("tr_rho11").back(), 1.0, 1e-12);
  EXPECT_NEAR(t.at("sigma_z").front(), 1.0, 1e-15);
}

TEST(Cli, SolveColumns) {
  const fs::path dir = scratch("solve");
  json j = kBase;
  j["grid"] = {{"t_end", 100.0}, {"n_steps", 200}};
  j["outputs"] = {"trajectory"};
  ASSERT_EQ(run_cli("solve", write_config(dir, j), dir / "out"), 0);
  const Table t = read_csv(dir / "out" / "solution.csv");
  const ModelParams p{1.0, 0.1, 0.2, 20};
  // t = 0 row reproduces the initial expectations.
  EXPECT_EQ(t.at("t").front(), 0.0);
  EXPECT_NEAR(t.at("tr_rho11").front(), 1.0, 1e-15);
  EXPECT_NEAR(t.at("n_mean").front(), 1.0, 1e-12);
  EXPECT_NEAR(t.at("sigma_z").front(), 1.0, 1e-15);
  EXPECT_EQ(t.at("lambda_plus_re").front(), 0.0);
  EXPECT_EQ(t.at("alpha_plus_re").front(), 1.0);
  // lambda_+ column against quadrature.
  const std::size_t k = 3;  // t = 1.5
  const double tk = t.at("t")[k];
  const cplx quad_lp = -kI * p.lambda_c * quad::adaptive_simpson(
                                              [&](double s) { return std::exp(cplx(0.5 * p.gamma, p.omega) * s); },
                                              0.0, tk, 1e-13);
  EXPECT_LT(std::abs(cplx(t.at("lambda_plus_re")[k], t.at("lambda_plus_im")[k]) - quad_lp), 1e-10);
  // Long-time alpha columns: centre plus the decayed memory e^{-gamma t/2} |alpha0 - centre|.
  for (int sign : {+1, -1}) {
    const std::string s = sign > 0 ? "plus" : "minus";
    const cplx centre = alpha_steady(p, sign);
    const cplx got(t.at("alpha_" + s + "_re").back(), t.at("alpha_" + s + "_im").back());
    const double tend = t.at("t").back();
    const cplx memory = std::exp(-cplx(0.5 * p.gamma, p.omega) * tend) * (1.0 - centre);
    EXPECT_LT(std::abs(got - centre - memory), 1e-12);
  }
  EXPECT_NEAR(t.at("T").back(), 1.0 - std::exp(-20.0), 1e-15);
}

TEST(Cli, WignerGridsAndSummary) {
  const fs::path dir = scratch("wigner");
  json j = kBase;
  j["params"]["n_trunc"] = 30;
  j["initial"]["coherent_alpha0"] = {0.5, 0.5};
  j["outputs"] = {"wigner"};
  j["wigner_grid"] = {{"re_range", {-3.0, 3.0}}, {"im_range", {-3.0, 3.0}}, {"n_re", 25}, {"n_im", 25},
                      {"times", {0.0, 2.0}}};
  ASSERT_EQ(run_cli("wigner", write_config(dir, j), dir / "out"), 0);
  const Table s = read_csv(dir / "out" / "wigner_summary.csv");
  const std::size_t rows = s.at("t").size();
  ASSERT_GT(rows, 0u);
  for (std::size_t r = 0; r < rows; ++r) {
    const double comp = s.at("component")[r];
    if (comp == 0.0) continue;
    EXPECT_NEAR(s.at("normalization")[r], 1.0, 0.01);
    if (s.at("source")[r] == 0.0) EXPECT_LE(s.at("max_abs_closed_minus_grid")[r], 1e-6);
    if (s.at("t")[r] == 0.0) {
      EXPECT_NEAR(s.at("peak_w")[r], 2.0, 1e-9);
      EXPECT_NEAR(s.at("peak_re")[r], 0.5, 1e-12);
      EXPECT_NEAR(s.at("peak_im")[r], 0.5, 1e-12);
    }
  }
  for (const char* f : {"wigner_plus_grid_0.csv", "wigner_minus_closed_1.json", "wigner_c_re_grid_1.csv",
                        "wigner_c_im_grid_0.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const Table g = read_csv(dir / "out" / "wigner_plus_grid_0.csv");
  EXPECT_EQ(g.at("w").size(), 625u);
}

TEST(Cli, CompareStandardSet) {
  const fs::path dir = scratch("compare");
  const json j = json::parse(R"({
    "params": {"omega": 1.0, "lambda": 0.1, "gamma": 0.2, "n_trunc": 40},
    "initial": {"coherent_alpha0": [1.0, 0.0], "atom": "up"},
    "grid": {"t_end": 5.0, "n_steps": 500},
    "outputs": ["compare"], "checkpoints": 5})");
  ASSERT_EQ(run_cli("compare", write_config(dir, j), dir / "out"), 0);
  const json r = json::parse(slurp(dir / "out" / "compare.json"));
  EXPECT_TRUE(r.at("pass").get<bool>());
  for (const char* comp : {"plus", "minus"}) {
    EXPECT_LE(r.at("components").at(comp).at("analytic_vs_oracle").at("max").get<double>(), 1e-6);
    EXPECT_LE(r.at("components").at(comp).at("tes_vs_oracle").at("max").get<double>(), 1e-6);
  }
  const json& c = r.at("components").at("c");
  EXPECT_TRUE(c.contains("analytic_printed_vs_oracle"));
  EXPECT_TRUE(c.contains("analytic_corrected_vs_oracle"));
  EXPECT_FALSE(c.at("analytic_printed_vs_oracle").at("tight").get<bool>());
  EXPECT_LE(c.at("tes_vs_oracle").at("max").get<double>(), 1e-6);
  EXPECT_EQ(r.at("checkpoint_times").size(), 6u);
}

TEST(Cli, CompareFreeEvolution) {
  // gamma = lambda = 0: every path is the free rotation.
  const fs::path dir = scratch("free");
  json j = kBase;
  j["params"]["lambda"] = 0.0;
  j["params"]["gamma"] = 0.0;
  j["grid"] = {{"t_end", 3.0}, {"n_steps", 300}};
  j["outputs"] = {"compare"};
  j["checkpoints"] = 3;
  ASSERT_EQ(run_cli("compare", write_config(dir, j), dir / "out"), 0);
  const json r = json::parse(slurp(dir / "out" / "compare.json"));
  for (const auto& [name, comp] : r.at("components").items())
    for (const auto& [key, dev] : comp.items())
      if (dev.is_object() && dev.contains("max")) EXPECT_LE(dev.at("max").get<double>(), 1e-10) << name << " " << key;
  EXPECT_LE(r.at("joint_vs_components").at("max").get<double>(), 1e-10);
}

TEST(Cli, InProcessReportMatchesFields) {
  RunConfig c = parse_config(kBase, ".");
  c.checkpoints = 2;
  const CompareReport r = run_comparison(c);
  ASSERT_EQ(r.components.size(), 3u);
  EXPECT_EQ(r.checkpoint_times, (std::vector<double>{0.0, 0.5, 1.0}));
  const json j = report_to_json(r, c);
  EXPECT_TRUE(j.at("components").at("c").contains("analytic_vs_oracle"));
  EXPECT_EQ(j.at("config"), emit_config(c));
}
