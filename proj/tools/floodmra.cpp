#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "floodmra/detail_tree.hpp"
#include "floodmra/errors.hpp"
#include "floodmra/metrics.hpp"
#include "floodmra/run.hpp"
#include "floodmra/scenarios.hpp"

namespace {

constexpr const char* kVersion = "floodmra 0.1.0";

int cmd_grid_generate(const std::string& dem_path, double epsilon, int max_level,
                      const std::string& wavelet, bool graded, const std::string& out) {
  using namespace floodmra;
  const WaveletKind kind = wavelet == "hw" ? WaveletKind::hw : WaveletKind::mw;
  const Raster dem = read_ascii_grid(dem_path);
  const NonUniformGrid grid = generate_static_grid(dem, epsilon, max_level, graded, kind);
  write_nug(grid, out);
  std::cout << "epsilon = " << epsilon << "\n"
            << "wavelet = " << (kind == WaveletKind::mw ? "mw" : "hw") << "\n"
            << (graded ? "graded = yes\n" : "graded = no\n")
            << format_grid_stats(grid_stats(grid.grid));
  return 0;
}

int cmd_grid_stats(const std::string& path) {
  using namespace floodmra;
  const NonUniformGrid grid = read_nug(path);
  std::cout << format_grid_stats(grid_stats(grid.grid));
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& solver,
            const std::string& grid_arg, const std::string& out_dir, int threads) {
  using namespace floodmra;
  ScenarioConfig cfg = read_config(config_path);
  if (!solver.empty()) {
    auto k = solver_from_name(solver);
    if (!k) throw ConfigError("unknown solver \"" + solver + "\"");
    cfg.solver = *k;
    if (solver_is_adaptive(cfg.solver)) cfg.grid_mode = GridMode::nonuniform;
  }
  if (!grid_arg.empty()) {
    if (grid_arg == "uniform") {
      cfg.grid_mode = GridMode::uniform;
      cfg.grid_file.clear();
    } else {
      cfg.grid_mode = GridMode::nonuniform;
      cfg.grid_file = grid_arg;
    }
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (threads > 0) cfg.threads = threads;
  if (solver_is_adaptive(cfg.solver) && cfg.max_level < 0)
    throw ConfigError("solver " + std::string(solver_name(cfg.solver)) +
                      " requires max_level in the config");

  const RunResult res = run_scenario(cfg);
  std::cout << "run complete: " << res.stats.steps << " steps, " << res.outputs_written
            << " outputs in " << res.output_dir << "\n";
  return 0;
}

int cmd_compare(const std::string& test_dir, const std::string& ref_dir, double wet,
                const std::string& csv_out) {
  using namespace floodmra;
  const CompareReport rep = compare_runs(test_dir, ref_dir, wet);
  std::cout << format_report(rep);
  if (!csv_out.empty()) write_report_csv(rep, csv_out);
  return 0;
}

int cmd_scenario_emit(const std::string& name, const std::string& out, int cells, int size,
                      unsigned seed, int max_level) {
  using namespace floodmra;
  Scenario s;
  if (name == "valley")
    s = make_valley(384, 32, max_level > 0 ? max_level : 5);
  else if (name == "dambreak1d")
    s = make_dambreak_1d(cells);
  else if (name == "dambreak1d-closed")
    s = make_dambreak_1d(cells, true);
  else if (name == "lake")
    s = make_lake_at_rest(size, seed);
  else if (name == "lake-island")
    s = make_lake_at_rest(size, seed, true);
  else
    throw ConfigError("unknown scenario \"" + name +
                      "\" (valley|dambreak1d|dambreak1d-closed|lake|lake-island)");
  emit_scenario(s, out);
  std::cout << "wrote scenario " << s.name << " to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floodmra: shallow-water flood solvers on wavelet-adapted grids"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // grid
  auto* grid = app.add_subcommand("grid", "generate or inspect non-uniform grids");
  grid->require_subcommand(1);
  auto* gen = grid->add_subcommand("generate", "build a non-uniform grid from a DEM");
  std::string dem_path, gen_out, wavelet = "mw";
  double epsilon = 1e-3;
  int max_level = 0;
  bool graded = false;
  gen->add_option("--dem", dem_path, "DEM (ESRI ASCII grid)")->required();
  gen->add_option("--epsilon", epsilon, "detail significance threshold");
  gen->add_option("--max-level", max_level, "maximum refinement level")->required();
  gen->add_option("--wavelet", wavelet, "mw|hw")->check(CLI::IsMember({"mw", "hw"}));
  gen->add_flag("--graded", graded, "apply the 2:1 grading");
  gen->add_option("--out", gen_out, "output .nug path")->required();

  auto* stats = grid->add_subcommand("stats", "per-level leaf counts of a .nug grid");
  std::string stats_path;
  stats->add_option("--grid", stats_path, ".nug file")->required();

  // run
  auto* run = app.add_subcommand("run", "run a simulation from a scenario config");
  std::string config_path, run_solver, run_grid, run_out;
  int threads = 0;
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--solver", run_solver, "override solver (dg2|fv1|acc|mwdg2|hwfv1)");
  run->add_option("--grid", run_grid, "\"uniform\" or a .nug file");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--threads", threads, "worker threads for data-parallel loops");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare two run directories");
  std::string test_dir, ref_dir, csv_out;
  double wet = 0.01;
  cmp->add_option("--test", test_dir, "run directory under test")->required();
  cmp->add_option("--ref", ref_dir, "reference run directory")->required();
  cmp->add_option("--wet-threshold", wet, "inundation depth threshold (m)");
  cmp->add_option("--csv", csv_out, "also write report.csv here");

  // scenario
  auto* scen = app.add_subcommand("scenario", "built-in synthetic scenarios");
  scen->require_subcommand(1);
  auto* emit = scen->add_subcommand("emit", "write a scenario's input files");
  std::string scen_name, scen_out;
  int cells = 400, size = 32, scen_level = 0;
  unsigned seed = 1;
  emit->add_option("--name", scen_name, "valley|dambreak1d|dambreak1d-closed|lake|lake-island")
      ->required();
  emit->add_option("--out", scen_out, "output directory")->required();
  emit->add_option("--cells", cells, "dam-break cell count");
  emit->add_option("--size", size, "lake grid size");
  emit->add_option("--seed", seed, "lake random seed");
  emit->add_option("--max-level", scen_level, "valley maximum level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_grid_generate(dem_path, epsilon, max_level, wavelet, graded, gen_out);
    if (stats->parsed()) return cmd_grid_stats(stats_path);
    if (run->parsed()) return cmd_run(config_path, run_solver, run_grid, run_out, threads);
    if (cmp->parsed()) return cmd_compare(test_dir, ref_dir, wet, csv_out);
    if (emit->parsed()) return cmd_scenario_emit(scen_name, scen_out, cells, size, seed, scen_level);
  } catch (const floodmra::BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const floodmra::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const floodmra::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const floodmra::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
