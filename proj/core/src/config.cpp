#include "floodmra/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "floodmra/errors.hpp"

namespace floodmra {

const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::dg2: return "dg2";
    case SolverKind::fv1: return "fv1";
    case SolverKind::acc: return "acc";
    case SolverKind::mwdg2: return "mwdg2";
    case SolverKind::hwfv1: return "hwfv1";
  }
  return "?";
}

std::optional<SolverKind> solver_from_name(const std::string& s) {
  if (s == "dg2") return SolverKind::dg2;
  if (s == "fv1") return SolverKind::fv1;
  if (s == "acc") return SolverKind::acc;
  if (s == "mwdg2") return SolverKind::mwdg2;
  if (s == "hwfv1") return SolverKind::hwfv1;
  return std::nullopt;
}

bool solver_is_adaptive(SolverKind k) {
  return k == SolverKind::mwdg2 || k == SolverKind::hwfv1;
}

double ScenarioConfig::courant_for(SolverKind k) const {
  if (courant > 0.0) return courant;
  switch (k) {
    case SolverKind::dg2:
    case SolverKind::mwdg2: return 0.33;
    case SolverKind::fv1:
    case SolverKind::hwfv1: return 0.5;
    case SolverKind::acc: return 0.7;
  }
  return 0.33;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Parser {
  std::vector<std::string> errors;
  std::string origin;

  void fail(int line, const std::string& msg) {
    errors.push_back(origin + ":" + std::to_string(line) + ": " + msg);
  }

  bool number(int line, const std::string& key, const std::string& v, double& out) {
    std::istringstream ss(v);
    if (ss >> out && (ss >> std::ws).eof()) return true;
    fail(line, key + ": expected a number, got \"" + v + "\"");
    return false;
  }

  bool integer(int line, const std::string& key, const std::string& v, int& out) {
    double d;
    if (!number(line, key, v, d)) return false;
    out = static_cast<int>(d);
    if (out != d) {
      fail(line, key + ": expected an integer, got \"" + v + "\"");
      return false;
    }
    return true;
  }
};

std::optional<BoundaryKind> boundary_from_name(const std::string& s) {
  if (s == "reflective") return BoundaryKind::reflective;
  if (s == "open") return BoundaryKind::open;
  return std::nullopt;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  ScenarioConfig c;
  Parser p;
  p.origin = origin;

  bool saw_dem = false, saw_solver = false, saw_end_time = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      p.fail(line, "expected `key = value`, got \"" + s + "\"");
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (val.empty()) {
      p.fail(line, key + ": empty value");
      continue;
    }

    if (key == "dem_path") {
      c.dem_path = val;
      saw_dem = true;
    } else if (key == "solver") {
      if (auto k = solver_from_name(val)) {
        c.solver = *k;
        saw_solver = true;
      } else {
        p.fail(line, "unknown solver \"" + val + "\" (dg2|fv1|acc|mwdg2|hwfv1)");
      }
    } else if (key == "grid_mode") {
      if (val == "uniform")
        c.grid_mode = GridMode::uniform;
      else if (val == "nonuniform")
        c.grid_mode = GridMode::nonuniform;
      else
        p.fail(line, "grid_mode must be uniform or nonuniform");
    } else if (key == "epsilon") {
      p.number(line, key, val, c.epsilon);
    } else if (key == "max_level") {
      p.integer(line, key, val, c.max_level);
    } else if (key == "end_time") {
      if (p.number(line, key, val, c.end_time)) saw_end_time = true;
    } else if (key == "output_interval") {
      p.number(line, key, val, c.output_interval);
    } else if (key == "gauge_interval") {
      p.number(line, key, val, c.gauge_interval);
    } else if (key == "manning") {
      p.number(line, key, val, c.manning);
    } else if (key == "manning_raster") {
      c.manning_raster = val;
    } else if (key == "g") {
      p.number(line, key, val, c.g);
    } else if (key == "h_dry") {
      p.number(line, key, val, c.h_dry);
    } else if (key == "wet_threshold") {
      p.number(line, key, val, c.wet_threshold);
    } else if (key == "courant") {
      p.number(line, key, val, c.courant);
    } else if (key == "boundary_n" || key == "boundary_e" || key == "boundary_s" ||
               key == "boundary_w") {
      auto b = boundary_from_name(val);
      if (!b) {
        p.fail(line, key + ": must be reflective or open");
      } else {
        int idx = key.back() == 'n' ? 0 : key.back() == 'e' ? 1 : key.back() == 's' ? 2 : 3;
        c.boundary[idx] = *b;
      }
    } else if (key == "inflow") {
      // "<hydrograph path> @ i0 j0 i1 j1"
      auto at = val.find('@');
      if (at == std::string::npos) {
        p.fail(line, "inflow: expected \"<csv path> @ i0 j0 i1 j1\"");
        continue;
      }
      InflowSpec f;
      f.hydrograph_path = trim(val.substr(0, at));
      std::istringstream rs(val.substr(at + 1));
      if (!(rs >> f.i0 >> f.j0 >> f.i1 >> f.j1) || f.hydrograph_path.empty()) {
        p.fail(line, "inflow: expected \"<csv path> @ i0 j0 i1 j1\"");
        continue;
      }
      if (f.i1 < f.i0 || f.j1 < f.j0) {
        p.fail(line, "inflow: cell range must satisfy i0 <= i1 and j0 <= j1");
        continue;
      }
      c.inflows.push_back(f);
    } else if (key == "gauge") {
      GaugeSpec gp;
      std::istringstream gs(val);
      if (!(gs >> gp.x >> gp.y)) {
        p.fail(line, "gauge: expected \"x y\"");
        continue;
      }
      c.gauges.push_back(gp);
    } else if (key == "initial_depth") {
      p.number(line, key, val, c.initial_depth);
    } else if (key == "initial_depth_raster") {
      c.initial_depth_raster = val;
    } else if (key == "initial_surface") {
      double eta;
      if (p.number(line, key, val, eta)) c.initial_surface = eta;
    } else if (key == "adapt_every") {
      p.integer(line, key, val, c.adapt_every);
    } else if (key == "grid_file") {
      c.grid_file = val;
    } else if (key == "output_dir") {
      c.output_dir = val;
    } else if (key == "threads") {
      p.integer(line, key, val, c.threads);
    } else {
      p.fail(line, "unknown key \"" + key + "\"");
    }
  }

  if (!saw_dem) p.errors.push_back(origin + ": missing required key dem_path");
  if (!saw_solver) p.errors.push_back(origin + ": missing required key solver");
  if (!saw_end_time) p.errors.push_back(origin + ": missing required key end_time");
  if (saw_end_time && c.end_time < 0.0)
    p.errors.push_back(origin + ": end_time must be >= 0");
  if (c.epsilon < 0.0) p.errors.push_back(origin + ": epsilon must be >= 0");
  const bool needs_level =
      solver_is_adaptive(c.solver) || c.grid_mode == GridMode::nonuniform || !c.grid_file.empty();
  if (saw_solver && needs_level && c.max_level < 0 && c.grid_file.empty())
    p.errors.push_back(origin + ": max_level is required for solver " +
                       std::string(solver_name(c.solver)) + " / nonuniform grids");
  if (c.max_level >= 0 && c.max_level > 24)
    p.errors.push_back(origin + ": max_level too large (max 24)");
  if (c.output_interval < 0.0) p.errors.push_back(origin + ": output_interval must be >= 0");
  if (c.manning < 0.0) p.errors.push_back(origin + ": manning must be >= 0");
  if (c.h_dry <= 0.0) p.errors.push_back(origin + ": h_dry must be > 0");
  if (c.adapt_every < 1) p.errors.push_back(origin + ": adapt_every must be >= 1");
  if (c.threads < 1) p.errors.push_back(origin + ": threads must be >= 1");
  if (solver_is_adaptive(c.solver) && c.grid_mode == GridMode::uniform)
    c.grid_mode = GridMode::nonuniform;

  if (!p.errors.empty()) {
    std::string msg = "configuration errors:";
    for (const auto& e : p.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  if (c.output_interval == 0.0) c.output_interval = c.end_time;
  if (c.gauge_interval == 0.0) c.gauge_interval = c.output_interval;
  return c;
}

ScenarioConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config_text(ss.str(), path);

  // File references are relative to the config file's directory.
  namespace fs = std::filesystem;
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
  };
  resolve(c.dem_path);
  resolve(c.manning_raster);
  resolve(c.initial_depth_raster);
  resolve(c.grid_file);
  for (InflowSpec& f : c.inflows) resolve(f.hydrograph_path);
  return c;
}

}  // namespace floodmra
