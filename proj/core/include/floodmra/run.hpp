#pragma once

#include <string>

#include "floodmra/config.hpp"
#include "floodmra/sim_common.hpp"

namespace floodmra {

struct RunResult {
  RunStats stats;
  std::string output_dir;
  int outputs_written = 0;
};

// Full batch run: builds the solver named by the config, advances it to
// end_time, and writes depth/discharge rasters, gauge CSVs, run statistics
// and (for adaptive solvers) the element-count series into cfg.output_dir.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace floodmra
