#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "samarl/harness/run_config.hpp"

namespace samarl::harness {

/// One run directory reduced to its final smoothed reward and wall time.
struct RunSummary {
  std::filesystem::path dir;
  RunConfig config;
  std::uint64_t episodes = 0;
  double final_smoothed = 0.0;  // last smoothed_type0 value
  double wall_s = 0.0;          // wall time of the last row
};

RunSummary summarize_run(const std::filesystem::path& dir);

/// Summaries ranked by final smoothed reward, best first. Throws
/// RunConfigError when the runs do not share a scenario and agent count.
std::vector<RunSummary> compare_runs(const std::vector<std::filesystem::path>& dirs);

/// Fixed-width text table, one row per run in the given order.
std::string format_table(const std::vector<RunSummary>& runs);

}  // namespace samarl::harness
