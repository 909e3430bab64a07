#include "samarl/harness/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "samarl/harness/metrics.hpp"

namespace samarl::harness {

RunSummary summarize_run(const std::filesystem::path& dir) {
  RunSummary s;
  s.dir = dir;
  s.config = resolve_config(read_config_file(dir / "config.txt"));
  const auto rows = read_metrics(dir / "metrics.csv");
  if (rows.empty()) throw MetricsError((dir / "metrics.csv").string() + ": no metrics rows");
  const auto& last = rows.back();
  if (!last.smoothed_type0) throw MetricsError((dir / "metrics.csv").string() + ": last row has no smoothed reward");
  s.episodes = last.episode + 1;
  s.final_smoothed = *last.smoothed_type0;
  s.wall_s = last.wall_s;
  return s;
}

std::vector<RunSummary> compare_runs(const std::vector<std::filesystem::path>& dirs) {
  std::vector<RunSummary> runs;
  for (const auto& d : dirs) runs.push_back(summarize_run(d));
  for (const auto& r : runs) {
    const auto& a = runs.front().config;
    if (r.config.scenario != a.scenario || r.config.agents != a.agents) {
      throw RunConfigError("cannot compare " + r.dir.string() + " (" + std::string(env::scenario_name(r.config.scenario)) +
                           ", " + std::to_string(r.config.agents) + " agents) with " + runs.front().dir.string() +
                           " (" + std::string(env::scenario_name(a.scenario)) + ", " + std::to_string(a.agents) +
                           " agents)");
    }
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const RunSummary& x, const RunSummary& y) { return x.final_smoothed > y.final_smoothed; });
  return runs;
}

std::string format_table(const std::vector<RunSummary>& runs) {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-4s %-12s %-10s %-10s %-10s %10s %16s %12s  %s\n", "rank", "algo", "actor_lr",
                "critic_lr", "seed", "episodes", "smoothed_reward", "wall_s", "run");
  os << line;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    std::snprintf(line, sizeof line, "%-4zu %-12s %-10s %-10s %-10llu %10llu %16.3f %12.1f  %s\n", i + 1,
                  std::string(algo::algo_name(r.config.algo)).c_str(), format_double(r.config.train.actor_lr).c_str(),
                  format_double(r.config.train.critic_lr).c_str(), static_cast<unsigned long long>(r.config.seed),
                  static_cast<unsigned long long>(r.episodes), r.final_smoothed, r.wall_s, r.dir.string().c_str());
    os << line;
  }
  return os.str();
}

}  // namespace samarl::harness
