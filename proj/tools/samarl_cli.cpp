#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "samarl/harness/compare.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/harness/plot.hpp"
#include "samarl/harness/run_config.hpp"
#include "samarl/harness/runner.hpp"

using namespace samarl;
using namespace samarl::harness;
namespace fs = std::filesystem;

namespace {

struct RunFlags {
  std::string config_file;
  std::optional<std::string> scenario, algo, agents, episodes, seed, out, prey;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key = value file applied over the defaults");
    cmd->add_option("--scenario", scenario, "coop_nav or predator_prey");
    cmd->add_option("--algo", algo, "MADDPG, MATD3, SA_MADDPG, SA_MATD3, DSA_MADDPG or DSA_MATD3");
    cmd->add_option("--agents", agents, "total agent count");
    cmd->add_option("--episodes", episodes, "training episodes");
    cmd->add_option("--seed", seed, "global seed");
    cmd->add_option("--out", out, "run directory");
    cmd->add_option("--prey", prey, "scripted, learned, or a checkpoint directory");
    cmd->add_option("--set", sets, "extra key=value override, repeatable");
  }

  // Defaults, then the file, then command-line flags.
  ConfigEntries entries() const {
    ConfigEntries e;
    if (!config_file.empty()) e = read_config_file(config_file);
    auto put = [&](const char* key, const std::optional<std::string>& v) {
      if (v) e.emplace_back(key, *v);
    };
    put("scenario", scenario);
    put("algo", algo);
    put("agents", agents);
    put("episodes", episodes);
    put("seed", seed);
    put("out", out);
    put("prey", prey);
    for (const auto& s : sets) {
      const auto text = parse_config_text(s);
      e.insert(e.end(), text.begin(), text.end());
    }
    return e;
  }
};

void print_summary(const TrainSummary& s) {
  std::cout << "run " << s.dir.string() << ": " << s.episodes << " episodes, " << s.env_steps << " env steps, "
            << s.critic_updates << " critic updates, " << s.policy_updates << " policy updates, " << s.wall_s
            << " s\n";
  if (s.aborted) std::cout << "aborted: " << s.error << '\n';
}

int run_train(const RunFlags& flags) {
  const auto cfg = resolve_config(flags.entries());
  validate(cfg);
  const auto summary = train(cfg, &std::cerr);
  print_summary(summary);
  return summary.aborted ? 2 : 0;
}

int run_eval(const std::string& checkpoint, const std::optional<std::string>& prey, std::uint64_t episodes,
             std::uint64_t seed) {
  auto cfg = checkpoint_config(checkpoint);
  if (prey) cfg.prey = *prey;
  const auto stats = evaluate_checkpoint(cfg, checkpoint, episodes, seed);
  for (std::size_t t = 0; t < stats.mean.size(); ++t) {
    std::cout << "type" << t << " mean " << format_double(stats.mean[t]) << " std " << format_double(stats.std[t])
              << " over " << stats.episodes << " episodes\n";
  }
  return 0;
}

// One forked process per learning rate; each child trains into <out>/lr_<value>.
std::vector<fs::path> run_sweep(const RunFlags& flags, const std::vector<double>& lrs) {
  const auto base = resolve_config(flags.entries());
  std::vector<fs::path> dirs;
  std::vector<pid_t> children;
  for (double lr : lrs) {
    auto cfg = base;
    cfg.train.actor_lr = lr;
    cfg.train.critic_lr = lr;
    cfg.out = base.out / ("lr_" + format_double(lr));
    validate(cfg);
    dirs.push_back(cfg.out);
    std::cout.flush();
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      int code = 1;
      try {
        code = train(cfg, nullptr).aborted ? 2 : 0;
      } catch (const std::exception& e) {
        std::cerr << "run " << cfg.out.string() << ": " << e.what() << '\n';
      }
      std::_Exit(code);
    }
    children.push_back(pid);
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    int status = 0;
    waitpid(children[i], &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) == 1) {
      throw std::runtime_error("training run " + dirs[i].string() + " failed");
    }
  }
  return dirs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent actor-critic experiments on particle scenarios"};
  app.require_subcommand(1);

  RunFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "train one run and write its metrics and checkpoints");
  train_flags.attach(train_cmd);

  std::string checkpoint;
  std::optional<std::string> eval_prey;
  std::uint64_t eval_episodes = 100;
  std::uint64_t eval_seed = 1;
  auto* eval_cmd = app.add_subcommand("eval", "noise-free evaluation of a checkpoint");
  eval_cmd->add_option("checkpoint", checkpoint, "checkpoint directory")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");
  eval_cmd->add_option("--prey", eval_prey, "override the prey policy source");

  std::vector<std::string> csvs;
  std::string plot_out = "curves.svg";
  PlotOptions plot_opt;
  std::optional<std::size_t> normalize_to;
  auto* plot_cmd = app.add_subcommand("plot", "SVG learning curves against episode and wall time");
  plot_cmd->add_option("csv", csvs, "metrics.csv files or run directories")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path");
  plot_cmd->add_option("--window", plot_opt.window, "smoothing window");
  plot_cmd->add_option("--type", plot_opt.type, "agent type column (0 or 1)");
  plot_cmd->add_option("--normalize-to", normalize_to, "index of the run whose final reward maps to 100");

  std::vector<std::string> run_dirs;
  std::vector<double> sweep_lrs;
  RunFlags sweep_flags;
  auto* compare_cmd = app.add_subcommand("compare", "rank runs by final smoothed reward");
  compare_cmd->add_option("runs", run_dirs, "run directories");
  compare_cmd->add_option("--lr", sweep_lrs, "train one run per learning rate first, in parallel processes");
  sweep_flags.attach(compare_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train_flags);
    if (*eval_cmd) return run_eval(checkpoint, eval_prey, eval_episodes, eval_seed);
    if (*plot_cmd) {
      std::vector<fs::path> paths;
      for (const auto& c : csvs) paths.push_back(fs::is_directory(c) ? fs::path(c) / "metrics.csv" : fs::path(c));
      plot_opt.normalize_to = normalize_to;
      emit_plot(paths, plot_opt, plot_out);
      std::cout << "wrote " << plot_out << '\n';
      return 0;
    }
    if (*compare_cmd) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      if (!sweep_lrs.empty()) {
        const auto swept = run_sweep(sweep_flags, sweep_lrs);
        dirs.insert(dirs.end(), swept.begin(), swept.end());
      }
      if (dirs.empty()) throw RunConfigError("compare needs run directories or --lr values");
      std::cout << format_table(compare_runs(dirs));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
