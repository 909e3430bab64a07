#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace samarl::harness {

/// One run's learning curve: smoothed reward against episode and wall time.
struct Curve {
  std::string label;
  std::vector<double> episode;
  std::vector<double> wall_s;
  std::vector<double> reward;  // already smoothed
};

struct PlotOptions {
  std::size_t window = 1000;
  /// Reward column: 0 for the first agent type, 1 for the second.
  std::size_t type = 0;
  /// When set, rewards are rescaled so that this curve's final value maps to +-100.
  std::optional<std::size_t> normalize_to;
  /// At most this many points per polyline; longer curves are strided.
  std::size_t max_points = 4000;
};

/// Reads a metrics CSV and smooths the chosen reward column.
Curve load_curve(const std::filesystem::path& csv, const PlotOptions& opt, std::string label = {});

/// Self-contained SVG with two panels (reward vs episode, reward vs wall time)
/// and one polyline per curve in each. Polyline points are in data units.
std::string render_svg(const std::vector<Curve>& curves, const PlotOptions& opt);

/// Loads every CSV, renders, and writes the SVG to `out`.
void emit_plot(const std::vector<std::filesystem::path>& csvs, const PlotOptions& opt,
               const std::filesystem::path& out);

}  // namespace samarl::harness
