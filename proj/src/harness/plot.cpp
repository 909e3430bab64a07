#include "samarl/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "samarl/harness/metrics.hpp"

namespace samarl::harness {

namespace {

constexpr double kPanelWidth = 520.0;
constexpr double kPanelHeight = 340.0;
constexpr double kMargin = 60.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::size_t> strided(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  const std::size_t stride = max_points == 0 || n <= max_points ? 1 : (n + max_points - 1) / max_points;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

void panel(std::ostringstream& os, const std::vector<Curve>& curves, bool wall, double x0, const char* title,
           const PlotOptions& opt) {
  Range xr, yr;
  for (const auto& c : curves) {
    for (double v : wall ? c.wall_s : c.episode) xr.add(v);
    for (double v : c.reward) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double sx = kPanelWidth / (xr.hi - xr.lo);
  const double sy = kPanelHeight / (yr.hi - yr.lo);
  const double ox = x0 + kMargin, oy = kMargin;
  os << "<g class=\"panel\" data-x=\"" << (wall ? "wall_s" : "episode") << "\">\n";
  os << "<text x=\"" << ox + kPanelWidth / 2 << "\" y=\"" << oy - 20 << "\" text-anchor=\"middle\">" << title
     << "</text>\n";
  os << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << kPanelWidth << "\" height=\"" << kPanelHeight
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << ox << "\" y=\"" << oy + kPanelHeight + 18 << "\">" << format_double(xr.lo) << "</text>\n";
  os << "<text x=\"" << ox + kPanelWidth << "\" y=\"" << oy + kPanelHeight + 18 << "\" text-anchor=\"end\">"
     << format_double(xr.hi) << "</text>\n";
  os << "<text x=\"" << ox - 6 << "\" y=\"" << oy + kPanelHeight << "\" text-anchor=\"end\">" << format_double(yr.lo)
     << "</text>\n";
  os << "<text x=\"" << ox - 6 << "\" y=\"" << oy + 10 << "\" text-anchor=\"end\">" << format_double(yr.hi)
     << "</text>\n";
  // Data-space transform: screen = (x - xlo) * sx + ox, (yhi - y) * sy + oy.
  os << "<g transform=\"matrix(" << format_double(sx) << " 0 0 " << format_double(-sy) << ' '
     << format_double(ox - xr.lo * sx) << ' ' << format_double(oy + yr.hi * sy) << ")\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const auto& xs = wall ? c.wall_s : c.episode;
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[k % std::size(kPalette)]
       << "\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" data-label=\"" << escape(c.label)
       << "\" points=\"";
    bool first = true;
    for (auto i : strided(std::min(xs.size(), c.reward.size()), opt.max_points)) {
      if (!std::isfinite(c.reward[i])) continue;
      if (!first) os << ' ';
      os << format_double(xs[i]) << ',' << format_double(c.reward[i]);
      first = false;
    }
    os << "\"/>\n";
  }
  os << "</g>\n</g>\n";
}

}  // namespace

Curve load_curve(const std::filesystem::path& csv, const PlotOptions& opt, std::string label) {
  const auto records = read_metrics(csv);
  Curve c;
  if (label.empty()) label = csv.has_parent_path() ? csv.parent_path().filename().string() : csv.stem().string();
  c.label = std::move(label);
  std::vector<double> raw;
  for (const auto& r : records) {
    const auto& v = opt.type == 0 ? r.reward_type0 : r.reward_type1;
    if (!v) continue;
    c.episode.push_back(static_cast<double>(r.episode));
    c.wall_s.push_back(r.wall_s);
    raw.push_back(*v);
  }
  c.reward = rolling_mean(raw, opt.window);
  return c;
}

std::string render_svg(const std::vector<Curve>& input, const PlotOptions& opt) {
  auto curves = input;
  if (opt.normalize_to && *opt.normalize_to < curves.size() && !curves[*opt.normalize_to].reward.empty()) {
    const double base = std::abs(curves[*opt.normalize_to].reward.back());
    if (base > 0.0)
      for (auto& c : curves)
        for (auto& v : c.reward) v = v * 100.0 / base;
  }
  const double width = 2 * (kPanelWidth + 2 * kMargin);
  const double height = kPanelHeight + 2 * kMargin + 20.0 * static_cast<double>(curves.size());
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string y_label = "smoothed reward (window " + std::to_string(opt.window) + ")";
  panel(os, curves, false, 0.0, (y_label + " vs episode").c_str(), opt);
  panel(os, curves, true, kPanelWidth + 2 * kMargin, (y_label + " vs wall time [s]").c_str(), opt);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const double y = kPanelHeight + 2 * kMargin + 20.0 * static_cast<double>(k);
    os << "<rect x=\"" << kMargin << "\" y=\"" << y - 9 << "\" width=\"14\" height=\"4\" fill=\""
       << kPalette[k % std::size(kPalette)] << "\"/>\n";
    os << "<text x=\"" << kMargin + 20 << "\" y=\"" << y << "\">" << escape(curves[k].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const std::vector<std::filesystem::path>& csvs, const PlotOptions& opt,
               const std::filesystem::path& out) {
  if (csvs.empty()) throw MetricsError("plot needs at least one metrics file");
  std::vector<Curve> curves;
  for (const auto& p : csvs) curves.push_back(load_curve(p, opt));
  std::ofstream file(out);
  if (!file) throw MetricsError("cannot open " + out.string() + " for writing");
  file << render_svg(curves, opt);
  if (!file) throw MetricsError("write to " + out.string() + " failed");
}

}  // namespace samarl::harness
