#include "samarl/harness/metrics.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

namespace samarl::harness {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, std::size_t row, const char* column) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw MetricsError("metrics row " + std::to_string(row) + ", column " + column + ": cannot parse '" + text + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& text, std::size_t row, const char* column) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != end) {
    throw MetricsError("metrics row " + std::to_string(row) + ", column " + column + ": cannot parse '" + text + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& text, std::size_t row, const char* column) {
  if (text.empty()) return std::nullopt;
  return parse_double(text, row, column);
}

void put_optional(std::ostringstream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_double(*v);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_record(const MetricsRecord& r) {
  std::ostringstream os;
  os << r.episode << ',' << r.env_steps << ',' << format_double(r.wall_s);
  put_optional(os, r.reward_type0);
  put_optional(os, r.reward_type1);
  put_optional(os, r.smoothed_type0);
  put_optional(os, r.smoothed_type1);
  put_optional(os, r.critic_loss);
  os << ',';
  for (std::size_t i = 0; i < r.actor_grad_norm.size(); ++i) {
    if (i) os << ';';
    os << format_double(r.actor_grad_norm[i]);
  }
  return os.str();
}

MetricsRecord parse_record(const std::string& line, std::size_t row) {
  const auto f = split(line, ',');
  if (f.size() != 9) {
    throw MetricsError("metrics row " + std::to_string(row) + ": expected 9 fields, found " +
                       std::to_string(f.size()));
  }
  MetricsRecord r;
  r.episode = parse_count(f[0], row, "episode");
  r.env_steps = parse_count(f[1], row, "env_steps");
  r.wall_s = parse_double(f[2], row, "wall_s");
  r.reward_type0 = parse_optional(f[3], row, "reward_type0");
  r.reward_type1 = parse_optional(f[4], row, "reward_type1");
  r.smoothed_type0 = parse_optional(f[5], row, "smoothed_type0");
  r.smoothed_type1 = parse_optional(f[6], row, "smoothed_type1");
  r.critic_loss = parse_optional(f[7], row, "critic_loss");
  if (!f[8].empty()) {
    for (const auto& part : split(f[8], ';')) r.actor_grad_norm.push_back(parse_double(part, row, "actor_grad_norm"));
  }
  return r;
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw MetricsError("cannot open " + path.string() + " for writing");
  out << kMetricsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  out.flush();
  if (!out) throw MetricsError("write to " + path.string() + " failed");
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MetricsError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw MetricsError(path.string() + ": missing header row");
  if (line != kMetricsHeader) throw MetricsError(path.string() + ": unexpected header '" + line + "'");
  std::vector<MetricsRecord> out;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line, row));
    } catch (const MetricsError& e) {
      throw MetricsError(path.string() + ": " + e.what());
    }
  }
  return out;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, std::uint64_t flush_every)
    : out_(path), path_(path), flush_every_(flush_every == 0 ? 1 : flush_every) {
  if (!out_) throw MetricsError("cannot open " + path.string() + " for writing");
  out_ << kMetricsHeader << '\n';
  out_.flush();
}

void MetricsWriter::append(const MetricsRecord& r) {
  out_ << format_record(r) << '\n';
  if (++rows_ % flush_every_ == 0) flush();
}

void MetricsWriter::flush() {
  out_.flush();
  if (!out_) throw MetricsError("write to " + path_.string() + " failed");
}

RollingMean::RollingMean(std::size_t window) : window_(window == 0 ? 1 : window) {}

double RollingMean::push(double v) {
  values_.push_back(v);
  sum_ += v;
  if (values_.size() > window_) {
    sum_ -= values_.front();
    values_.pop_front();
  }
  // Re-sum periodically so subtraction error cannot accumulate.
  if (++pushes_ % window_ == 0) sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
  return sum_ / static_cast<double>(values_.size());
}

std::vector<double> rolling_mean(const std::vector<double>& values, std::size_t window) {
  RollingMean m(window);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(m.push(v));
  return out;
}

}  // namespace samarl::harness
