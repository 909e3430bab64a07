#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace samarl::harness {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One row per finished episode. Empty optionals are written as empty fields.
struct MetricsRecord {
  std::uint64_t episode = 0;
  std::uint64_t env_steps = 0;
  double wall_s = 0.0;
  std::optional<double> reward_type0;
  std::optional<double> reward_type1;
  std::optional<double> smoothed_type0;
  std::optional<double> smoothed_type1;
  std::optional<double> critic_loss;
  /// One entry per updated actor, ';'-separated in the file; empty when no policy step ran.
  std::vector<double> actor_grad_norm;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Column order of the metrics file.
inline constexpr const char* kMetricsHeader =
    "episode,env_steps,wall_s,reward_type0,reward_type1,smoothed_type0,smoothed_type1,critic_loss,actor_grad_norm";

/// Shortest text that parses back to the same double.
std::string format_double(double v);

std::string format_record(const MetricsRecord& r);
/// Throws MetricsError naming the row on malformed input.
MetricsRecord parse_record(const std::string& line, std::size_t row);

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

/// Appends rows to a metrics file, flushing every `flush_every` rows.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, std::uint64_t flush_every);
  void append(const MetricsRecord& r);
  void flush();
  std::uint64_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::uint64_t flush_every_;
  std::uint64_t rows_ = 0;
};

/// Mean of the most recent `window` values (fewer at the start).
class RollingMean {
 public:
  explicit RollingMean(std::size_t window);
  double push(double v);
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<double> values_;
  double sum_ = 0.0;
  std::uint64_t pushes_ = 0;
};

/// Rolling mean of every prefix, as RollingMean would produce it.
std::vector<double> rolling_mean(const std::vector<double>& values, std::size_t window);

}  // namespace samarl::harness
