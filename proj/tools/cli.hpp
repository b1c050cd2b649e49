#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trustq/simulator.hpp"

namespace trustq::cli {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

struct RunManifest {
  std::filesystem::path config_path;
  std::filesystem::path output_dir;
  std::vector<std::uint64_t> seeds;
  unsigned parallelism = 1;
  std::optional<std::uint64_t> snapshot_every;
};

/// A bare integer is a count of consecutive seeds starting at `first_seed`;
/// anything with a comma is an explicit list. Duplicates are rejected.
std::vector<std::uint64_t> parse_seeds(const std::string& text, std::uint64_t first_seed);

struct MetricSummary {
  std::string metric;
  double mean = 0.0;
  double ci90_half_width = 0.0;  // NaN with fewer than two samples
  std::size_t n = 0;
};

/// Two-sided 90% Student-t interval over the finite samples.
MetricSummary summarise_metric(const std::string& metric, std::span<const double> samples);

/// One summary per numeric summary.csv column, skipping runs where the value is absent.
std::vector<MetricSummary> aggregate(std::span<const MetricsReport> reports);

void write_aggregate(std::ostream& out, std::span<const MetricSummary> rows);

/// Reads aggregate.csv back into metric -> mean.
std::vector<MetricSummary> read_aggregate(const std::filesystem::path& path);

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                const std::string& metric, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Never throws.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trustq::cli
