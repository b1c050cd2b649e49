#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trustq/simulator.hpp"

namespace trustq::io {

/// Six significant digits, '.' as decimal separator; NaN prints as "nan".
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one CSV document into rows, honouring quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

const std::vector<std::string>& summary_columns();
std::vector<std::string> summary_row(const MetricsReport& report);

void write_episodes(std::ostream& out, const MetricsReport& report);
void write_trust_timeseries(std::ostream& out, const MetricsReport& report);
void write_qtable(std::ostream& out, const MetricsReport& report);
void write_positions(std::ostream& out, const MetricsReport& report);
void write_summary(std::ostream& out, std::span<const MetricsReport* const> reports);

/// Writes episodes.csv, trust_timeseries.csv, qtable.csv, positions.csv and a
/// one-row summary.csv into `dir`, creating it if needed. I/O failures raise
/// std::system_error or std::filesystem::filesystem_error.
void write_run(const std::filesystem::path& dir, const MetricsReport& report);

std::string read_file(const std::filesystem::path& path);

}  // namespace trustq::io
