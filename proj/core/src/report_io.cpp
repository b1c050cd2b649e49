#include "trustq/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

namespace trustq::io {

namespace {

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(std::make_error_code(std::errc::io_error),
                            "cannot open '" + path.string() + "' for writing");
  }
  body(out);
  out.flush();
  if (!out) {
    throw std::system_error(std::make_error_code(std::errc::io_error),
                            "failed writing '" + path.string() + "'");
  }
}

std::string u(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> columns{
      "seed",      "packets_received", "packets_dropped", "convergence_episode",
      "mean_hops", "attacker_intermediate_count", "normal_mean_intermediate_count",
      "wall_time_s"};
  return columns;
}

std::vector<std::string> summary_row(const MetricsReport& r) {
  return {u(r.seed),
          u(r.packets_received),
          u(r.packets_dropped),
          r.convergence_episode ? u(*r.convergence_episode) : "none",
          format_number(r.mean_hops),
          format_number(r.attacker_intermediate_count),
          format_number(r.normal_mean_intermediate_count),
          format_number(r.wall_time_s)};
}

void write_episodes(std::ostream& out, const MetricsReport& report) {
  write_csv_row(out, {"episode", "delivered", "hops", "reward_sum", "drop_cause", "path"});
  for (const auto& e : report.episodes) {
    std::string path;
    for (std::size_t i = 0; i < e.path.size(); ++i) {
      if (i > 0) path += ' ';
      path += std::to_string(e.path[i]);
    }
    write_csv_row(out, {u(e.episode), e.delivered ? "true" : "false", u(e.hops),
                        format_number(e.reward_sum), std::string(to_string(e.drop_cause)), path});
  }
}

void write_trust_timeseries(std::ostream& out, const MetricsReport& report) {
  write_csv_row(out, {"tick", "owner", "subject", "direct", "indirect", "confidence", "total"});
  for (const auto& r : report.trust_snapshots) {
    write_csv_row(out, {u(r.tick), u(r.owner), u(r.subject), format_number(r.direct),
                        format_number(r.indirect), format_number(r.confidence),
                        format_number(r.total)});
  }
}

void write_qtable(std::ostream& out, const MetricsReport& report) {
  write_csv_row(out, {"tick", "owner", "destination", "neighbour", "q"});
  for (const auto& r : report.q_snapshots) {
    write_csv_row(out,
                  {u(r.tick), u(r.owner), u(r.destination), u(r.neighbour), format_number(r.q)});
  }
}

void write_positions(std::ostream& out, const MetricsReport& report) {
  write_csv_row(out, {"tick", "node", "x", "y", "speed", "heading"});
  for (const auto& r : report.position_snapshots) {
    write_csv_row(out, {u(r.tick), u(r.node), format_number(r.x), format_number(r.y),
                        format_number(r.speed), std::to_string(r.heading)});
  }
}

void write_summary(std::ostream& out, std::span<const MetricsReport* const> reports) {
  write_csv_row(out, summary_columns());
  for (const auto* r : reports) write_csv_row(out, summary_row(*r));
}

void write_run(const std::filesystem::path& dir, const MetricsReport& report) {
  std::filesystem::create_directories(dir);
  write_file(dir / "episodes.csv", [&](std::ostream& o) { write_episodes(o, report); });
  write_file(dir / "trust_timeseries.csv",
             [&](std::ostream& o) { write_trust_timeseries(o, report); });
  write_file(dir / "qtable.csv", [&](std::ostream& o) { write_qtable(o, report); });
  write_file(dir / "positions.csv", [&](std::ostream& o) { write_positions(o, report); });
  const MetricsReport* one[] = {&report};
  write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary(o, one); });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace trustq::io
