#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "CLI11.hpp"
#include "trustq/report_io.hpp"

namespace trustq::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError("seeds", 0, "'" + std::string(text) + "' is not a non-negative integer");
  }
  return value;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::system_error(std::make_error_code(std::errc::io_error),
                            "cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out.flush()) {
    throw std::system_error(std::make_error_code(std::errc::io_error),
                            "write failed for '" + path.string() + "'");
  }
}

// Runs one scenario per seed on up to `parallelism` threads. Results keep seed order.
std::vector<MetricsReport> run_seeds(const ScenarioConfig& base,
                                     const std::vector<std::uint64_t>& seeds,
                                     unsigned parallelism) {
  std::vector<MetricsReport> reports(seeds.size());
  std::vector<std::exception_ptr> failures(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        ScenarioConfig cfg = base;
        cfg.seed = seeds[i];
        reports[i] = run_scenario(cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(seeds.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return reports;
}

std::optional<double> numeric(const std::string& cell) {
  if (cell == "none" || cell == "nan" || cell.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& text, std::uint64_t first_seed) {
  std::vector<std::uint64_t> seeds;
  if (text.find(',') == std::string::npos) {
    const std::uint64_t count = parse_u64(trim(text));
    if (count == 0) throw ConfigError("seeds", 0, "at least one seed is required");
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first_seed + i);
    return seeds;
  }
  std::set<std::uint64_t> seen;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const std::uint64_t s = parse_u64(trim(item));
    if (!seen.insert(s).second) {
      throw ConfigError("seeds", 0, "seed " + std::to_string(s) + " is listed twice");
    }
    seeds.push_back(s);
  }
  return seeds;
}

MetricSummary summarise_metric(const std::string& metric, std::span<const double> samples) {
  MetricSummary s;
  s.metric = metric;
  double sum = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++s.n;
  }
  if (s.n == 0) {
    s.mean = std::nan("");
    s.ci90_half_width = std::nan("");
    return s;
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) {
    s.ci90_half_width = std::nan("");
    return s;
  }
  double ss = 0.0;
  for (double v : samples) {
    if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  const boost::math::students_t dist(static_cast<double>(s.n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.05));
  s.ci90_half_width = t * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

std::vector<MetricSummary> aggregate(std::span<const MetricsReport> reports) {
  const auto& columns = io::summary_columns();
  std::map<std::string, std::vector<double>> samples;
  for (const auto& r : reports) {
    const auto row = io::summary_row(r);
    for (std::size_t c = 1; c < columns.size(); ++c) {
      if (const auto v = numeric(row[c])) samples[columns[c]].push_back(*v);
    }
  }
  std::vector<MetricSummary> out;
  for (std::size_t c = 1; c < columns.size(); ++c) {
    out.push_back(summarise_metric(columns[c], samples[columns[c]]));
  }
  return out;
}

void write_aggregate(std::ostream& out, std::span<const MetricSummary> rows) {
  io::write_csv_row(out, {"metric", "mean", "ci90_half_width", "ci90_low", "ci90_high", "n"});
  for (const auto& r : rows) {
    io::write_csv_row(out, {r.metric, io::format_number(r.mean),
                            io::format_number(r.ci90_half_width),
                            io::format_number(r.mean - r.ci90_half_width),
                            io::format_number(r.mean + r.ci90_half_width), std::to_string(r.n)});
  }
}

std::vector<MetricSummary> read_aggregate(const fs::path& path) {
  const auto rows = io::parse_csv(io::read_file(path));
  if (rows.empty() || rows.front().size() < 2 || rows.front()[0] != "metric") {
    throw std::system_error(std::make_error_code(std::errc::invalid_argument),
                            "'" + path.string() + "' is not an aggregate table");
  }
  std::vector<MetricSummary> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() < 6) continue;
    MetricSummary s;
    s.metric = row[0];
    s.mean = numeric(row[1]).value_or(std::nan(""));
    s.ci90_half_width = numeric(row[2]).value_or(std::nan(""));
    s.n = static_cast<std::size_t>(numeric(row[5]).value_or(0.0));
    out.push_back(s);
  }
  return out;
}

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    ScenarioConfig cfg = load_scenario(manifest.config_path);
    if (manifest.snapshot_every) cfg.snapshot_every = *manifest.snapshot_every;
    cfg.validate();
    if (manifest.seeds.empty()) throw ConfigError("seeds", 0, "at least one seed is required");

    const auto reports = run_seeds(cfg, manifest.seeds, std::max(1u, manifest.parallelism));

    fs::create_directories(manifest.output_dir);
    for (const auto& r : reports) {
      io::write_run(manifest.output_dir / ("seed-" + std::to_string(r.seed)), r);
    }
    const auto agg = aggregate(reports);
    std::ostringstream table;
    write_aggregate(table, agg);
    write_text(manifest.output_dir / "aggregate.csv", table.str());

    out << "config " << manifest.config_path.string() << ", " << reports.size() << " seed(s) -> "
        << manifest.output_dir.string() << "\n";
    for (const auto& r : reports) {
      out << "  seed " << r.seed << ": received " << r.packets_received << ", dropped "
          << r.packets_dropped << ", mean hops " << io::format_number(r.mean_hops)
          << ", converged "
          << (r.convergence_episode ? std::to_string(*r.convergence_episode) : "never") << "\n";
      for (const auto& w : r.warnings) out << "    warning: " << w << "\n";
    }
    out << "aggregate (mean +- 90% CI):\n";
    for (const auto& m : agg) {
      out << "  " << std::left << std::setw(32) << m.metric << io::format_number(m.mean)
          << " +- " << io::format_number(m.ci90_half_width) << " (n=" << m.n << ")\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TopologyError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::system_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_compare(const fs::path& run_a, const fs::path& run_b, const std::string& metric,
                const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  std::vector<MetricSummary> a;
  std::vector<MetricSummary> b;
  try {
    a = read_aggregate(run_a / "aggregate.csv");
    b = read_aggregate(run_b / "aggregate.csv");
  } catch (const std::system_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  auto find = [&](const std::vector<MetricSummary>& rows) -> const MetricSummary* {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const MetricSummary& m) { return m.metric == metric; });
    return it == rows.end() ? nullptr : &*it;
  };
  const MetricSummary* ma = find(a);
  const MetricSummary* mb = find(b);
  if (ma == nullptr || mb == nullptr) {
    err << "metric error: '" << metric << "' is not in "
        << (ma == nullptr ? run_a : run_b).string() << "/aggregate.csv\n";
    return kExitConfig;
  }
  const double ratio = mb->mean / ma->mean;
  const double change = 100.0 * (mb->mean - ma->mean) / ma->mean;

  out << metric << "\n"
      << "  a: " << io::format_number(ma->mean) << " (" << run_a.string() << ")\n"
      << "  b: " << io::format_number(mb->mean) << " (" << run_b.string() << ")\n"
      << "  ratio b/a: " << io::format_number(ratio) << "\n"
      << "  change: " << io::format_number(change) << "%\n";

  try {
    std::ostringstream csv;
    io::write_csv_row(csv, {"metric", "mean_a", "mean_b", "ratio", "pct_change"});
    io::write_csv_row(csv, {metric, io::format_number(ma->mean), io::format_number(mb->mean),
                            io::format_number(ratio), io::format_number(change)});
    if (!out_dir.empty()) fs::create_directories(out_dir);
    write_text(out_dir / "compare.csv", csv.str());
  } catch (const std::system_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_validate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_scenario(config_path);
    cfg.validate();
    // Layout constraints only surface when a topology is drawn.
    RngStreams rngs(cfg.seed);
    const NetworkState state = build_topology(cfg, rngs.topology);
    std::size_t attackers = 0;
    for (const auto& p : state.profiles) attackers += p.has_value();
    out << config_path.string() << ": ok (" << cfg.n_nodes << " nodes, " << attackers
        << " attacker(s), " << cfg.episodes << " episodes, source " << state.source
        << ", destination " << state.destination << " for seed " << cfg.seed << ")\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TopologyError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::system_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust-gated Q-routing simulator for vehicular ad-hoc networks", "trustq"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::string seeds_text;
  unsigned parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t snapshot_every = 0;

  auto* run = app.add_subcommand("run", "Run a scenario over one or more seeds");
  run->add_option("--config", config, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (one seed-<s>/ per seed)")->required();
  run->add_option("--seeds", seeds_text,
                  "Seed count starting at the config seed, or a comma-separated list")
      ->default_val("1");
  run->add_option("--parallelism", parallelism, "Concurrent runs")
      ->check(CLI::PositiveNumber);
  auto* snap = run->add_option("--snapshot-every", snapshot_every,
                               "Snapshot trust, Q and positions every N episodes (0 = off)");

  std::string run_a;
  std::string run_b;
  std::string metric;
  std::string compare_out = ".";
  auto* compare = app.add_subcommand("compare", "Compare one metric between two run directories");
  compare->add_option("run_a", run_a, "Baseline run directory")->required();
  compare->add_option("run_b", run_b, "Candidate run directory")->required();
  compare->add_option("--metric", metric, "Metric name from aggregate.csv")->required();
  compare->add_option("--out", compare_out, "Directory for compare.csv")
      ->default_val(".");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a scenario file and its layout");
  validate->add_option("--config", validate_config, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    // Subcommand help requests surface as ParseError subclasses handled above.
    return kExitConfig;
  }

  if (run->parsed()) {
    RunManifest m;
    m.config_path = config;
    m.output_dir = out_dir;
    m.parallelism = parallelism;
    if (snap->count() > 0) m.snapshot_every = snapshot_every;
    try {
      const ScenarioConfig cfg = load_scenario(m.config_path);
      m.seeds = parse_seeds(seeds_text, cfg.seed);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::system_error& e) {
      err << "i/o error: " << e.what() << "\n";
      return kExitIo;
    }
    return cmd_run(m, out, err);
  }
  if (compare->parsed()) return cmd_compare(run_a, run_b, metric, compare_out, out, err);
  return cmd_validate(validate_config, out, err);
}

}  // namespace trustq::cli
