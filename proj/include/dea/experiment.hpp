#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dea/island_model.hpp"
#include "dea/stats.hpp"
#include "dea/tsplib.hpp"

namespace dea {

/// Bad configuration file or value. `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A migration mode with its gate parameters (unused for classic).
struct ModeSpec {
  MigrationMode mode = MigrationMode::Classic;
  double alpha = 0.0;
  double beta = 0.0;

  std::string name() const;  ///< "classic" or "gated"
  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

/// Parameters of a full experiment grid. Defaults are the published
/// settings; `intervals` has no default and must be given.
struct ExperimentConfig {
  std::string instance_path;
  std::vector<MigrationMode> modes{MigrationMode::Classic, MigrationMode::Gated};
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> betas{0.5, 1.0, 2.0};
  std::vector<std::int64_t> intervals;
  std::size_t repetitions = 30;
  std::size_t islands = 16;
  std::size_t subpop = 100;
  std::size_t migration_size = 1;
  std::int64_t rounds = 2000;
  EaParams ea{};
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  std::optional<Length> optimum;
  DiversityMeasure measure = DiversityMeasure::BestBased;
  unsigned workers = 1;

  /// Throws ConfigError on values that cannot describe a valid experiment.
  void validate() const;

  /// Classic first, then every (alpha, beta) pair for gated.
  std::vector<ModeSpec> mode_specs() const;

  RunSettings run_settings(const ModeSpec& mode, std::int64_t interval, std::uint64_t seed) const;
};

/// Flat `key = value` text; `#` starts a comment; list values are comma separated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Seed of one run, a pure function of its coordinates in the grid.
std::uint64_t run_seed(std::uint64_t master, const ModeSpec& mode, std::int64_t interval, std::size_t run_index);

struct RawRow {
  std::string instance;
  ModeSpec mode;
  std::int64_t interval = 0;
  std::size_t run_index = 0;
  Length best_length = 0;

  friend bool operator==(const RawRow&, const RawRow&) = default;
};

/// One (mode, interval) cell of the result tables.
struct CellReport {
  std::string instance;
  ModeSpec mode;
  std::int64_t interval = 0;
  std::vector<double> lengths;  ///< indexed by run
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<Length> optimum;
  std::optional<double> difficulty;
  /// Gated cells only: Welch test against classic at the same interval.
  std::optional<stats::TTestResult> versus_classic;
};

/// Groups raw rows into cells (first-appearance order), computes summary
/// statistics and pairs every gated cell with the classic cell of its interval.
std::vector<CellReport> aggregate(std::span<const RawRow> rows, std::optional<Length> optimum);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Executes every (mode, interval, repetition) run of the grid and aggregates.
std::vector<CellReport> run_experiment(const ExperimentConfig& cfg, const TspInstance& inst,
                                       const ProgressFn& progress = {});

std::vector<RawRow> raw_rows(std::span<const CellReport> reports);

void write_raw_csv(std::ostream& out, std::span<const CellReport> reports);
void write_aggregate_csv(std::ostream& out, std::span<const CellReport> reports);
void write_markdown(std::ostream& out, std::span<const CellReport> reports);

std::vector<RawRow> read_raw_csv(std::istream& in);

/// One parsed line of the aggregate CSV.
struct AggregateRow {
  std::string instance;
  ModeSpec mode;
  std::int64_t interval = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<Length> optimum;
  std::optional<double> difficulty;
  std::optional<double> t_stat;
  std::optional<double> p_value;
  std::optional<bool> significant;
};

std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

enum class ReportFormat { Csv, Markdown };

/// Writes raw.csv and aggregate.csv (Csv) and report.md (Markdown) into
/// `out_dir`, creating it if needed. Returns the paths written.
std::vector<std::string> emit_reports(std::span<const CellReport> reports, const std::string& out_dir,
                                      std::span<const ReportFormat> formats);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

}  // namespace dea
