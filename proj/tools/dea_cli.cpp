// Command-line front end: inspect instances, run single configurations,
// execute experiment grids and recompute statistics from raw results.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dea/diversity.hpp"
#include "dea/experiment.hpp"
#include "dea/island_model.hpp"
#include "dea/tsplib.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct ConfigFailure {
  std::string message;
};

dea::TspInstance load_for(const dea::ExperimentConfig& cfg) {
  try {
    auto inst = dea::load_instance(cfg.instance_path);
    if (cfg.optimum) inst = inst.with_optimum(cfg.optimum);
    return inst;
  } catch (const dea::ParseError& e) {
    throw ConfigFailure{cfg.instance_path + ": " + e.what()};
  } catch (const std::runtime_error& e) {
    throw ConfigFailure{e.what()};
  }
}

dea::ExperimentConfig load_cfg(const std::string& path) {
  try {
    return dea::load_config(path);
  } catch (const dea::ConfigError& e) {
    throw ConfigFailure{path + ": " + e.what()};
  }
}

int cmd_inspect(const std::string& path) {
  dea::TspInstance inst = [&] {
    try {
      return dea::load_instance(path);
    } catch (const std::exception& e) {
      throw ConfigFailure{path + ": " + e.what()};
    }
  }();
  std::cout << "name:       " << inst.name() << '\n'
            << "dimension:  " << inst.dimension() << '\n'
            << "metric:     " << dea::metric_name(inst.metric()) << '\n'
            << "optimum:    " << (inst.known_optimum() ? std::to_string(*inst.known_optimum()) : "unknown") << '\n'
            << "identity:   " << dea::Tour::identity(inst).length() << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override, bool write_trace) {
  auto cfg = load_cfg(config_path);
  auto inst = load_for(cfg);
  const auto mode = cfg.mode_specs().front();
  auto settings = cfg.run_settings(mode, cfg.intervals.front(), seed_override.value_or(cfg.seed));
  settings.workers = cfg.workers;

  const auto result = dea::run_dea(inst, settings);
  std::size_t accepted = 0;
  std::size_t offered = 0;
  for (const auto& round : result.rounds) {
    for (const auto& rec : round.islands) {
      accepted += rec.accepted ? 1 : 0;
      ++offered;
    }
  }
  std::cout << "instance:    " << inst.name() << '\n'
            << "mode:        " << mode.name();
  if (mode.mode == dea::MigrationMode::Gated) {
    std::cout << " (alpha=" << dea::format_exact(mode.alpha) << ", beta=" << dea::format_exact(mode.beta) << ")";
  }
  std::cout << '\n'
            << "interval:    " << settings.policy.interval << '\n'
            << "rounds:      " << settings.policy.rounds << '\n'
            << "best length: " << result.best_length << '\n';
  if (inst.known_optimum()) {
    std::cout << "optimum:     " << *inst.known_optimum() << " (excess "
              << dea::stats::difficulty(static_cast<double>(result.best_length),
                                        static_cast<double>(*inst.known_optimum()))
              << ")\n";
  }
  std::cout << "accepted:    " << accepted << " of " << offered << " migrant batches\n";

  if (write_trace) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = (std::filesystem::path(cfg.out_dir) / "trace.csv").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "round,island,diversity,probability,accepted,best_so_far\n";
    for (const auto& round : result.rounds) {
      for (std::size_t i = 0; i < round.islands.size(); ++i) {
        const auto& rec = round.islands[i];
        out << round.round << ',' << i << ',' << dea::format_exact(rec.diversity) << ','
            << dea::format_exact(rec.probability) << ',' << (rec.accepted ? 1 : 0) << ',' << round.best_so_far << '\n';
      }
    }
    std::cout << "trace:       " << path << '\n';
  }
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, bool markdown, bool quiet) {
  auto cfg = load_cfg(config_path);
  auto inst = load_for(cfg);
  dea::ProgressFn progress;
  if (!quiet) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << " runs" << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const auto reports = dea::run_experiment(cfg, inst, progress);
  std::vector<dea::ReportFormat> formats{dea::ReportFormat::Csv};
  if (markdown) formats.push_back(dea::ReportFormat::Markdown);
  for (const auto& path : dea::emit_reports(reports, cfg.out_dir, formats)) std::cout << path << '\n';
  return kExitOk;
}

int cmd_stats(const std::string& raw_path, std::optional<dea::Length> optimum, const std::string& out_dir,
              bool markdown) {
  std::ifstream in(raw_path);
  if (!in) throw ConfigFailure{"cannot open '" + raw_path + "'"};
  std::vector<dea::RawRow> rows;
  try {
    rows = dea::read_raw_csv(in);
  } catch (const dea::ConfigError& e) {
    throw ConfigFailure{raw_path + ": " + e.what()};
  }
  if (rows.empty()) throw ConfigFailure{raw_path + ": no data rows"};
  const auto reports = dea::aggregate(rows, optimum);
  if (out_dir.empty()) {
    if (markdown) {
      dea::write_markdown(std::cout, reports);
    } else {
      dea::write_aggregate_csv(std::cout, reports);
    }
    return kExitOk;
  }
  std::vector<dea::ReportFormat> formats{dea::ReportFormat::Csv};
  if (markdown) formats.push_back(dea::ReportFormat::Markdown);
  for (const auto& path : dea::emit_reports(reports, out_dir, formats)) std::cout << path << '\n';
  return kExitOk;
}

int cmd_curve(double alpha, double beta, std::size_t points) {
  if (points < 2) throw ConfigFailure{"--points must be at least 2"};
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigFailure{"alpha and beta must be non-negative"};
  const dea::DiversityParams params{alpha, beta, dea::DiversityMeasure::BestBased};
  std::cout << "# d p  (alpha=" << dea::format_exact(alpha) << ", beta=" << dea::format_exact(beta) << ")\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double d = static_cast<double>(i) / static_cast<double>(points - 1);
    std::cout << dea::format_exact(d) << ' ' << dea::format_exact(dea::success_probability(d, params)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Island-model evolutionary algorithm for the TSP with diversity-gated migration"};
  app.require_subcommand(1);

  std::string path;
  auto* inspect = app.add_subcommand("inspect", "Parse a TSPLIB file and print a summary");
  inspect->add_option("file", path, "TSPLIB .tsp file")->required();

  std::optional<std::uint64_t> seed;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Run the first mode and interval of a config once");
  run->add_option("config", path, "key=value config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--trace", trace, "Write per-round diversity/acceptance trace to out_dir/trace.csv");

  bool markdown = false;
  bool quiet = false;
  auto* experiment = app.add_subcommand("experiment", "Run the full (mode x interval x repetition) grid");
  experiment->add_option("config", path, "key=value config file")->required();
  experiment->add_flag("--markdown", markdown, "Also write report.md");
  experiment->add_flag("--quiet", quiet, "No progress output");

  std::optional<dea::Length> optimum;
  std::string out_dir;
  bool curve = false;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t points = 101;
  auto* stats = app.add_subcommand("stats", "Recompute aggregates and t-tests from a raw CSV, or dump p(d)");
  stats->add_option("raw", path, "raw.csv produced by 'experiment'");
  stats->add_option("--optimum", optimum, "Known optimum (default: registry lookup by instance name)");
  stats->add_option("--out", out_dir, "Write aggregate.csv (and report.md) here instead of stdout");
  stats->add_flag("--markdown", markdown, "Markdown output");
  stats->add_flag("--curve", curve, "Print d and p(d) over [0, 1] as two columns");
  stats->add_option("--alpha", alpha, "alpha for --curve");
  stats->add_option("--beta", beta, "beta for --curve");
  stats->add_option("--points", points, "Number of grid points for --curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*inspect) return cmd_inspect(path);
    if (*run) return cmd_run(path, seed, trace);
    if (*experiment) return cmd_experiment(path, markdown, quiet);
    if (*stats) {
      if (curve) return cmd_curve(alpha, beta, points);
      if (path.empty()) throw ConfigFailure{"stats needs a raw CSV file or --curve"};
      return cmd_stats(path, optimum, out_dir, markdown);
    }
  } catch (const ConfigFailure& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
