#include "dea/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace dea {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_num(std::string_view tok) {
  tok = trim(tok);
  T value{};
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return value;
}

template <typename T>
T require_num(std::string_view tok, std::size_t line, std::string_view key) {
  auto v = parse_num<T>(tok);
  if (!v) throw ConfigError(line, "invalid value '" + std::string(tok) + "' for '" + std::string(key) + "'");
  return *v;
}

template <typename T>
std::vector<T> require_list(std::string_view value, std::size_t line, std::string_view key) {
  std::vector<T> out;
  for (auto tok : split(value, ',')) {
    if (tok.empty()) continue;
    out.push_back(require_num<T>(tok, line, key));
  }
  if (out.empty()) throw ConfigError(line, "'" + std::string(key) + "' needs at least one value");
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<MigrationMode> mode_from_name(std::string_view name) {
  const auto n = lower(trim(name));
  if (n == "classic") return MigrationMode::Classic;
  if (n == "gated") return MigrationMode::Gated;
  return std::nullopt;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_exact(*v) : std::string{}; }

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, cells)

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError(1, "CSV header lacks column '" + std::string(name) + "'");
  }
};

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (auto c : split(line, ',')) cells.emplace_back(c);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ConfigError(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                     std::to_string(cells.size()));
    }
    table.rows.emplace_back(line_no, std::move(cells));
  }
  if (table.header.empty()) throw ConfigError(0, "empty CSV input");
  return table;
}

ModeSpec parse_mode_cells(const std::string& mode, const std::string& alpha, const std::string& beta,
                          std::size_t line) {
  auto m = mode_from_name(mode);
  if (!m) throw ConfigError(line, "unknown mode '" + mode + "'");
  ModeSpec spec{*m, 0.0, 0.0};
  if (*m == MigrationMode::Gated) {
    spec.alpha = require_num<double>(alpha, line, "alpha");
    spec.beta = require_num<double>(beta, line, "beta");
  }
  return spec;
}

std::string md_number(double v, int decimals) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string ModeSpec::name() const { return mode == MigrationMode::Classic ? "classic" : "gated"; }

std::string format_exact(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void ExperimentConfig::validate() const {
  if (instance_path.empty()) throw ConfigError(0, "'instance' is required");
  if (modes.empty()) throw ConfigError(0, "'modes' must name at least one mode");
  if (intervals.empty()) throw ConfigError(0, "'intervals' must list at least one interval");
  for (auto i : intervals) {
    if (i < 1) throw ConfigError(0, "intervals must be positive");
  }
  if (repetitions < 2) throw ConfigError(0, "'repetitions' must be at least 2");
  if (islands < 2) throw ConfigError(0, "'islands' must be at least 2");
  if (subpop < 2) throw ConfigError(0, "'subpop' must be at least 2");
  if (migration_size < 1 || migration_size > subpop) throw ConfigError(0, "'migration_size' must lie in [1, subpop]");
  if (rounds < 1) throw ConfigError(0, "'rounds' must be at least 1");
  if (std::find(modes.begin(), modes.end(), MigrationMode::Gated) != modes.end()) {
    if (alphas.empty() || betas.empty()) throw ConfigError(0, "gated mode needs 'alphas' and 'betas'");
    for (double a : alphas) {
      if (!(a >= 0.0)) throw ConfigError(0, "alphas must be non-negative");
    }
    for (double b : betas) {
      if (!(b >= 0.0)) throw ConfigError(0, "betas must be non-negative");
    }
  }
  if (!(ea.p_mu0 >= 0.0 && ea.p_mu0 <= 1.0)) throw ConfigError(0, "'p_mu0' must lie in [0, 1]");
  if (!(ea.p_ma0 >= 0.0 && ea.p_ma0 * 3.0 <= 1.0)) throw ConfigError(0, "'p_ma0' must lie in [0, 1/3]");
  if (!(ea.velocity_threshold > 0.0)) throw ConfigError(0, "'velocity_threshold' must be positive");
  if (optimum && *optimum <= 0) throw ConfigError(0, "'optimum' must be positive");
}

std::vector<ModeSpec> ExperimentConfig::mode_specs() const {
  std::vector<ModeSpec> out;
  if (std::find(modes.begin(), modes.end(), MigrationMode::Classic) != modes.end()) {
    out.push_back(ModeSpec{MigrationMode::Classic, 0.0, 0.0});
  }
  if (std::find(modes.begin(), modes.end(), MigrationMode::Gated) != modes.end()) {
    for (double a : alphas) {
      for (double b : betas) out.push_back(ModeSpec{MigrationMode::Gated, a, b});
    }
  }
  return out;
}

RunSettings ExperimentConfig::run_settings(const ModeSpec& mode, std::int64_t interval, std::uint64_t run_seed) const {
  RunSettings s;
  s.policy.interval = interval;
  s.policy.size = migration_size;
  s.policy.mode = mode.mode;
  s.policy.diversity = DiversityParams{mode.alpha, mode.beta, measure};
  s.policy.rounds = rounds;
  s.ea = ea;
  s.islands = islands;
  s.subpop = subpop;
  s.seed = run_seed;
  s.workers = 1;
  return s;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const auto key = lower(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));

    if (key == "instance") {
      cfg.instance_path = std::string(value);
    } else if (key == "modes") {
      cfg.modes.clear();
      for (auto tok : split(value, ',')) {
        if (tok.empty()) continue;
        auto m = mode_from_name(tok);
        if (!m) throw ConfigError(line_no, "unknown mode '" + std::string(tok) + "'");
        cfg.modes.push_back(*m);
      }
      if (cfg.modes.empty()) throw ConfigError(line_no, "'modes' needs at least one value");
    } else if (key == "alphas") {
      cfg.alphas = require_list<double>(value, line_no, key);
    } else if (key == "betas") {
      cfg.betas = require_list<double>(value, line_no, key);
    } else if (key == "intervals") {
      cfg.intervals = require_list<std::int64_t>(value, line_no, key);
    } else if (key == "repetitions") {
      cfg.repetitions = require_num<std::size_t>(value, line_no, key);
    } else if (key == "islands") {
      cfg.islands = require_num<std::size_t>(value, line_no, key);
    } else if (key == "subpop") {
      cfg.subpop = require_num<std::size_t>(value, line_no, key);
    } else if (key == "migration_size") {
      cfg.migration_size = require_num<std::size_t>(value, line_no, key);
    } else if (key == "rounds") {
      cfg.rounds = require_num<std::int64_t>(value, line_no, key);
    } else if (key == "velocity_threshold") {
      cfg.ea.velocity_threshold = require_num<double>(value, line_no, key);
    } else if (key == "p_mu0") {
      cfg.ea.p_mu0 = require_num<double>(value, line_no, key);
    } else if (key == "p_ma0") {
      cfg.ea.p_ma0 = require_num<double>(value, line_no, key);
    } else if (key == "seed") {
      cfg.seed = require_num<std::uint64_t>(value, line_no, key);
    } else if (key == "out_dir") {
      cfg.out_dir = std::string(value);
    } else if (key == "optimum") {
      cfg.optimum = require_num<Length>(value, line_no, key);
    } else if (key == "measure") {
      const auto m = lower(value);
      if (m == "best" || m == "best_based") {
        cfg.measure = DiversityMeasure::BestBased;
      } else if (m == "pairwise") {
        cfg.measure = DiversityMeasure::Pairwise;
      } else {
        throw ConfigError(line_no, "unknown diversity measure '" + std::string(value) + "'");
      }
    } else if (key == "workers") {
      cfg.workers = require_num<unsigned>(value, line_no, key);
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  auto cfg = parse_config(in);
  // Relative instance paths are taken relative to the config file.
  std::filesystem::path inst(cfg.instance_path);
  if (inst.is_relative()) {
    cfg.instance_path = (std::filesystem::path(path).parent_path() / inst).lexically_normal().string();
  }
  return cfg;
}

std::uint64_t run_seed(std::uint64_t master, const ModeSpec& mode, std::int64_t interval, std::size_t run_index) {
  std::uint64_t s = derive_seed(master, mode.mode == MigrationMode::Classic ? 0x636c61737369ULL : 0x6761746564ULL);
  if (mode.mode == MigrationMode::Gated) {
    s = derive_seed(s, std::bit_cast<std::uint64_t>(mode.alpha));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(mode.beta));
  }
  s = derive_seed(s, static_cast<std::uint64_t>(interval));
  return derive_seed(s, run_index);
}

std::vector<CellReport> aggregate(std::span<const RawRow> rows, std::optional<Length> optimum) {
  std::vector<CellReport> cells;
  std::vector<std::vector<std::pair<std::size_t, double>>> runs;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const CellReport& c) {
      return c.instance == r.instance && c.mode == r.mode && c.interval == r.interval;
    });
    if (it == cells.end()) {
      CellReport c;
      c.instance = r.instance;
      c.mode = r.mode;
      c.interval = r.interval;
      cells.push_back(std::move(c));
      runs.emplace_back();
      it = cells.end() - 1;
    }
    runs[static_cast<std::size_t>(it - cells.begin())].emplace_back(r.run_index, static_cast<double>(r.best_length));
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& c = cells[i];
    auto& v = runs[i];
    std::sort(v.begin(), v.end());
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (v[j].first == v[j - 1].first) {
        throw ConfigError(0, "duplicate run index " + std::to_string(v[j].first) + " in cell " + c.instance + "/" +
                                 c.mode.name() + "/" + std::to_string(c.interval));
      }
    }
    for (const auto& [idx, len] : v) c.lengths.push_back(len);
    c.mean = stats::mean(c.lengths);
    c.stddev = c.lengths.size() >= 2 ? stats::sample_stddev(c.lengths) : 0.0;
    c.optimum = optimum ? optimum : known_optimum(c.instance);
    if (c.optimum) c.difficulty = stats::difficulty(c.mean, static_cast<double>(*c.optimum));
  }

  for (auto& c : cells) {
    if (c.mode.mode != MigrationMode::Gated) continue;
    for (const auto& base : cells) {
      if (base.mode.mode == MigrationMode::Classic && base.instance == c.instance && base.interval == c.interval &&
          c.lengths.size() >= 2 && base.lengths.size() >= 2) {
        c.versus_classic = stats::welch_t_test(c.lengths, base.lengths);
        break;
      }
    }
  }
  return cells;
}

std::vector<CellReport> run_experiment(const ExperimentConfig& cfg, const TspInstance& inst,
                                       const ProgressFn& progress) {
  cfg.validate();
  struct Job {
    ModeSpec mode;
    std::int64_t interval;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (auto interval : cfg.intervals) {
    for (const auto& mode : cfg.mode_specs()) {
      for (std::size_t r = 0; r < cfg.repetitions; ++r) jobs.push_back(Job{mode, interval, r});
    }
  }

  std::vector<RawRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& job = jobs[j];
      const auto settings = cfg.run_settings(job.mode, job.interval, run_seed(cfg.seed, job.mode, job.interval, job.run));
      const auto result = run_dea(inst, settings);
      rows[j] = RawRow{inst.name(), job.mode, job.interval, job.run, result.best_length};
      const auto finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, jobs.size());
      }
    }
  };
  const unsigned threads = std::max(1u, cfg.workers);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return aggregate(rows, cfg.optimum ? cfg.optimum : inst.known_optimum());
}

std::vector<RawRow> raw_rows(std::span<const CellReport> reports) {
  std::vector<RawRow> rows;
  for (const auto& c : reports) {
    for (std::size_t i = 0; i < c.lengths.size(); ++i) {
      rows.push_back(RawRow{c.instance, c.mode, c.interval, i, static_cast<Length>(c.lengths[i])});
    }
  }
  return rows;
}

void write_raw_csv(std::ostream& out, std::span<const CellReport> reports) {
  out << "instance,mode,alpha,beta,interval,run_index,best_length\n";
  for (const auto& r : raw_rows(reports)) {
    const bool gated = r.mode.mode == MigrationMode::Gated;
    out << r.instance << ',' << r.mode.name() << ',' << (gated ? format_exact(r.mode.alpha) : "") << ','
        << (gated ? format_exact(r.mode.beta) : "") << ',' << r.interval << ',' << r.run_index << ','
        << r.best_length << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const CellReport> reports) {
  out << "instance,mode,alpha,beta,interval,mean,stddev,optimum,DF,t_stat,p_value,significant\n";
  for (const auto& c : reports) {
    const bool gated = c.mode.mode == MigrationMode::Gated;
    out << c.instance << ',' << c.mode.name() << ',' << (gated ? format_exact(c.mode.alpha) : "") << ','
        << (gated ? format_exact(c.mode.beta) : "") << ',' << c.interval << ',' << format_exact(c.mean) << ','
        << format_exact(c.stddev) << ',' << (c.optimum ? std::to_string(*c.optimum) : "") << ','
        << opt_text(c.difficulty) << ',';
    if (c.versus_classic) {
      out << format_exact(c.versus_classic->t) << ',' << format_exact(c.versus_classic->p_value) << ','
          << (c.versus_classic->significant ? "1" : "0");
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_markdown(std::ostream& out, std::span<const CellReport> reports) {
  std::vector<std::string> instances;
  for (const auto& c : reports) {
    if (std::find(instances.begin(), instances.end(), c.instance) == instances.end()) instances.push_back(c.instance);
  }
  for (const auto& name : instances) {
    std::optional<Length> optimum;
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& c : reports) {
      if (c.instance != name) continue;
      optimum = c.optimum;
      for (double v : c.lengths) total += v;
      count += c.lengths.size();
    }
    out << "## " << name << "\n\n";
    out << "Gated cells are compared with classic at the same interval by Welch's unequal-variance "
           "t-test (two-tailed, 95% confidence); significant cells are in ***bold italics***.\n\n";
    out << "| Mode | alpha | beta | Interval | Outcomes average | Standard deviation | Optimal solution | t | p |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : reports) {
      if (c.instance != name) continue;
      const bool gated = c.mode.mode == MigrationMode::Gated;
      const bool sig = c.versus_classic && c.versus_classic->significant;
      auto cell = [&](const std::string& s) { return sig ? "***" + s + "***" : s; };
      out << "| " << c.mode.name() << " | " << (gated ? format_exact(c.mode.alpha) : "-") << " | "
          << (gated ? format_exact(c.mode.beta) : "-") << " | " << cell(std::to_string(c.interval)) << " | "
          << cell(md_number(c.mean, 1)) << " | " << cell(md_number(c.stddev, 2)) << " | "
          << (c.optimum ? std::to_string(*c.optimum) : "-") << " | "
          << (c.versus_classic ? md_number(c.versus_classic->t, 3) : "-") << " | "
          << (c.versus_classic ? md_number(c.versus_classic->p_value, 4) : "-") << " |\n";
    }
    out << '\n';
    if (optimum && count > 0) {
      out << "Difficulty over all runs: " << md_number(stats::difficulty(total / static_cast<double>(count),
                                                                          static_cast<double>(*optimum)),
                                                       6)
          << "\n\n";
    }
  }
}

std::vector<RawRow> read_raw_csv(std::istream& in) {
  const auto table = read_csv(in);
  const auto ci = table.column("instance"), cm = table.column("mode"), ca = table.column("alpha"),
             cb = table.column("beta"), cint = table.column("interval"), cr = table.column("run_index"),
             cl = table.column("best_length");
  std::vector<RawRow> rows;
  for (const auto& [line, cells] : table.rows) {
    RawRow r;
    r.instance = cells[ci];
    r.mode = parse_mode_cells(cells[cm], cells[ca], cells[cb], line);
    r.interval = require_num<std::int64_t>(cells[cint], line, "interval");
    r.run_index = require_num<std::size_t>(cells[cr], line, "run_index");
    r.best_length = require_num<Length>(cells[cl], line, "best_length");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  const auto table = read_csv(in);
  const auto ci = table.column("instance"), cm = table.column("mode"), ca = table.column("alpha"),
             cb = table.column("beta"), cint = table.column("interval"), cmean = table.column("mean"),
             csd = table.column("stddev"), copt = table.column("optimum"), cdf = table.column("DF"),
             ct = table.column("t_stat"), cp = table.column("p_value"), cs = table.column("significant");
  auto opt_double = [](const std::string& s, std::size_t line, const char* key) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return require_num<double>(s, line, key);
  };
  std::vector<AggregateRow> rows;
  for (const auto& [line, cells] : table.rows) {
    AggregateRow r;
    r.instance = cells[ci];
    r.mode = parse_mode_cells(cells[cm], cells[ca], cells[cb], line);
    r.interval = require_num<std::int64_t>(cells[cint], line, "interval");
    r.mean = require_num<double>(cells[cmean], line, "mean");
    r.stddev = require_num<double>(cells[csd], line, "stddev");
    if (!cells[copt].empty()) r.optimum = require_num<Length>(cells[copt], line, "optimum");
    r.difficulty = opt_double(cells[cdf], line, "DF");
    r.t_stat = opt_double(cells[ct], line, "t_stat");
    r.p_value = opt_double(cells[cp], line, "p_value");
    if (!cells[cs].empty()) r.significant = cells[cs] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> emit_reports(std::span<const CellReport> reports, const std::string& out_dir,
                                      std::span<const ReportFormat> formats) {
  if (reports.empty()) throw std::invalid_argument("no reports to emit");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());

  std::vector<std::string> written;
  auto write = [&](const std::string& file, auto&& fn) {
    const auto path = (std::filesystem::path(out_dir) / file).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
    written.push_back(path);
  };
  for (auto f : formats) {
    if (f == ReportFormat::Csv) {
      write("raw.csv", [&](std::ostream& o) { write_raw_csv(o, reports); });
      write("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, reports); });
    } else {
      write("report.md", [&](std::ostream& o) { write_markdown(o, reports); });
    }
  }
  return written;
}

}  // namespace dea
