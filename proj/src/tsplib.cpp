#include "dea/tsplib.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace dea {

namespace {

constexpr std::array<std::pair<std::string_view, Length>, 8> kOptima{{
    {"pcb442", 50778},
    {"p654", 34643},
    {"d657", 48912},
    {"u724", 41910},
    {"rat783", 8806},
    {"dsj1000", 18659688},
    {"pr1002", 259045},
    {"vm1084", 239297},
}};

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& value) {
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

bool is_numeric_line(std::string_view line) {
  auto t = trim(line);
  if (t.empty()) return false;
  const char c = t.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

struct Header {
  std::string name;
  std::optional<std::size_t> dimension;
  std::optional<Metric> metric;
  std::string weight_format;
};

class Parser {
 public:
  Parser(std::istream& in, std::size_t threshold) : in_(in), threshold_(threshold) {}

  TspInstance run() {
    std::string raw;
    bool done = false;
    while (!done && next_line(raw)) {
      const auto line = trim(raw);
      if (line.empty()) continue;
      const auto colon = line.find(':');
      const auto key = upper(trim(line.substr(0, colon)));
      const auto value = colon == std::string_view::npos ? std::string_view{} : trim(line.substr(colon + 1));

      if (key == "EOF") {
        done = true;
      } else if (key == "NAME") {
        header_.name = std::string(value);
      } else if (key == "TYPE") {
        const auto t = upper(value);
        if (t != "TSP") throw ParseError(line_no_, "TYPE", "unsupported problem type '" + std::string(value) + "'");
      } else if (key == "DIMENSION") {
        std::size_t dim = 0;
        if (!parse_number(value, dim)) throw ParseError(line_no_, "DIMENSION", "not a positive integer: '" + std::string(value) + "'");
        if (dim < 3) throw ParseError(line_no_, "DIMENSION", "at least 3 cities are required");
        header_.dimension = dim;
      } else if (key == "EDGE_WEIGHT_TYPE") {
        auto m = metric_from_name(upper(value));
        if (!m) throw ParseError(line_no_, "EDGE_WEIGHT_TYPE", "unsupported edge weight type '" + std::string(value) + "'");
        header_.metric = *m;
      } else if (key == "EDGE_WEIGHT_FORMAT") {
        header_.weight_format = upper(value);
        if (header_.weight_format != "FULL_MATRIX") {
          throw ParseError(line_no_, "EDGE_WEIGHT_FORMAT", "only FULL_MATRIX is supported, got '" + std::string(value) + "'");
        }
      } else if (key == "NODE_COORD_SECTION") {
        read_coords();
      } else if (key == "EDGE_WEIGHT_SECTION") {
        read_weights();
      } else if (key == "DISPLAY_DATA_SECTION") {
        skip_numeric_block();
      }
      // Anything else (COMMENT, NODE_COORD_TYPE, DISPLAY_DATA_TYPE, ...) is ignored.
      // Section readers push back the keyword line that ends them.
    }
    return finish();
  }

 private:
  bool next_line(std::string& out) {
    if (pending_) {
      out = std::move(*pending_);
      pending_.reset();
      return true;
    }
    if (!std::getline(in_, out)) return false;
    ++line_no_;
    return true;
  }

  void push_back(std::string line) { pending_ = std::move(line); }

  std::size_t require_dimension(const char* section) const {
    if (!header_.dimension) throw ParseError(line_no_, "DIMENSION", std::string("missing before ") + section);
    return *header_.dimension;
  }

  void read_coords() {
    const auto dim = require_dimension("NODE_COORD_SECTION");
    coords_.assign(dim, Coord{});
    std::vector<bool> seen(dim, false);
    std::size_t count = 0;
    std::string raw;
    while (next_line(raw)) {
      if (trim(raw).empty()) continue;
      if (!is_numeric_line(raw)) {
        push_back(std::move(raw));
        break;
      }
      const auto t = tokens(raw);
      std::size_t idx = 0;
      Coord c;
      if (t.size() < 3 || !parse_number(t[0], idx) || !parse_number(t[1], c.x) || !parse_number(t[2], c.y)) {
        throw ParseError(line_no_, "NODE_COORD_SECTION", "expected 'index x y'");
      }
      if (idx < 1 || idx > dim) throw ParseError(line_no_, "NODE_COORD_SECTION", "node index out of range: " + std::to_string(idx));
      if (seen[idx - 1]) throw ParseError(line_no_, "NODE_COORD_SECTION", "duplicate node index " + std::to_string(idx));
      seen[idx - 1] = true;
      coords_[idx - 1] = c;
      ++count;
    }
    if (count != dim) {
      throw ParseError(line_no_, "NODE_COORD_SECTION",
                       "expected " + std::to_string(dim) + " coordinates, found " + std::to_string(count));
    }
    have_coords_ = true;
  }

  void read_weights() {
    const auto dim = require_dimension("EDGE_WEIGHT_SECTION");
    if (header_.weight_format.empty()) throw ParseError(line_no_, "EDGE_WEIGHT_FORMAT", "missing before EDGE_WEIGHT_SECTION");
    weights_.clear();
    weights_.reserve(dim * dim);
    std::string raw;
    while (weights_.size() < dim * dim && next_line(raw)) {
      if (trim(raw).empty()) continue;
      if (!is_numeric_line(raw)) {
        push_back(std::move(raw));
        break;
      }
      for (auto tok : tokens(raw)) {
        Length w = 0;
        if (!parse_number(tok, w)) throw ParseError(line_no_, "EDGE_WEIGHT_SECTION", "not an integer: '" + std::string(tok) + "'");
        weights_.push_back(w);
      }
    }
    if (weights_.size() != dim * dim) {
      throw ParseError(line_no_, "EDGE_WEIGHT_SECTION",
                       "expected " + std::to_string(dim * dim) + " weights, found " + std::to_string(weights_.size()));
    }
    have_weights_ = true;
  }

  void skip_numeric_block() {
    std::string raw;
    while (next_line(raw)) {
      if (trim(raw).empty()) continue;
      if (!is_numeric_line(raw)) {
        push_back(std::move(raw));
        return;
      }
    }
  }

  TspInstance finish() {
    if (!header_.dimension) throw ParseError(0, "DIMENSION", "missing");
    if (!header_.metric) throw ParseError(0, "EDGE_WEIGHT_TYPE", "missing");
    auto optimum = known_optimum(header_.name);
    if (*header_.metric == Metric::ExplicitFullMatrix) {
      if (!have_weights_) throw ParseError(0, "EDGE_WEIGHT_SECTION", "missing");
      try {
        return TspInstance::from_matrix(header_.name, *header_.dimension, std::move(weights_), optimum);
      } catch (const std::invalid_argument& e) {
        throw ParseError(0, "EDGE_WEIGHT_SECTION", e.what());
      }
    }
    if (!have_coords_) throw ParseError(0, "NODE_COORD_SECTION", "missing");
    return TspInstance(header_.name, *header_.metric, std::move(coords_), optimum, threshold_);
  }

  std::istream& in_;
  std::size_t threshold_;
  std::size_t line_no_ = 0;
  std::optional<std::string> pending_;
  Header header_;
  std::vector<Coord> coords_;
  std::vector<Length> weights_;
  bool have_coords_ = false;
  bool have_weights_ = false;
};

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string field, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", " + field + ": " + what),
      line_(line),
      field_(std::move(field)) {}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Euc2D: return "EUC_2D";
    case Metric::Ceil2D: return "CEIL_2D";
    case Metric::Att: return "ATT";
    case Metric::Geo: return "GEO";
    case Metric::ExplicitFullMatrix: return "EXPLICIT";
  }
  return "?";
}

std::optional<Metric> metric_from_name(std::string_view name) {
  if (name == "EUC_2D") return Metric::Euc2D;
  if (name == "CEIL_2D") return Metric::Ceil2D;
  if (name == "ATT") return Metric::Att;
  if (name == "GEO") return Metric::Geo;
  if (name == "EXPLICIT") return Metric::ExplicitFullMatrix;
  return std::nullopt;
}

Length tsplib_nint(double x) noexcept { return static_cast<Length>(std::floor(x + 0.5)); }

Length euc_2d(Coord a, Coord b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return tsplib_nint(std::sqrt(dx * dx + dy * dy));
}

Length ceil_2d(Coord a, Coord b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return static_cast<Length>(std::ceil(std::sqrt(dx * dx + dy * dy)));
}

Length att_distance(Coord a, Coord b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
  const Length t = tsplib_nint(r);
  return static_cast<double>(t) < r ? t + 1 : t;
}

namespace {

// TSPLIB's GEO conversion: DDD.MM degrees-minutes to radians, with its own PI.
double geo_radians(double v) {
  constexpr double kPi = 3.141592;
  const double deg = std::trunc(v);
  const double min = v - deg;
  return kPi * (deg + 5.0 * min / 3.0) / 180.0;
}

}  // namespace

Length geo_distance(Coord a, Coord b) noexcept {
  constexpr double kEarthRadius = 6378.388;
  const double lat_a = geo_radians(a.x), lon_a = geo_radians(a.y);
  const double lat_b = geo_radians(b.x), lon_b = geo_radians(b.y);
  const double q1 = std::cos(lon_a - lon_b);
  const double q2 = std::cos(lat_a - lat_b);
  const double q3 = std::cos(lat_a + lat_b);
  return static_cast<Length>(kEarthRadius * std::acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0);
}

TspInstance::TspInstance(std::string name, Metric metric, std::vector<Coord> coords,
                         std::optional<Length> optimum, std::size_t matrix_threshold)
    : name_(std::move(name)),
      dimension_(coords.size()),
      metric_(metric),
      coords_(std::move(coords)),
      known_optimum_(optimum) {
  if (metric_ == Metric::ExplicitFullMatrix) throw std::invalid_argument("explicit instances need a weight matrix");
  if (dimension_ < 3) throw std::invalid_argument("an instance needs at least 3 cities");
  if (dimension_ <= matrix_threshold) build_matrix();
}

TspInstance TspInstance::from_matrix(std::string name, std::size_t dimension, std::vector<Length> weights,
                                     std::optional<Length> optimum) {
  if (dimension < 3) throw std::invalid_argument("an instance needs at least 3 cities");
  if (weights.size() != dimension * dimension) throw std::invalid_argument("weight matrix size does not match dimension");
  for (std::size_t a = 0; a < dimension; ++a) {
    if (weights[a * dimension + a] != 0) throw std::invalid_argument("non-zero diagonal at city " + std::to_string(a + 1));
    for (std::size_t b = a + 1; b < dimension; ++b) {
      const auto w = weights[a * dimension + b];
      if (w < 0) throw std::invalid_argument("negative weight");
      if (w != weights[b * dimension + a]) throw std::invalid_argument("asymmetric weight matrix");
    }
  }
  TspInstance inst;
  inst.name_ = std::move(name);
  inst.dimension_ = dimension;
  inst.metric_ = Metric::ExplicitFullMatrix;
  inst.known_optimum_ = optimum;
  inst.matrix_ = std::move(weights);
  return inst;
}

Length TspInstance::compute(std::size_t a, std::size_t b) const noexcept {
  if (a == b) return 0;
  const auto& ca = coords_[a];
  const auto& cb = coords_[b];
  switch (metric_) {
    case Metric::Euc2D: return euc_2d(ca, cb);
    case Metric::Ceil2D: return ceil_2d(ca, cb);
    case Metric::Att: return att_distance(ca, cb);
    case Metric::Geo: return geo_distance(ca, cb);
    case Metric::ExplicitFullMatrix: break;
  }
  return matrix_[a * dimension_ + b];
}

void TspInstance::build_matrix() {
  std::vector<Length> m(dimension_ * dimension_, 0);
  for (std::size_t a = 0; a < dimension_; ++a) {
    for (std::size_t b = a + 1; b < dimension_; ++b) {
      const auto w = compute(a, b);
      m[a * dimension_ + b] = w;
      m[b * dimension_ + a] = w;
    }
  }
  matrix_ = std::move(m);
}

Length TspInstance::distance(std::size_t a, std::size_t b) const {
  if (a >= dimension_ || b >= dimension_) {
    throw std::out_of_range("city index out of range for dimension " + std::to_string(dimension_));
  }
  return weight(static_cast<City>(a), static_cast<City>(b));
}

TspInstance TspInstance::with_optimum(std::optional<Length> optimum) const {
  TspInstance copy = *this;
  copy.known_optimum_ = optimum;
  return copy;
}

TspInstance parse_instance(std::istream& in, std::size_t matrix_threshold) {
  return Parser(in, matrix_threshold).run();
}

TspInstance parse_instance_text(std::string_view text, std::size_t matrix_threshold) {
  std::istringstream in{std::string(text)};
  return parse_instance(in, matrix_threshold);
}

TspInstance load_instance(const std::string& path, std::size_t matrix_threshold) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return parse_instance(in, matrix_threshold);
}

void write_instance(std::ostream& out, const TspInstance& inst) {
  out << "NAME: " << inst.name() << '\n'
      << "TYPE: TSP\n"
      << "DIMENSION: " << inst.dimension() << '\n'
      << "EDGE_WEIGHT_TYPE: " << metric_name(inst.metric()) << '\n';
  if (inst.metric() == Metric::ExplicitFullMatrix) {
    out << "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
    for (std::size_t a = 0; a < inst.dimension(); ++a) {
      for (std::size_t b = 0; b < inst.dimension(); ++b) {
        out << (b ? " " : "") << inst.distance(a, b);
      }
      out << '\n';
    }
  } else {
    out << "NODE_COORD_SECTION\n";
    const auto coords = inst.coords();
    for (std::size_t i = 0; i < coords.size(); ++i) {
      out << (i + 1) << ' ' << format_double(coords[i].x) << ' ' << format_double(coords[i].y) << '\n';
    }
  }
  out << "EOF\n";
}

std::optional<Length> known_optimum(std::string_view name) {
  for (const auto& [n, v] : kOptima) {
    if (n == name) return v;
  }
  return std::nullopt;
}

}  // namespace dea
