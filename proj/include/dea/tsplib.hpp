#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dea {

using City = std::int32_t;
using Length = std::int64_t;

enum class Metric { Euc2D, Ceil2D, Att, Geo, ExplicitFullMatrix };

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);

struct Coord {
  double x = 0.0;
  double y = 0.0;
};

/// Raised for malformed TSPLIB input. `line` is 1-based; 0 means end of input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Dimensions at or below this get a precomputed weight matrix.
inline constexpr std::size_t kDefaultMatrixThreshold = 2000;

/// A symmetric TSP instance. Immutable after construction, so it can be
/// shared freely between islands running on different threads.
class TspInstance {
 public:
  /// Coordinate-based instance. Throws std::invalid_argument when the
  /// metric is EXPLICIT or fewer than 3 cities are given.
  TspInstance(std::string name, Metric metric, std::vector<Coord> coords,
              std::optional<Length> known_optimum = std::nullopt,
              std::size_t matrix_threshold = kDefaultMatrixThreshold);

  /// Explicit full-matrix instance; `weights` is row-major dimension x dimension
  /// and must be symmetric with a zero diagonal.
  static TspInstance from_matrix(std::string name, std::size_t dimension,
                                 std::vector<Length> weights,
                                 std::optional<Length> known_optimum = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  Metric metric() const noexcept { return metric_; }
  std::span<const Coord> coords() const noexcept { return coords_; }
  std::optional<Length> known_optimum() const noexcept { return known_optimum_; }
  bool has_matrix() const noexcept { return !matrix_.empty(); }

  /// Bounds-checked edge weight; throws std::out_of_range.
  Length distance(std::size_t a, std::size_t b) const;

  /// Hot-path weight with no range checks.
  Length weight(City a, City b) const noexcept {
    if (!matrix_.empty()) {
      return matrix_[static_cast<std::size_t>(a) * dimension_ + static_cast<std::size_t>(b)];
    }
    return compute(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }

  TspInstance with_optimum(std::optional<Length> optimum) const;

 private:
  TspInstance() = default;
  Length compute(std::size_t a, std::size_t b) const noexcept;
  void build_matrix();

  std::string name_;
  std::size_t dimension_ = 0;
  Metric metric_ = Metric::Euc2D;
  std::vector<Coord> coords_;
  std::optional<Length> known_optimum_;
  std::vector<Length> matrix_;
};

/// TSPLIB nint: floor(x + 0.5).
Length tsplib_nint(double x) noexcept;

/// Pure metric functions, exposed for testing against the reference definitions.
Length euc_2d(Coord a, Coord b) noexcept;
Length ceil_2d(Coord a, Coord b) noexcept;
Length att_distance(Coord a, Coord b) noexcept;
Length geo_distance(Coord a, Coord b) noexcept;

TspInstance parse_instance(std::istream& in,
                           std::size_t matrix_threshold = kDefaultMatrixThreshold);
TspInstance parse_instance_text(std::string_view text,
                                std::size_t matrix_threshold = kDefaultMatrixThreshold);
TspInstance load_instance(const std::string& path,
                          std::size_t matrix_threshold = kDefaultMatrixThreshold);

/// Writes the instance back out in TSPLIB form. Coordinates use the shortest
/// representation that round-trips exactly.
void write_instance(std::ostream& out, const TspInstance& inst);

/// Registered optimal tour lengths for the benchmark set used in the experiments.
std::optional<Length> known_optimum(std::string_view name);

}  // namespace dea
