#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dea/random.hpp"
#include "dea/tsplib.hpp"

namespace dea {

/// A directed Hamiltonian cycle stored as a city order plus its inverse.
///
/// The cached length always equals a fresh recomputation; every mutating
/// member takes the instance so it can maintain that incrementally.
/// Direction matters: a tour and its reversal have different successor
/// functions, which is what the diversity measure compares.
class Tour {
 public:
  Tour() = default;

  /// Validates that `order` is a permutation of 0..k-1 matching the instance.
  Tour(std::vector<City> order, const TspInstance& inst);

  static Tour identity(const TspInstance& inst);
  static Tour random(const TspInstance& inst, Rng& rng);

  std::size_t size() const noexcept { return order_.size(); }
  Length length() const noexcept { return length_; }
  std::span<const City> order() const noexcept { return order_; }

  City at(std::size_t position) const noexcept { return order_[position]; }
  std::size_t position(City city) const noexcept { return static_cast<std::size_t>(pos_[static_cast<std::size_t>(city)]); }

  City successor(City city) const noexcept {
    auto p = position(city) + 1;
    return order_[p == order_.size() ? 0 : p];
  }
  City predecessor(City city) const noexcept {
    auto p = position(city);
    return order_[p == 0 ? order_.size() - 1 : p - 1];
  }

  /// Range-checked successor; throws std::out_of_range.
  City successor_checked(std::size_t city) const;

  /// Reverses the cyclic run of positions from_pos, from_pos+1, ..., to_pos
  /// (wrapping past the end when to_pos < from_pos) and updates the length
  /// from the two boundary edges. Throws std::out_of_range on bad positions.
  void invert(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst);

  /// Same as invert() without range checks; returns the length change.
  Length invert_unchecked(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) noexcept;

  /// Reverses positions from_pos..to_pos or, when that is shorter, the
  /// complementary run. Both give the same undirected cycle; a true return
  /// means the complement was reversed and the direction of travel flipped.
  /// Applying the same call again restores the previous order exactly.
  bool invert_either_side(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) noexcept;

  /// Reverses the whole order (same undirected cycle, opposite direction).
  void reverse_direction() noexcept;

  /// True when order is a bijection on 0..k-1 and the inverse index agrees.
  bool is_valid_permutation() const;

  friend bool operator==(const Tour& a, const Tour& b) noexcept { return a.order_ == b.order_; }

 private:
  void reverse_positions(std::size_t from_pos, std::size_t count) noexcept;

  std::vector<City> order_;
  std::vector<City> pos_;
  Length length_ = 0;
};

/// Full O(k) recomputation of a tour's cycle length. Throws
/// std::invalid_argument on a dimension mismatch.
Length cycle_length(const Tour& t, const TspInstance& inst);

/// Value-returning form of Tour::invert.
Tour invert_segment(Tour t, std::size_t from_pos, std::size_t to_pos, const TspInstance& inst);

}  // namespace dea
