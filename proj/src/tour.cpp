#include "dea/tour.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dea {

namespace {

Length order_length(std::span<const City> order, const TspInstance& inst) {
  Length total = 0;
  for (std::size_t p = 0; p + 1 < order.size(); ++p) total += inst.weight(order[p], order[p + 1]);
  total += inst.weight(order.back(), order.front());
  return total;
}

}  // namespace

Tour::Tour(std::vector<City> order, const TspInstance& inst) : order_(std::move(order)) {
  if (order_.size() != inst.dimension()) {
    throw std::invalid_argument("tour has " + std::to_string(order_.size()) + " cities, instance has " +
                                std::to_string(inst.dimension()));
  }
  pos_.assign(order_.size(), -1);
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const auto c = order_[p];
    if (c < 0 || static_cast<std::size_t>(c) >= order_.size() || pos_[static_cast<std::size_t>(c)] != -1) {
      throw std::invalid_argument("tour order is not a permutation");
    }
    pos_[static_cast<std::size_t>(c)] = static_cast<City>(p);
  }
  length_ = order_length(order_, inst);
}

Tour Tour::identity(const TspInstance& inst) {
  std::vector<City> order(inst.dimension());
  std::iota(order.begin(), order.end(), City{0});
  return Tour(std::move(order), inst);
}

Tour Tour::random(const TspInstance& inst, Rng& rng) {
  std::vector<City> order(inst.dimension());
  std::iota(order.begin(), order.end(), City{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(rng, i + 1)]);
  }
  return Tour(std::move(order), inst);
}

City Tour::successor_checked(std::size_t city) const {
  if (city >= order_.size()) throw std::out_of_range("city index out of range");
  return successor(static_cast<City>(city));
}

void Tour::reverse_positions(std::size_t from_pos, std::size_t count) noexcept {
  const std::size_t k = order_.size();
  std::size_t i = from_pos;
  std::size_t j = (from_pos + count - 1) % k;
  for (std::size_t s = 0; s < count / 2; ++s) {
    std::swap(order_[i], order_[j]);
    pos_[static_cast<std::size_t>(order_[i])] = static_cast<City>(i);
    pos_[static_cast<std::size_t>(order_[j])] = static_cast<City>(j);
    i = (i + 1 == k) ? 0 : i + 1;
    j = (j == 0) ? k - 1 : j - 1;
  }
}

Length Tour::invert_unchecked(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) noexcept {
  const std::size_t k = order_.size();
  const std::size_t count = (to_pos + k - from_pos) % k + 1;
  Length delta = 0;
  if (count + 1 < k) {
    const City first = order_[from_pos];
    const City last = order_[to_pos];
    const City before = order_[from_pos == 0 ? k - 1 : from_pos - 1];
    const City after = order_[to_pos + 1 == k ? 0 : to_pos + 1];
    delta = inst.weight(before, last) + inst.weight(first, after) - inst.weight(before, first) -
            inst.weight(last, after);
  }
  // count >= k-1: the boundary edges only swap direction, so the symmetric length is unchanged.
  reverse_positions(from_pos, count);
  length_ += delta;
  return delta;
}

bool Tour::invert_either_side(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) noexcept {
  const std::size_t k = order_.size();
  const std::size_t count = (to_pos + k - from_pos) % k + 1;
  if (2 * count <= k || count == k) {
    invert_unchecked(from_pos, to_pos, inst);
    return false;
  }
  // The complement shares the two boundary edges, so the length change is the same.
  invert_unchecked(to_pos + 1 == k ? 0 : to_pos + 1, from_pos == 0 ? k - 1 : from_pos - 1, inst);
  return true;
}

void Tour::reverse_direction() noexcept {
  std::reverse(order_.begin(), order_.end());
  for (std::size_t p = 0; p < order_.size(); ++p) pos_[static_cast<std::size_t>(order_[p])] = static_cast<City>(p);
}

void Tour::invert(std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) {
  if (from_pos >= order_.size() || to_pos >= order_.size()) throw std::out_of_range("segment position out of range");
  if (order_.size() != inst.dimension()) throw std::invalid_argument("tour and instance dimensions differ");
  invert_unchecked(from_pos, to_pos, inst);
}

bool Tour::is_valid_permutation() const {
  if (pos_.size() != order_.size()) return false;
  std::vector<bool> seen(order_.size(), false);
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const auto c = order_[p];
    if (c < 0 || static_cast<std::size_t>(c) >= order_.size() || seen[static_cast<std::size_t>(c)]) return false;
    seen[static_cast<std::size_t>(c)] = true;
    if (pos_[static_cast<std::size_t>(c)] != static_cast<City>(p)) return false;
  }
  return true;
}

Length cycle_length(const Tour& t, const TspInstance& inst) {
  if (t.size() != inst.dimension()) throw std::invalid_argument("tour and instance dimensions differ");
  return order_length(t.order(), inst);
}

Tour invert_segment(Tour t, std::size_t from_pos, std::size_t to_pos, const TspInstance& inst) {
  t.invert(from_pos, to_pos, inst);
  return t;
}

}  // namespace dea
