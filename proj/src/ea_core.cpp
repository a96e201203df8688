#include "dea/ea_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dea {

VelocityState VelocityState::start(Length initial_best, double threshold) {
  VelocityState st;
  st.best = initial_best;
  st.previous_best = initial_best;
  st.threshold = threshold;
  return st;
}

void VelocityState::observe(Length island_best, std::int64_t generation) {
  if (island_best >= best) return;
  previous_best = best;
  best = island_best;
  delta_generations = generation - best_generation;
  best_generation = generation;
  has_velocity = true;
}

double evolutionary_velocity(const VelocityState& st) {
  if (!st.has_velocity) return std::numeric_limits<double>::infinity();
  if (st.delta_generations < 1) throw std::domain_error("evolutionary velocity needs at least one generation between bests");
  return std::abs(static_cast<double>(st.best - st.previous_best)) / static_cast<double>(st.delta_generations);
}

bool mapping_permitted(const VelocityState& st) { return evolutionary_velocity(st) < st.threshold; }

Rates current_rates(const RateSchedule& rs) {
  const double g = static_cast<double>(std::max<std::int64_t>(rs.horizon, 1));
  const double gn = static_cast<double>(std::clamp<std::int64_t>(rs.generation, 0, rs.horizon));
  return Rates{rs.p_mu0 * (1.0 - gn / g * 0.5), rs.p_ma0 * (gn * 2.0 / g + 1.0)};
}

std::size_t Island::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < tours.size(); ++i) {
    if (tours[i].length() < tours[best].length()) best = i;
  }
  return best;
}

Island make_island(std::size_t id, const TspInstance& inst, std::size_t size, const EaParams& ea,
                   std::int64_t horizon, std::uint64_t seed) {
  if (size == 0) throw std::invalid_argument("an island needs at least one individual");
  Island island;
  island.id = id;
  island.rng.seed(seed);
  island.tours.reserve(size);
  for (std::size_t i = 0; i < size; ++i) island.tours.push_back(Tour::random(inst, island.rng));
  island.rates = RateSchedule{ea.p_mu0, ea.p_ma0, horizon, 0};
  island.velocity = VelocityState::start(island.best_length(), ea.velocity_threshold);
  return island;
}

bool inver_over_in_place(std::span<Tour> pool, std::size_t self, double p_mu, const TspInstance& inst,
                         Rng& rng, InverOverScratch& scratch) {
  Tour& t = pool[self];
  const std::size_t k = t.size();
  // With three cities every pair is adjacent: there is nothing to invert.
  if (k <= 3 || pool.size() < 2) return false;

  const Length parent_length = t.length();
  scratch.undo.clear();
  // Inversions may reverse the shorter complementary run instead, which
  // leaves the stored order running backwards; `flipped` tracks that.
  bool flipped = false;
  auto next_of = [&](City x) { return flipped ? t.predecessor(x) : t.successor(x); };

  City c = t.at(uniform_index(rng, k));
  for (std::size_t step = 0; step < k; ++step) {
    City target;
    if (uniform01(rng) < p_mu) {
      auto r = static_cast<City>(uniform_index(rng, k - 1));
      target = r >= c ? r + 1 : r;
    } else {
      auto other = uniform_index(rng, pool.size() - 1);
      if (other >= self) ++other;
      target = pool[other].successor(c);
    }
    if (t.successor(c) == target || t.predecessor(c) == target) break;
    const City next = next_of(c);
    std::size_t from = t.position(next);
    std::size_t to = t.position(target);
    if (flipped) std::swap(from, to);
    flipped ^= t.invert_either_side(from, to, inst);
    scratch.undo.emplace_back(from, to);
    c = target;
  }

  if (t.length() <= parent_length) {
    if (flipped) t.reverse_direction();
    return !scratch.undo.empty();
  }
  for (auto it = scratch.undo.rbegin(); it != scratch.undo.rend(); ++it) {
    t.invert_either_side(it->first, it->second, inst);
  }
  return false;
}

Tour inver_over_step(std::span<const Tour> pool, std::size_t parent_index, double p_mu, const TspInstance& inst,
                     Rng& rng) {
  if (pool.size() < 2) throw std::invalid_argument("inver-over needs a pool of at least two tours");
  if (parent_index >= pool.size()) throw std::out_of_range("parent index outside the pool");
  if (p_mu < 0.0 || p_mu > 1.0) throw std::invalid_argument("p_mu must lie in [0, 1]");
  std::vector<Tour> work(pool.begin(), pool.end());
  InverOverScratch scratch;
  inver_over_in_place(work, parent_index, p_mu, inst, rng, scratch);
  return std::move(work[parent_index]);
}

Tour mapping_transplant(const Tour& worse, const Tour& better, std::size_t start_pos, std::size_t count,
                        const TspInstance& inst) {
  const std::size_t k = worse.size();
  if (better.size() != k) throw std::invalid_argument("mapping needs tours of equal dimension");
  if (start_pos >= k || count == 0 || count > k) throw std::out_of_range("mapping segment out of range");

  const City anchor = worse.at(start_pos);
  const std::size_t better_start = better.position(anchor);

  std::vector<City> order(worse.order().begin(), worse.order().end());
  std::vector<City> replaced(count);
  // index_in_segment[c] = offset of city c inside the transplanted run, or -1.
  std::vector<std::int32_t> index_in_segment(k, -1);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t p = (start_pos + t) % k;
    const City incoming = better.at((better_start + t) % k);
    replaced[t] = order[p];
    order[p] = incoming;
    index_in_segment[static_cast<std::size_t>(incoming)] = static_cast<std::int32_t>(t);
  }
  // PMX repair: a city outside the run that now also appears inside it is
  // mapped through the run's position-wise correspondence until it is free.
  for (std::size_t t = count; t < k; ++t) {
    const std::size_t p = (start_pos + t) % k;
    City c = order[p];
    while (index_in_segment[static_cast<std::size_t>(c)] >= 0) {
      c = replaced[static_cast<std::size_t>(index_in_segment[static_cast<std::size_t>(c)])];
    }
    order[p] = c;
  }
  return Tour(std::move(order), inst);
}

Tour mapping_operator(const Tour& a, const Tour& b, const TspInstance& inst, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("mapping needs tours of equal dimension");
  const bool a_is_worse = a.length() > b.length();
  const Tour& worse = a_is_worse ? a : b;
  const Tour& better = a_is_worse ? b : a;
  const std::size_t k = worse.size();
  const std::size_t start = uniform_index(rng, k);
  const std::size_t count = 2 + uniform_index(rng, k - 2);
  return mapping_transplant(worse, better, start, count, inst);
}

void evolve_generation(Island& island, const TspInstance& inst, InverOverScratch& scratch) {
  const std::size_t n = island.tours.size();
  const Rates rates = current_rates(island.rates);
  for (std::size_t j = 0; j < n; ++j) {
    inver_over_in_place(island.tours, j, rates.mutation, inst, island.rng, scratch);
  }
  if (n >= 2 && mapping_permitted(island.velocity) && uniform01(island.rng) < rates.mapping) {
    const std::size_t a = uniform_index(island.rng, n);
    std::size_t b = uniform_index(island.rng, n - 1);
    if (b >= a) ++b;
    Tour child = mapping_operator(island.tours[a], island.tours[b], inst, island.rng);
    const std::size_t worse = island.tours[a].length() > island.tours[b].length() ? a : b;
    island.tours[worse] = std::move(child);
  }
  ++island.rates.generation;
  island.velocity.observe(island.best_length(), island.rates.generation);
}

void evolve_generation(Island& island, const TspInstance& inst) {
  InverOverScratch scratch;
  evolve_generation(island, inst, scratch);
}

}  // namespace dea
