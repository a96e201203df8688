#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dea/random.hpp"
#include "dea/tour.hpp"
#include "dea/tsplib.hpp"

namespace dea {

/// Improvement-rate bookkeeping for one subpopulation.
///
/// `best` is the best length seen, `previous_best` the distinct best before
/// it, and `delta_generations` the number of generations between the two.
/// Until the first improvement there is no previous best and the velocity is
/// infinite, which keeps the mapping operator switched off.
struct VelocityState {
  Length best = 0;
  Length previous_best = 0;
  std::int64_t delta_generations = 0;
  std::int64_t best_generation = 0;
  bool has_velocity = false;
  double threshold = 5000.0;

  static VelocityState start(Length initial_best, double threshold);

  /// Records the island best at the end of `generation`; only a strict
  /// improvement changes the state.
  void observe(Length island_best, std::int64_t generation);
};

/// |best - previous_best| / delta_generations, or +inf before the first
/// improvement. Throws std::domain_error if a velocity exists with delta 0.
double evolutionary_velocity(const VelocityState& st);

/// Mapping runs only while the velocity is strictly below the threshold.
bool mapping_permitted(const VelocityState& st);

/// Linear mutation/mapping schedules over a fixed generation horizon.
struct RateSchedule {
  double p_mu0 = 0.02;
  double p_ma0 = 0.05;
  std::int64_t horizon = 1;  ///< maximal generations g
  std::int64_t generation = 0;
};

struct Rates {
  double mutation = 0.0;
  double mapping = 0.0;
};

/// p_mu = p_mu0 (1 - g_n/g * 0.5), p_ma = p_ma0 (2 g_n/g + 1); g_n is clamped to [0, g].
Rates current_rates(const RateSchedule& rs);

struct EaParams {
  double p_mu0 = 0.02;
  double p_ma0 = 0.05;
  double velocity_threshold = 5000.0;
};

/// One subpopulation with everything it needs to evolve on its own.
struct Island {
  std::size_t id = 0;
  std::vector<Tour> tours;
  Rng rng;
  RateSchedule rates;
  VelocityState velocity;
  std::vector<Tour> inbox;

  std::size_t best_index() const;
  Length best_length() const { return tours[best_index()].length(); }
};

/// Creates an island of `size` uniformly random tours.
Island make_island(std::size_t id, const TspInstance& inst, std::size_t size, const EaParams& ea,
                   std::int64_t horizon, std::uint64_t seed);

/// Reusable buffers for the in-place inver-over loop.
struct InverOverScratch {
  std::vector<std::pair<std::size_t, std::size_t>> undo;
};

/// Inver-over applied in place to pool[self]. Guided steps read successors
/// from other pool members, blind steps (probability p_mu) pick a random city.
/// At most k inversions are made. The result is kept when its length is not
/// worse than the parent's, otherwise all inversions are undone.
/// Returns true when the tour changed.
bool inver_over_in_place(std::span<Tour> pool, std::size_t self, double p_mu, const TspInstance& inst,
                         Rng& rng, InverOverScratch& scratch);

/// Value-returning inver-over: the offspring if accepted, else the parent.
/// `pool` must hold at least 2 tours and `parent_index` names the parent
/// within it; guided steps never read the parent itself.
Tour inver_over_step(std::span<const Tour> pool, std::size_t parent_index, double p_mu,
                     const TspInstance& inst, Rng& rng);

/// Segment transplant from the better of two tours into the worse one with
/// PMX repair. Ties make `b` the worse tour. Returns the repaired copy of the
/// worse tour.
Tour mapping_operator(const Tour& a, const Tour& b, const TspInstance& inst, Rng& rng);

/// Deterministic core of mapping_operator: transplant the `count` cities
/// starting at `start_pos` of `worse` with the same-size run of `better`
/// that begins at the same city.
Tour mapping_transplant(const Tour& worse, const Tour& better, std::size_t start_pos, std::size_t count,
                        const TspInstance& inst);

/// One generation: inver-over for every individual, then at most one mapping
/// (probability p_ma, only when the velocity gate is open), then velocity and
/// generation bookkeeping.
void evolve_generation(Island& island, const TspInstance& inst, InverOverScratch& scratch);
void evolve_generation(Island& island, const TspInstance& inst);

}  // namespace dea
