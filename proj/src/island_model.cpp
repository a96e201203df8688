#include "dea/island_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace dea {

namespace {

std::vector<std::size_t> distinct_indices(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
  }
  idx.resize(count);
  return idx;
}

void evolve_islands(std::span<Island> islands, const TspInstance& inst, std::int64_t generations,
                    unsigned workers) {
  auto work = [&](std::size_t first, std::size_t stride) {
    InverOverScratch scratch;
    for (std::size_t i = first; i < islands.size(); i += stride) {
      for (std::int64_t g = 0; g < generations; ++g) evolve_generation(islands[i], inst, scratch);
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), islands.size());
  if (threads <= 1) {
    work(0, 1);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
}

}  // namespace

void MigrationPolicy::validate() const {
  if (interval < 1) throw std::invalid_argument("migration interval must be at least 1");
  if (size < 1) throw std::invalid_argument("migration size must be at least 1");
  if (rounds < 1) throw std::invalid_argument("at least one migration round is required");
  if (!(diversity.alpha >= 0.0) || !(diversity.beta >= 0.0)) {
    throw std::invalid_argument("alpha and beta must be non-negative");
  }
}

std::size_t ring_target(std::size_t island, std::size_t n) {
  if (n < 2) throw std::invalid_argument("a ring needs at least two islands");
  if (island >= n) throw std::out_of_range("island index out of range");
  return (island + 1) % n;
}

std::vector<Tour> select_emigrants(const Island& island, std::size_t s, Rng& rng) {
  const std::size_t ni = island.tours.size();
  if (s > ni) throw std::invalid_argument("cannot select " + std::to_string(s) + " emigrants from " + std::to_string(ni));
  std::vector<Tour> out;
  out.reserve(s);
  for (auto i : distinct_indices(ni, s, rng)) out.push_back(island.tours[i]);
  return out;
}

void replace_with_immigrants(Island& island, std::span<const Tour> migrants, Rng& rng) {
  const std::size_t ni = island.tours.size();
  if (migrants.size() > ni) throw std::invalid_argument("more immigrants than residents");
  if (migrants.empty()) return;
  const auto slots = distinct_indices(ni, migrants.size(), rng);
  for (std::size_t m = 0; m < migrants.size(); ++m) island.tours[slots[m]] = migrants[m];
}

std::vector<IslandRoundRecord> migration_round(std::span<Island> islands, const MigrationPolicy& policy,
                                               std::int64_t round) {
  const std::size_t n = islands.size();
  if (n < 2) throw std::invalid_argument("migration needs at least two islands");
  for (const auto& island : islands) {
    if (island.rates.generation != islands.front().rates.generation) {
      throw std::logic_error("migration round reached with unsynchronized islands");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto emigrants = select_emigrants(islands[i], policy.size, islands[i].rng);
    auto& inbox = islands[ring_target(i, n)].inbox;
    for (auto& t : emigrants) inbox.push_back(std::move(t));
  }

  std::vector<IslandRoundRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    Island& island = islands[i];
    auto& rec = records[i];
    if (island.tours.size() >= 2) {
      rec.diversity =
          subpop_diversity(island.tours, island.best_index(), policy.diversity.measure, round).d;
    }
    const double r = uniform01(island.rng);
    if (policy.mode == MigrationMode::Gated) {
      rec.probability = success_probability(rec.diversity, policy.diversity);
      rec.accepted = r < rec.probability;
    } else {
      rec.probability = 1.0;
      rec.accepted = true;
    }
    if (rec.accepted) replace_with_immigrants(island, island.inbox, island.rng);
    island.inbox.clear();
  }
  return records;
}

RunResult run_dea(const TspInstance& inst, const RunSettings& settings) {
  const auto& policy = settings.policy;
  policy.validate();
  if (settings.islands < 2) throw std::invalid_argument("at least two islands are required");
  if (settings.subpop < 2) throw std::invalid_argument("subpopulations need at least two individuals");
  if (policy.size > settings.subpop) throw std::invalid_argument("migration size exceeds subpopulation size");

  const std::int64_t horizon = policy.interval * policy.rounds;
  std::vector<Island> islands;
  islands.reserve(settings.islands);
  for (std::size_t i = 0; i < settings.islands; ++i) {
    islands.push_back(make_island(i, inst, settings.subpop, settings.ea, horizon, derive_seed(settings.seed, i + 1)));
  }

  RunResult result;
  auto track_best = [&] {
    for (const auto& island : islands) {
      const auto& t = island.tours[island.best_index()];
      if (result.best_tour.size() == 0 || t.length() < result.best_length) {
        result.best_tour = t;
        result.best_length = t.length();
      }
    }
  };
  track_best();

  result.rounds.reserve(static_cast<std::size_t>(policy.rounds));
  for (std::int64_t round = 1; round <= policy.rounds; ++round) {
    evolve_islands(islands, inst, policy.interval, settings.workers);
    track_best();
    auto records = migration_round(islands, policy, round);
    result.rounds.push_back(RoundRecord{round, result.best_length, std::move(records)});
  }
  return result;
}

CostModelOutput overhead_model(const CostModelInputs& c) {
  if (c.interval < 1.0) throw std::invalid_argument("interval must be at least 1");
  if (c.generations < 0.0) throw std::invalid_argument("generations must be non-negative");
  CostModelOutput out;
  out.t_gated = (c.dt_evolution + (c.dt_diversity + c.dt_migration) / c.interval) * c.generations;
  out.t_classic = (c.dt_evolution + c.dt_migration_classic / c.interval) * c.generations;
  // Equals (dt_d + dt_m - dt_m') / i * g up to rounding.
  out.delta = out.t_gated - out.t_classic;
  return out;
}

}  // namespace dea
