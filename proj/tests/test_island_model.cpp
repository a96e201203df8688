#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <stdexcept>
#include <vector>

#include "dea/island_model.hpp"
#include "dea/random.hpp"

using namespace dea;

namespace {

TspInstance random_instance(std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Coord> coords;
  for (std::size_t i = 0; i < k; ++i) coords.push_back({uniform01(rng) * 1000.0, uniform01(rng) * 1000.0});
  return TspInstance("rand" + std::to_string(k), Metric::Euc2D, coords);
}

std::vector<Island> make_islands(const TspInstance& inst, std::size_t n, std::size_t ni, std::uint64_t seed) {
  std::vector<Island> islands;
  for (std::size_t i = 0; i < n; ++i) islands.push_back(make_island(i, inst, ni, EaParams{}, 1000, seed + i));
  return islands;
}

RunSettings small_settings(MigrationMode mode, double alpha, double beta) {
  RunSettings s;
  s.policy.interval = 20;
  s.policy.rounds = 10;
  s.policy.mode = mode;
  s.policy.diversity = {alpha, beta, DiversityMeasure::BestBased};
  s.islands = 4;
  s.subpop = 10;
  s.seed = 42;
  return s;
}

}  // namespace

TEST_CASE("ring target") {
  CHECK(ring_target(3, 4) == 0);
  CHECK(ring_target(0, 16) == 1);
  CHECK(ring_target(0, 2) == 1);
  CHECK(ring_target(1, 2) == 0);
  CHECK_THROWS_AS((void)ring_target(0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)ring_target(4, 4), std::out_of_range);
}

TEST_CASE("emigrant selection") {
  const auto inst = random_instance(12, 1);
  auto island = make_island(0, inst, 10, EaParams{}, 10, 9);
  const auto before = island.tours;
  Rng rng(4);

  const auto all = select_emigrants(island, 10, rng);
  CHECK(all.size() == 10);
  for (const auto& t : before) CHECK(std::count(all.begin(), all.end(), t) == std::count(before.begin(), before.end(), t));
  CHECK(island.tours == before);
  CHECK_THROWS_AS(select_emigrants(island, 11, rng), std::invalid_argument);

  // Mark each resident by position so picks can be counted.
  std::vector<Tour> distinct;
  for (std::size_t i = 0; i < 10; ++i) {
    std::vector<City> order(12);
    for (std::size_t c = 0; c < 12; ++c) order[c] = static_cast<City>((c + i) % 12);
    distinct.emplace_back(order, inst);
  }
  island.tours = distinct;
  const int trials = 100000;
  std::vector<int> freq(10, 0);
  for (int t = 0; t < trials; ++t) {
    const auto pick = select_emigrants(island, 1, rng);
    const auto idx = static_cast<std::size_t>(std::find(distinct.begin(), distinct.end(), pick[0]) - distinct.begin());
    ++freq[idx];
  }
  const double p = 0.1;
  const double sigma = std::sqrt(trials * p * (1 - p));
  for (int f : freq) CHECK(std::abs(f - trials * p) <= 3.0 * sigma);
}

TEST_CASE("immigrant replacement") {
  const auto inst = random_instance(12, 2);
  auto island = make_island(0, inst, 6, EaParams{}, 10, 1);
  Rng rng(5);
  const auto before = island.tours;
  replace_with_immigrants(island, {}, rng);
  CHECK(island.tours == before);

  const auto migrant = Tour::identity(inst);
  const std::vector<Tour> two{migrant, migrant};
  replace_with_immigrants(island, two, rng);
  CHECK(island.tours.size() == 6);
  CHECK(std::count(island.tours.begin(), island.tours.end(), migrant) >= 2);

  auto single = make_island(1, inst, 1, EaParams{}, 10, 2);
  replace_with_immigrants(single, std::vector<Tour>{migrant}, rng);
  REQUIRE(single.tours.size() == 1);
  CHECK(single.tours[0] == migrant);
}

TEST_CASE("converged islands always accept") {
  const auto inst = random_instance(20, 3);
  auto islands = make_islands(inst, 4, 8, 100);
  const auto t = islands[0].tours[0];
  for (auto& isl : islands) std::fill(isl.tours.begin(), isl.tours.end(), t);
  MigrationPolicy policy;
  policy.mode = MigrationMode::Gated;
  policy.diversity = {1.0, 1.0, DiversityMeasure::BestBased};
  for (int r = 0; r < 20; ++r) {
    for (const auto& rec : migration_round(islands, policy, r)) {
      CHECK(rec.diversity == 0.0);
      CHECK(rec.probability == 1.0);
      CHECK(rec.accepted);
    }
  }
}

TEST_CASE("fresh random populations almost never accept") {
  const auto inst = random_instance(100, 4);
  auto islands = make_islands(inst, 4, 20, 200);
  MigrationPolicy policy;
  policy.mode = MigrationMode::Gated;
  policy.diversity = {1.0, 1.0, DiversityMeasure::BestBased};
  int accepted = 0;
  int total = 0;
  for (int r = 0; r < 100; ++r) {
    for (const auto& rec : migration_round(islands, policy, r)) {
      CHECK(rec.diversity >= 0.0);
      CHECK(rec.diversity <= 1.0);
      accepted += rec.accepted ? 1 : 0;
      ++total;
    }
  }
  CHECK(static_cast<double>(accepted) / total < 0.05);
}

TEST_CASE("classic rounds accept everything and conserve the population") {
  const auto inst = random_instance(30, 5);
  auto islands = make_islands(inst, 5, 7, 300);
  MigrationPolicy policy;
  policy.mode = MigrationMode::Classic;
  policy.size = 3;
  for (int r = 0; r < 30; ++r) {
    for (const auto& rec : migration_round(islands, policy, r)) CHECK(rec.accepted);
    std::size_t total = 0;
    for (const auto& isl : islands) {
      total += isl.tours.size();
      CHECK(isl.inbox.empty());
    }
    CHECK(total == 35);
  }
  policy.mode = MigrationMode::Gated;
  for (int r = 0; r < 30; ++r) {
    migration_round(islands, policy, r);
    for (const auto& isl : islands) CHECK(isl.tours.size() == 7);
  }
}

TEST_CASE("migration requires synchronized islands") {
  const auto inst = random_instance(15, 6);
  auto islands = make_islands(inst, 3, 5, 1);
  evolve_generation(islands[1], inst);
  CHECK_THROWS_AS(migration_round(islands, MigrationPolicy{}), std::logic_error);
}

TEST_CASE("empirical acceptance at fixed diversity matches the gate") {
  // Three identical tours plus one reversal in each island: d = 1/3.
  const auto inst = random_instance(10, 7);
  Rng rng(8);
  const auto t = Tour::random(inst, rng);
  std::vector<City> rev(t.order().rbegin(), t.order().rend());
  const Tour r(rev, inst);
  std::vector<Island> islands = make_islands(inst, 2, 4, 11);
  for (auto& isl : islands) isl.tours = {t, t, t, r};
  MigrationPolicy policy;
  policy.mode = MigrationMode::Gated;
  policy.diversity = {1.0, 2.0, DiversityMeasure::BestBased};
  policy.size = 1;
  const int rounds = 20000;
  int accepted = 0;
  for (int i = 0; i < rounds; ++i) {
    for (auto& isl : islands) isl.tours = {t, t, t, r};
    const auto recs = migration_round(islands, policy, i);
    REQUIRE(recs[0].diversity == doctest::Approx(1.0 / 3.0));
    accepted += recs[0].accepted ? 1 : 0;
  }
  const double p = success_probability(1.0 / 3.0, policy.diversity);
  const double sigma = std::sqrt(p * (1 - p) / rounds);
  CHECK(std::abs(static_cast<double>(accepted) / rounds - p) <= 3.0 * sigma);
}

TEST_CASE("run_dea is deterministic and its best-so-far never rises") {
  const auto inst = random_instance(30, 10);
  auto s = small_settings(MigrationMode::Gated, 0.5, 1.0);
  const auto a = run_dea(inst, s);
  const auto b = run_dea(inst, s);
  CHECK(a == b);
  CHECK(a.rounds.size() == 10);
  CHECK(a.best_length == cycle_length(a.best_tour, inst));
  Length prev = a.rounds.front().best_so_far;
  for (const auto& r : a.rounds) {
    CHECK(r.best_so_far <= prev);
    prev = r.best_so_far;
    for (const auto& rec : r.islands) {
      CHECK(rec.diversity >= 0.0);
      CHECK(rec.diversity <= 1.0);
    }
  }
  CHECK(a.rounds.back().best_so_far == a.best_length);

  s.workers = 3;
  CHECK(run_dea(inst, s) == a);
}

TEST_CASE("classic equals gated with the gate forced open") {
  const auto inst = random_instance(30, 11);
  const auto classic = run_dea(inst, small_settings(MigrationMode::Classic, 0.5, 1.0));
  const auto forced = run_dea(inst, small_settings(MigrationMode::Gated, 0.5, 0.0));
  CHECK(classic == forced);
  const auto gated = run_dea(inst, small_settings(MigrationMode::Gated, 0.5, 1.0));
  CHECK_FALSE(classic == gated);
}

TEST_CASE("run settings are validated") {
  const auto inst = random_instance(10, 12);
  auto s = small_settings(MigrationMode::Classic, 1, 1);
  s.islands = 1;
  CHECK_THROWS_AS(run_dea(inst, s), std::invalid_argument);
  s = small_settings(MigrationMode::Classic, 1, 1);
  s.policy.interval = 0;
  CHECK_THROWS_AS(run_dea(inst, s), std::invalid_argument);
  s = small_settings(MigrationMode::Classic, 1, 1);
  s.policy.size = 11;
  CHECK_THROWS_AS(run_dea(inst, s), std::invalid_argument);
}

TEST_CASE("overhead model") {
  const auto out = overhead_model({1, 10, 2, 2, 100, 1000});
  CHECK(out.t_gated == doctest::Approx(1120.0).epsilon(1e-12));
  CHECK(out.t_classic == doctest::Approx(1020.0).epsilon(1e-12));
  CHECK(out.delta == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(overhead_model({3, 0, 2, 2, 7, 500}).delta == 0.0);

  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const CostModelInputs c{uniform01(rng) * 5, uniform01(rng) * 50, uniform01(rng) * 3, uniform01(rng) * 3,
                            1.0 + static_cast<double>(uniform_index(rng, 10000)), uniform01(rng) * 1e6};
    const auto o = overhead_model(c);
    CHECK(o.delta == o.t_gated - o.t_classic);
    const double closed = (c.dt_diversity + c.dt_migration - c.dt_migration_classic) / c.interval * c.generations;
    CHECK(o.delta == doctest::Approx(closed).epsilon(1e-9).scale(o.t_gated));
  }
}
