#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dea/diversity.hpp"
#include "dea/random.hpp"

using namespace dea;

namespace {

TspInstance random_instance(std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Coord> coords;
  for (std::size_t i = 0; i < k; ++i) coords.push_back({uniform01(rng) * 100.0, uniform01(rng) * 100.0});
  return TspInstance("rand", Metric::Euc2D, coords);
}

// Explicit k x k connection matrix: m[l][c] = 1 iff c follows l.
std::vector<std::vector<int>> connection_matrix(const Tour& t) {
  const std::size_t k = t.size();
  std::vector<std::vector<int>> m(k, std::vector<int>(k, 0));
  for (std::size_t p = 0; p < k; ++p) {
    m[static_cast<std::size_t>(t.at(p))][static_cast<std::size_t>(t.at((p + 1) % k))] = 1;
  }
  return m;
}

double matrix_difference(const Tour& x, const Tour& y) {
  const auto a = connection_matrix(x);
  const auto b = connection_matrix(y);
  std::size_t equal_rows = 0;
  for (std::size_t l = 0; l < a.size(); ++l) equal_rows += a[l] == b[l] ? 1 : 0;
  return 1.0 - static_cast<double>(equal_rows) / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("tour difference examples") {
  const auto inst = random_instance(4, 1);
  const Tour x({0, 1, 2, 3}, inst);
  const Tour y({0, 2, 1, 3}, inst);
  CHECK(tour_difference(x, x) == 0.0);
  CHECK(tour_difference(x, y) == 0.75);
  CHECK(matrix_difference(x, y) == 0.75);
  const Tour rev({3, 2, 1, 0}, inst);
  CHECK(tour_difference(x, rev) == 1.0);
  CHECK(matrix_difference(x, rev) == 1.0);

  const auto inst5 = random_instance(5, 2);
  CHECK_THROWS_AS((void)tour_difference(x, Tour::identity(inst5)), std::invalid_argument);
}

TEST_CASE("best-based and pairwise diversity") {
  const auto inst = random_instance(4, 1);
  const Tour a({0, 1, 2, 3}, inst);
  const Tour b({0, 2, 1, 3}, inst);
  const Tour c({3, 2, 1, 0}, inst);
  const std::vector<Tour> three{a, b, c};
  const auto rep = subpop_diversity(three, 0, DiversityMeasure::BestBased, 7);
  CHECK(rep.d == 0.875);
  CHECK(rep.computed_at_round == 7);
  CHECK(rep.per_individual[0] == 0.0);

  const std::vector<Tour> same(4, a);
  CHECK(subpop_diversity(same, 0, DiversityMeasure::BestBased).d == 0.0);
  CHECK(subpop_diversity(same, 0, DiversityMeasure::Pairwise).d == 0.0);

  const std::vector<Tour> pair{a, b};
  CHECK(subpop_diversity(pair, 0, DiversityMeasure::BestBased).d ==
        subpop_diversity(pair, 0, DiversityMeasure::Pairwise).d);

  CHECK_THROWS_AS(subpop_diversity(std::span<const Tour>(three.data(), 1), 0, DiversityMeasure::BestBased),
                  std::invalid_argument);
}

TEST_CASE("best index prefers the lowest index on ties") {
  const auto inst = random_instance(6, 3);
  const Tour t = Tour::identity(inst);
  const std::vector<Tour> tours{t, t, t};
  CHECK(best_tour_index(tours) == 0);
}

TEST_CASE("fast diversity equals the connection-matrix oracle") {
  Rng rng(2024);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t k = 3 + uniform_index(rng, 6);
    const std::size_t ni = 2 + uniform_index(rng, 9);
    const auto inst = random_instance(k, rep);
    std::vector<Tour> tours;
    for (std::size_t i = 0; i < ni; ++i) tours.push_back(Tour::random(inst, rng));
    const auto best = best_tour_index(tours);

    double sum = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      if (i != best) sum += matrix_difference(tours[best], tours[i]);
    }
    CHECK(subpop_diversity(tours, best, DiversityMeasure::BestBased).d == sum / static_cast<double>(ni - 1));

    double pair_sum = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      for (std::size_t j = i + 1; j < ni; ++j) {
        const double d = matrix_difference(tours[i], tours[j]);
        pair_sum += d;
        CHECK(tour_difference(tours[i], tours[j]) == d);
        CHECK(tour_difference(tours[j], tours[i]) == d);
      }
    }
    const double pairs = static_cast<double>(ni) * static_cast<double>(ni - 1) / 2.0;
    CHECK(subpop_diversity(tours, best, DiversityMeasure::Pairwise).d == pair_sum / pairs);
  }
}

TEST_CASE("success probability examples") {
  CHECK(success_probability(1.0, {0.5, 2.0}) == 0.0);
  CHECK(success_probability(0.0, {0.5, 2.0}) == 1.0);
  CHECK(success_probability(0.0, {2.0, 0.5}) == 1.0);
  CHECK(success_probability(0.3, {1.0, 1.0}) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(success_probability(0.25, {0.5, 2.0}) == 0.25);
  CHECK_THROWS_AS((void)success_probability(-0.1, {}), std::domain_error);
  CHECK_THROWS_AS((void)success_probability(1.1, {}), std::domain_error);
  CHECK_THROWS_AS((void)success_probability(std::nan(""), {}), std::domain_error);
  CHECK_THROWS_AS((void)success_probability(0.5, {-1.0, 1.0}), std::domain_error);
}

TEST_CASE("success probability is non-increasing and matches the alpha = 1 form") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      double prev = 2.0;
      for (int i = 0; i <= 1000; ++i) {
        const double d = i / 1000.0;
        const double p = success_probability(d, {alpha, beta});
        REQUIRE(p <= prev);
        REQUIRE(p >= 0.0);
        REQUIRE(p <= 1.0);
        prev = p;
        if (alpha == 1.0) REQUIRE(p == std::pow(1.0 - d, beta));
      }
    }
  }
}

TEST_CASE("alpha = 0 makes the gate constant zero") {
  for (double d : {0.0, 0.2, 1.0}) CHECK(success_probability(d, {0.0, 1.0}) == 0.0);
  // beta = 0 forces p = 1 everywhere.
  for (double d : {0.0, 0.5, 1.0}) CHECK(success_probability(d, {0.5, 0.0}) == 1.0);
}

TEST_CASE("acceptance frequencies") {
  Rng rng(31337);
  for (int i = 0; i < 1000; ++i) {
    CHECK(accept_migrants(0.0, {1.0, 1.0}, rng));
    CHECK_FALSE(accept_migrants(1.0, {1.0, 1.0}, rng));
  }
  const int draws = 100000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) hits += accept_migrants(0.5, {1.0, 1.0}, rng) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(hits) / draws - 0.5) <= 0.01);
}
