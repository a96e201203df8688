#include "dea/diversity.hpp"

#include <cmath>
#include <stdexcept>

namespace dea {

double tour_difference(const Tour& x, const Tour& y) {
  if (x.size() != y.size()) throw std::invalid_argument("tours of different dimension");
  const std::size_t k = x.size();
  if (k == 0) return 0.0;
  const auto order = x.order();
  std::size_t same = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const City c = order[p];
    const City next = order[p + 1 == k ? 0 : p + 1];
    same += static_cast<std::size_t>(y.successor(c) == next);
  }
  return 1.0 - static_cast<double>(same) / static_cast<double>(k);
}

std::size_t best_tour_index(std::span<const Tour> tours) {
  if (tours.empty()) throw std::invalid_argument("no tours");
  std::size_t best = 0;
  for (std::size_t i = 1; i < tours.size(); ++i) {
    if (tours[i].length() < tours[best].length()) best = i;
  }
  return best;
}

DiversityReport subpop_diversity(std::span<const Tour> tours, std::size_t best_index, DiversityMeasure measure,
                                 std::int64_t round) {
  const std::size_t ni = tours.size();
  if (ni < 2) throw std::invalid_argument("diversity needs at least two individuals");
  if (best_index >= ni) throw std::out_of_range("best index outside the subpopulation");

  DiversityReport report;
  report.computed_at_round = round;
  report.per_individual.assign(ni, 0.0);

  if (measure == DiversityMeasure::BestBased) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      if (i == best_index) continue;
      const double diff = tour_difference(tours[best_index], tours[i]);
      report.per_individual[i] = diff;
      sum += diff;
    }
    report.d = sum / static_cast<double>(ni - 1);
    return report;
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = i + 1; j < ni; ++j) {
      const double diff = tour_difference(tours[i], tours[j]);
      report.per_individual[i] += diff;
      report.per_individual[j] += diff;
      sum += diff;
    }
  }
  for (auto& v : report.per_individual) v /= static_cast<double>(ni - 1);
  report.d = sum / (static_cast<double>(ni) * static_cast<double>(ni - 1) / 2.0);
  return report;
}

double success_probability(double d, const DiversityParams& params) {
  if (!(d >= 0.0 && d <= 1.0)) throw std::domain_error("diversity must lie in [0, 1]");
  if (!(params.alpha >= 0.0) || !(params.beta >= 0.0)) throw std::domain_error("alpha and beta must be non-negative");
  // std::pow(0, 0) == 1, which is the convention we want for both exponents.
  return std::pow(1.0 - std::pow(d, params.alpha), params.beta);
}

bool accept_migrants(double d, const DiversityParams& params, Rng& rng) {
  const double p = success_probability(d, params);
  return uniform01(rng) < p;
}

}  // namespace dea
