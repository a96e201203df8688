#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dea/random.hpp"
#include "dea/tour.hpp"

namespace dea {

enum class DiversityMeasure {
  BestBased,  ///< mean difference between the best tour and each other tour
  Pairwise,   ///< mean difference over all unordered pairs
};

struct DiversityParams {
  double alpha = 1.0;
  double beta = 1.0;
  DiversityMeasure measure = DiversityMeasure::BestBased;
};

struct DiversityReport {
  double d = 0.0;
  /// BestBased: D(best, i), zero at the best itself. Pairwise: the mean
  /// difference of i to every other member.
  std::vector<double> per_individual;
  std::int64_t computed_at_round = -1;
};

/// 1 - k'/k where k' counts cities whose directed successor agrees in both
/// tours. This equals the fraction of differing rows of the two 0/1
/// connection matrices. Throws std::invalid_argument on a size mismatch.
double tour_difference(const Tour& x, const Tour& y);

/// Index of the shortest tour, lowest index on ties. Throws on an empty span.
std::size_t best_tour_index(std::span<const Tour> tours);

/// Subpopulation diversity in [0, 1]. Needs at least two tours.
DiversityReport subpop_diversity(std::span<const Tour> tours, std::size_t best_index, DiversityMeasure measure,
                                 std::int64_t round = -1);

/// Migration success probability p = (1 - d^alpha)^beta, with 0^0 taken as 1.
/// Throws std::domain_error when d is outside [0, 1] or a parameter is negative.
double success_probability(double d, const DiversityParams& params);

/// Draws r uniformly from [0, 1) and returns r < p.
bool accept_migrants(double d, const DiversityParams& params, Rng& rng);

}  // namespace dea
