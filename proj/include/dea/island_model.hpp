#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dea/diversity.hpp"
#include "dea/ea_core.hpp"
#include "dea/tour.hpp"
#include "dea/tsplib.hpp"

namespace dea {

enum class Topology { Ring };

enum class MigrationMode {
  Classic,  ///< immigrants always enter
  Gated,    ///< immigrants enter with probability (1 - d^alpha)^beta
};

struct MigrationPolicy {
  Topology topology = Topology::Ring;
  std::int64_t interval = 1;  ///< generations between migration rounds
  std::size_t size = 1;       ///< emigrants per island per round
  MigrationMode mode = MigrationMode::Classic;
  DiversityParams diversity{};
  std::int64_t rounds = 2000;  ///< terminal criterion

  void validate() const;
};

/// Everything needed to execute one island-model run.
struct RunSettings {
  MigrationPolicy policy{};
  EaParams ea{};
  std::size_t islands = 16;
  std::size_t subpop = 100;
  std::uint64_t seed = 1;
  /// Threads used to evolve islands between barriers. Results do not depend on it.
  unsigned workers = 1;
};

struct IslandRoundRecord {
  double diversity = 0.0;
  double probability = 1.0;
  bool accepted = true;

  friend bool operator==(const IslandRoundRecord&, const IslandRoundRecord&) = default;
};

struct RoundRecord {
  std::int64_t round = 0;
  Length best_so_far = 0;
  std::vector<IslandRoundRecord> islands;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RunResult {
  Tour best_tour;
  Length best_length = 0;
  std::vector<RoundRecord> rounds;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Unidirectional ring: island -> (island + 1) mod n. Throws for n < 2.
std::size_t ring_target(std::size_t island, std::size_t n);

/// s distinct residents chosen uniformly at random, returned as copies.
std::vector<Tour> select_emigrants(const Island& island, std::size_t s, Rng& rng);

/// Each migrant overwrites a distinct, uniformly chosen resident.
void replace_with_immigrants(Island& island, std::span<const Tour> migrants, Rng& rng);

/// One synchronous migration round over the ring.
///
/// Every island sends `policy.size` random emigrants to its ring target. Each
/// receiver then measures its diversity over residents only, draws one r in
/// [0, 1) and inserts the whole inbox when r < p. Classic mode draws the same
/// numbers and ignores the gate, so both modes consume identical streams.
/// Throws std::logic_error if islands are at different generations.
std::vector<IslandRoundRecord> migration_round(std::span<Island> islands, const MigrationPolicy& policy,
                                               std::int64_t round = -1);

/// Runs `policy.rounds` rounds of [interval generations on every island,
/// then migration] and reports the global best and per-round traces.
RunResult run_dea(const TspInstance& inst, const RunSettings& settings);

struct CostModelInputs {
  double dt_evolution = 0.0;        ///< all evolutionary operations of one generation
  double dt_diversity = 0.0;        ///< one diversity computation
  double dt_migration = 0.0;        ///< one migration round with the gate
  double dt_migration_classic = 0.0;  ///< one migration round without it
  double interval = 1.0;
  double generations = 0.0;
};

struct CostModelOutput {
  double t_gated = 0.0;    ///< (dt_e + (dt_d + dt_m) / i) g
  double t_classic = 0.0;  ///< (dt_e + dt_m' / i) g
  double delta = 0.0;      ///< (dt_d + dt_m - dt_m') / i * g
};

CostModelOutput overhead_model(const CostModelInputs& c);

}  // namespace dea
