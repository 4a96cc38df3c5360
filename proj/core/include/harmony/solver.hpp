#pragma once

// Mesh-refinement search for envy-free prices.
//
// The target predicate at a price p is max-flow feasibility of the demand
// graph at p. By Hall's theorem with capacities that is the conjunction of
// |A_T(p)| >= c(T) over all room subsets T, which under the free-room
// assumption reduces to the subsets of supp(p). A point with this property is
// guaranteed to exist, but not how to reach it, so the search returns either
// an exact point or a small cell whose vertices jointly support an
// assignment.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harmony/matching.hpp"
#include "harmony/oracle.hpp"
#include "harmony/simplex.hpp"

namespace harmony {

struct SolverProgress {
  std::size_t level = 0;
  std::int64_t mesh = 0;
  std::size_t cells = 0;
  std::size_t queries = 0;
};

struct SolverConfig {
  std::int64_t mesh_start = 8;
  /// Target cell diameter for approximate certificates.
  Rational epsilon = Rational(1, 1000);
  int max_doublings = 10;
  /// Number of best cells refined at each level.
  std::size_t beam = 32;
  std::uint64_t seed = 0;
  /// Lay the mesh on a seeded reweighting of the simplex.
  bool offset = false;
  /// Maximum number of distinct price vectors handed to the oracles.
  std::size_t vertex_budget = 400000;
  /// Before settling for a cell, look for an exact point with denominator up
  /// to this bound near the cell. 0 disables. Skipped for sequential oracles.
  std::int64_t snap_denominator = 1000;
  std::size_t snap_budget = 20000;
  /// Worker threads for vertex evaluation; 0 means hardware concurrency.
  unsigned threads = 0;
  /// Extra condition on certificate cells (vertices in frame coordinates);
  /// rejected cells keep being refined.
  std::function<bool(const std::vector<PriceVector>&)> accept_cell;
  std::function<void(const SolverProgress&)> on_progress;

  /// Throws InputError on out-of-range settings.
  void validate() const;
};

enum class SolveStatus { exact, eps, failed };

std::string to_string(SolveStatus status);

/// Cell-level evidence: agent i's room is demanded at vertices[witness[i]].
struct CellCertificate {
  std::vector<PriceVector> vertices;
  std::vector<std::size_t> witness;
  Rational squared_diameter = 0;
};

struct SolverStats {
  std::size_t oracle_queries = 0;
  std::size_t vertices_evaluated = 0;
  std::size_t cells_visited = 0;
  std::size_t levels = 0;
  std::int64_t final_mesh = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::failed;
  PriceVector prices;
  Assignment assignment;
  /// For exact solutions: the demand set of every agent at the prices.
  std::vector<RoomSet> demand;
  /// For eps solutions (and the best cell of a failed run).
  std::optional<CellCertificate> cell;
  SolverStats stats;
};

/// Throws InputError when the capacities do not sum to the number of agents,
/// and propagates OracleError from the oracles.
Solution solve_rental(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
                      const SolverConfig& config);

struct VerifyReport {
  bool ok = false;
  std::vector<std::size_t> offending_agents;
  std::string message;
};

/// Re-queries every oracle at the solution prices and checks that each agent's
/// room is in its demand set, and that the assignment fills every room exactly.
VerifyReport verify_envy_free(const Solution& solution, std::span<const PreferenceOracle> oracles,
                              std::span<const int> capacities);

/// Independent check of an eps certificate: the assignment fills the rooms,
/// every witness is a vertex of the reported cell, the oracle at the witness
/// demands the assigned room, the cell diameter is at most epsilon and the
/// prices are the cell's barycenter.
VerifyReport check_cell_certificate(const Solution& solution,
                                    std::span<const PreferenceOracle> oracles,
                                    std::span<const int> capacities, const Rational& epsilon);

/// Finds a member T of a balanced family with |A_T(p)| >= c(T). The covering
/// argument guarantees one exists whenever every agent demands some room; a
/// PropertyViolation is raised otherwise.
RoomSet claim2_probe(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
                     const BalancedFamily& family, const PriceVector& p);

}  // namespace harmony
