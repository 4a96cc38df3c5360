#pragma once

// Reductions of cake/chore division and of the discrete exchange economy to
// the rental problem. Each wraps the agents' oracles so that the transformed
// preferences like free rooms, solves, and maps the answer back.

#include <optional>
#include <span>
#include <vector>

#include "harmony/oracle.hpp"
#include "harmony/solver.hpp"

namespace harmony {

/// Agents whose demand never contains an empty piece (L(p) within supp(p)).
struct CakeProblem {
  std::vector<PreferenceOracle> oracles;
  std::vector<int> capacities;
};

/// Agents over [0,1]^R who never demand a room priced 1, and demand something
/// unless every price is 1.
struct ExchangeProblem {
  std::vector<CubeOracle> oracles;
  std::vector<int> capacities;
};

/// Piecewise transform through the cake embedding phi:
///   q interior to phi(Delta):  L*(phi^-1(q))
///   q on its boundary:         L*(phi^-1(q)) U cheap(q)
///   q outside:                 cheap(q)
/// where cheap(q) = {r : q[r] <= 1/|R|}.
PreferenceOracle cake_transform(const PreferenceOracle& inner);

/// Result of solve_cake, in the original cake coordinates. For eps status
/// the certificate cell has been mapped back through phi^-1.
Solution solve_cake(const CakeProblem& problem, const SolverConfig& config);

/// q -> L(psi^-1(q)), turning an exchange oracle into a simplex oracle that
/// never demands an empty piece.
PreferenceOracle exchange_transform(const CubeOracle& inner);

struct ExchangeCell {
  std::vector<CubePoint> vertices;
  std::vector<std::size_t> witness;
};

struct ExchangeSolution {
  SolveStatus status = SolveStatus::failed;
  CubePoint prices;
  Assignment assignment;
  std::vector<RoomSet> demand;
  std::optional<ExchangeCell> cell;
  /// Simplex-side solution the prices were mapped from.
  Solution simplex_solution;
};

ExchangeSolution solve_exchange(const ExchangeProblem& problem, const SolverConfig& config);

/// Exact check against the original cube oracles: every assigned room is
/// demanded at the prices, none is priced 1, and some price is 0.
VerifyReport verify_exchange(const ExchangeSolution& solution, std::span<const CubeOracle> oracles,
                             std::span<const int> capacities);

/// Certificate check for eps exchange solutions against the cube oracles.
VerifyReport check_exchange_certificate(const ExchangeSolution& solution,
                                        std::span<const CubeOracle> oracles,
                                        std::span<const int> capacities);

}  // namespace harmony
