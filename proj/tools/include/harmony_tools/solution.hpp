#pragma once

// Solution documents: a variant-independent record of a solver run that
// serializes to JSON deterministically and parses back losslessly.

#include <optional>
#include <string>
#include <vector>

#include "harmony/solver.hpp"
#include "harmony/variants.hpp"
#include "harmony_tools/problem.hpp"

namespace harmony::service {

struct SolutionDoc {
  Variant variant = Variant::rental;
  SolveStatus status = SolveStatus::failed;
  std::vector<RoomSpec> rooms;
  /// Agent names in problem order, followed by dummy agents for surplus.
  std::vector<std::string> agents;
  std::size_t dummy_agents = 0;
  /// Simplex coordinates for rental and cake, cube coordinates for exchange.
  std::vector<Rational> prices;
  std::vector<std::size_t> assignment;
  /// Exact solutions only: every agent's demand at the prices.
  std::vector<RoomSet> demand;

  struct Certificate {
    std::vector<std::vector<Rational>> vertices;
    /// Empty for a failed run's best cell.
    std::vector<std::size_t> witness;
    Rational squared_diameter = 0;
  };
  std::optional<Certificate> certificate;

  /// Settings of the run that produced the solution.
  std::int64_t mesh_start = 0;
  Rational epsilon = 0;
  int max_doublings = 0;
  std::size_t beam = 0;
  std::uint64_t seed = 0;
  bool offset = false;
  std::size_t vertex_budget = 0;
  SolverStats stats;

  std::size_t real_agents() const { return agents.size() - dummy_agents; }
};

/// Records the run settings (everything except the thread count, which does
/// not influence the result).
void record_config(SolutionDoc& doc, const SolverConfig& config);

SolutionDoc make_solution_doc(const ProblemSpec& spec, const BuiltProblem& built, const Solution& sol);
SolutionDoc make_solution_doc(const ProblemSpec& spec, const BuiltProblem& built, const ExchangeSolution& sol);

Json solution_to_json(const SolutionDoc& doc);
SolutionDoc parse_solution(const Json& json);

/// Text written by `solve --output`: two-space indented JSON and a newline.
std::string render(const Json& json);

/// Fixed-point decimal with at most 12 fractional digits, rounded half away
/// from zero, trailing zeros removed.
std::string decimal_string(const Rational& value, int digits = 12);

/// {"rational": "p/q", "decimal": "..."}.
Json rational_json(const Rational& value);

}  // namespace harmony::service
