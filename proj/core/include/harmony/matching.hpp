#pragma once

// Bipartite demand graphs between agents and capacitated rooms, Hall's
// condition with capacities, and max-flow feasibility with certificates.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "harmony/oracle.hpp"
#include "harmony/room_set.hpp"
#include "harmony/simplex.hpp"

namespace harmony {

/// Agent i is joined to room r iff r is in edges[i].
struct DemandGraph {
  std::vector<int> capacities;
  std::vector<RoomSet> edges;
  /// The price the graph was built at; absent for union graphs over a cell.
  std::optional<PriceVector> price;

  std::size_t agents() const { return edges.size(); }
  std::size_t rooms() const { return capacities.size(); }
};

/// f: agents -> rooms.
struct Assignment {
  std::vector<std::size_t> room_of;

  /// Every agent has a room and |f^-1(r)| == c[r] for every room.
  bool respects(std::span<const int> capacities) const;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Result of the max-flow computation. When the flow saturates every agent an
/// assignment is returned; otherwise `violating` is a room set T whose total
/// capacity exceeds its demand neighborhood by `deficiency` > 0.
struct FlowWitness {
  std::size_t flow = 0;
  std::optional<Assignment> assignment;
  RoomSet violating;
  std::int64_t deficiency = 0;

  bool feasible() const { return assignment.has_value(); }
};

DemandGraph build_demand_graph(std::span<const PreferenceOracle> oracles,
                               std::span<const int> capacities, const PriceVector& p);

/// Graph whose edge sets are the unions of the per-agent demand sets.
DemandGraph union_graph(std::span<const DemandGraph> graphs);

/// Sum of capacities over T.
std::int64_t capacity_of(std::span<const int> capacities, RoomSet rooms);

/// |A_T|: agents with at least one edge into T.
std::size_t neighborhood_size(const DemandGraph& graph, RoomSet rooms);

/// |A_T| >= sum of c[r] over T.
bool in_k_t(const DemandGraph& graph, RoomSet rooms);

/// Augmenting-path maximum flow on source -> agents (1) -> rooms (c[r]) -> sink.
/// Agents and rooms are scanned in ascending order, so the result is
/// deterministic. Throws InputError unless the capacities sum to the number of
/// agents.
FlowWitness feasible_assignment(const DemandGraph& graph);

/// n - maxflow; zero iff a full assignment exists.
std::int64_t deficiency(const DemandGraph& graph);

}  // namespace harmony
