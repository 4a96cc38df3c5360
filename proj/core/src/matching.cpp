#include "harmony/matching.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace harmony {

bool Assignment::respects(std::span<const int> capacities) const {
  std::vector<int> load(capacities.size(), 0);
  for (auto r : room_of) {
    if (r >= capacities.size()) return false;
    load[r] += 1;
  }
  for (std::size_t r = 0; r < capacities.size(); ++r) {
    if (load[r] != capacities[r]) return false;
  }
  return true;
}

DemandGraph build_demand_graph(std::span<const PreferenceOracle> oracles,
                               std::span<const int> capacities, const PriceVector& p) {
  DemandGraph g;
  g.capacities.assign(capacities.begin(), capacities.end());
  g.price = p;
  g.edges.reserve(oracles.size());
  for (const auto& oracle : oracles) g.edges.push_back(oracle(p));
  return g;
}

DemandGraph union_graph(std::span<const DemandGraph> graphs) {
  if (graphs.empty()) throw InputError("union of zero graphs");
  DemandGraph g;
  g.capacities = graphs.front().capacities;
  g.edges.assign(graphs.front().agents(), RoomSet{});
  for (const auto& h : graphs) {
    if (h.agents() != g.agents() || h.capacities != g.capacities) {
      throw InputError("union graphs must share agents and rooms");
    }
    for (std::size_t i = 0; i < g.agents(); ++i) g.edges[i] |= h.edges[i];
  }
  return g;
}

std::int64_t capacity_of(std::span<const int> capacities, RoomSet rooms) {
  std::int64_t total = 0;
  for (auto r : rooms.members()) total += capacities[r];
  return total;
}

std::size_t neighborhood_size(const DemandGraph& graph, RoomSet rooms) {
  std::size_t count = 0;
  for (const auto& e : graph.edges) {
    if (e.intersects(rooms)) ++count;
  }
  return count;
}

bool in_k_t(const DemandGraph& graph, RoomSet rooms) {
  return static_cast<std::int64_t>(neighborhood_size(graph, rooms)) >=
         capacity_of(graph.capacities, rooms);
}

namespace {

class FlowSolver {
 public:
  explicit FlowSolver(const DemandGraph& g)
      : g_(g), room_of_(g.agents(), kNone), occupants_(g.rooms()) {}

  std::size_t run() {
    std::size_t flow = 0;
    for (std::size_t i = 0; i < g_.agents(); ++i) {
      visited_.assign(g_.rooms(), false);
      if (augment(i)) ++flow;
    }
    return flow;
  }

  const std::vector<std::size_t>& room_of() const { return room_of_; }

  /// Rooms reachable from the source in the residual network.
  RoomSet reachable_rooms() const {
    std::vector<bool> agent_seen(g_.agents(), false);
    RoomSet rooms_seen;
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < g_.agents(); ++i) {
      if (room_of_[i] == kNone) {
        agent_seen[i] = true;
        queue.push_back(i);
      }
    }
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      for (auto r : g_.edges[i].members()) {
        if (room_of_[i] == r || rooms_seen.contains(r)) continue;
        rooms_seen.insert(r);
        for (auto j : occupants_[r]) {
          if (!agent_seen[j]) {
            agent_seen[j] = true;
            queue.push_back(j);
          }
        }
      }
    }
    return rooms_seen;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool augment(std::size_t agent) {
    for (auto r : g_.edges[agent].members()) {
      if (visited_[r]) continue;
      visited_[r] = true;
      if (static_cast<int>(occupants_[r].size()) < g_.capacities[r]) {
        place(agent, r);
        return true;
      }
      for (std::size_t k = 0; k < occupants_[r].size(); ++k) {
        std::size_t other = occupants_[r][k];
        if (augment(other)) {
          // `other` moved elsewhere, which freed its slot in r.
          place(agent, r);
          return true;
        }
      }
    }
    return false;
  }

  void place(std::size_t agent, std::size_t room) {
    if (room_of_[agent] != kNone) {
      auto& old = occupants_[room_of_[agent]];
      std::erase(old, agent);
    }
    room_of_[agent] = room;
    auto& occ = occupants_[room];
    occ.insert(std::lower_bound(occ.begin(), occ.end(), agent), agent);
  }

  const DemandGraph& g_;
  std::vector<std::size_t> room_of_;
  std::vector<std::vector<std::size_t>> occupants_;
  std::vector<bool> visited_;
};

void require_balanced(const DemandGraph& graph) {
  std::int64_t total = std::accumulate(graph.capacities.begin(), graph.capacities.end(), std::int64_t{0});
  if (total != static_cast<std::int64_t>(graph.agents())) {
    throw InputError("capacities sum to " + std::to_string(total) + " but there are " +
                     std::to_string(graph.agents()) + " agents");
  }
  for (int c : graph.capacities) {
    if (c <= 0) throw InputError("capacities must be positive");
  }
}

}  // namespace

FlowWitness feasible_assignment(const DemandGraph& graph) {
  require_balanced(graph);
  FlowSolver solver(graph);
  FlowWitness w;
  w.flow = solver.run();
  if (w.flow == graph.agents()) {
    w.assignment = Assignment{solver.room_of()};
    return w;
  }
  w.violating = solver.reachable_rooms().complement(graph.rooms());
  w.deficiency = capacity_of(graph.capacities, w.violating) -
                 static_cast<std::int64_t>(neighborhood_size(graph, w.violating));
  return w;
}

std::int64_t deficiency(const DemandGraph& graph) {
  FlowWitness w = feasible_assignment(graph);
  return static_cast<std::int64_t>(graph.agents() - w.flow);
}

}  // namespace harmony
