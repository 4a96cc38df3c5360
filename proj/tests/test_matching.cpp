#include <gtest/gtest.h>

#include <random>

#include "harmony/matching.hpp"
#include "support.hpp"

using namespace harmony;
using harmony::testing::all_assignments;
using harmony::testing::brute_feasible;
using harmony::testing::brute_hall;
using harmony::testing::rat;

namespace {

const RoomSet A{0}, B{1};

DemandGraph graph(std::vector<RoomSet> edges, std::vector<int> caps) {
  DemandGraph g;
  g.edges = std::move(edges);
  g.capacities = std::move(caps);
  return g;
}

void expect_consistent(const DemandGraph& g) {
  auto w = feasible_assignment(g);
  ASSERT_EQ(w.feasible(), brute_feasible(g.edges, g.capacities));
  ASSERT_EQ(w.feasible(), brute_hall(g.edges, g.capacities));
  if (w.feasible()) {
    EXPECT_TRUE(w.assignment->respects(g.capacities));
    for (std::size_t i = 0; i < g.agents(); ++i) EXPECT_TRUE(g.edges[i].contains(w.assignment->room_of[i]));
    EXPECT_EQ(deficiency(g), 0);
  } else {
    EXPECT_GT(w.deficiency, 0);
    EXPECT_FALSE(in_k_t(g, w.violating));
    EXPECT_EQ(w.deficiency, static_cast<std::int64_t>(g.agents() - w.flow));
  }
}

}  // namespace

TEST(DemandGraph, BuiltFromOracles) {
  std::vector<PreferenceOracle> os{quasilinear_oracle("1", {rat(9, 10), rat(1, 10)}, {1, 1}),
                                   quasilinear_oracle("2", {rat(2, 10), rat(8, 10)}, {1, 1})};
  std::vector<int> caps{1, 1};
  auto g = build_demand_graph(os, caps, PriceVector({1, 1}, 2));
  EXPECT_EQ(g.edges, (std::vector<RoomSet>{A, B}));
  std::vector<PreferenceOracle> closed{free_room_closure(os[0]), free_room_closure(os[1])};
  auto h = build_demand_graph(closed, caps, PriceVector({1, 0}, 1));
  for (const auto& e : h.edges) EXPECT_TRUE(e.contains(1));
}

TEST(DemandGraph, UnionOverVertices) {
  std::vector<DemandGraph> gs{graph({A, B}, {1, 1}), graph({B, B}, {1, 1})};
  EXPECT_EQ(union_graph(gs).edges, (std::vector<RoomSet>{RoomSet{0, 1}, B}));
}

TEST(Hall, NeighborhoodAndKT) {
  auto g = graph({A, B}, {1, 1});
  EXPECT_EQ(neighborhood_size(g, A), 1u);
  EXPECT_EQ(neighborhood_size(g, RoomSet{}), 0u);
  auto complete = graph({RoomSet{0, 1}, RoomSet{0, 1}, RoomSet{0, 1}}, {2, 1});
  EXPECT_EQ(neighborhood_size(complete, B), 3u);
  EXPECT_TRUE(in_k_t(graph({A, A, A}, {2, 1}), A));
  EXPECT_TRUE(in_k_t(g, RoomSet{}));
  EXPECT_FALSE(in_k_t(graph({A, A}, {1, 1}), B));
}

TEST(FeasibleAssignment, Examples) {
  auto w = feasible_assignment(graph({A, B}, {1, 1}));
  ASSERT_TRUE(w.feasible());
  EXPECT_EQ(w.assignment->room_of, (std::vector<std::size_t>{0, 1}));

  auto both_a = feasible_assignment(graph({A, A}, {1, 1}));
  EXPECT_FALSE(both_a.feasible());
  EXPECT_EQ(both_a.flow, 1u);
  EXPECT_EQ(both_a.violating, B);
  EXPECT_EQ(both_a.deficiency, 1);

  auto three = feasible_assignment(graph({A, A, B}, {2, 1}));
  ASSERT_TRUE(three.feasible());
  EXPECT_EQ(three.assignment->room_of, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(all_assignments({A, A, B}, {2, 1}).size(), 1u);
}

TEST(Deficiency, Examples) {
  EXPECT_EQ(deficiency(graph({A, B}, {1, 1})), 0);
  EXPECT_EQ(deficiency(graph({A, A}, {1, 1})), 1);
  EXPECT_EQ(deficiency(graph({RoomSet{}, RoomSet{}, RoomSet{}}, {1, 1, 1})), 3);
}

TEST(FeasibleAssignment, RejectsUnbalancedCapacities) {
  EXPECT_THROW(feasible_assignment(graph({A, B}, {1, 2})), InputError);
  EXPECT_THROW(feasible_assignment(graph({A, B}, {2, 0})), InputError);
}

TEST(FeasibleAssignment, RequiresAugmentingThroughFullRooms) {
  // Greedy would put agent 0 in A and strand agent 2.
  auto g = graph({RoomSet{0, 1}, B, A}, {1, 1, 1});
  EXPECT_FALSE(feasible_assignment(g).feasible());
  auto h = graph({RoomSet{0, 1}, RoomSet{1, 2}, A}, {1, 1, 1});
  expect_consistent(h);
  EXPECT_TRUE(feasible_assignment(h).feasible());
}

TEST(FeasibleAssignment, ExhaustiveTwoRoomsUpToFourAgents) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int ca = 1; ca < static_cast<int>(n); ++ca) {
      std::vector<int> caps{ca, static_cast<int>(n) - ca};
      for (std::uint32_t code = 0; code < (1u << (2 * n)); ++code) {
        std::vector<RoomSet> edges;
        for (std::size_t i = 0; i < n; ++i) edges.emplace_back((code >> (2 * i)) & 3u);
        expect_consistent(graph(edges, caps));
      }
    }
  }
}

TEST(FeasibleAssignment, RandomGraphsAgainstEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t rooms = 1 + rng() % 3;
    int n = static_cast<int>(rooms + rng() % (7 - rooms));
    auto caps = harmony::testing::random_capacities(rng, rooms, n);
    std::vector<RoomSet> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(static_cast<std::uint32_t>(rng()) & RoomSet::all(rooms).bits());
    expect_consistent(graph(edges, caps));
  }
}
