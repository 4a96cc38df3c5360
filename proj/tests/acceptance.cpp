// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check re-derives demand sets with the brute-force helpers in
// support.hpp instead of trusting the library oracles.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "harmony/matching.hpp"
#include "harmony/solver.hpp"
#include "harmony/variants.hpp"
#include "harmony_tools/problem.hpp"
#include "support.hpp"

using namespace harmony;
using namespace harmony::testing;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string str(const std::vector<Rational>& v) {
  std::string out = "(";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + harmony::to_string(v[k]);
  return out + ")";
}

/// Nonnegative integers summing to m, roughly uniform over compositions.
std::vector<std::int64_t> random_composition(std::mt19937_64& rng, std::size_t parts, std::int64_t m) {
  std::vector<std::int64_t> cuts{0, m};
  for (std::size_t k = 1; k < parts; ++k) cuts.push_back(static_cast<std::int64_t>(draw(rng, m + 1)));
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::int64_t> x;
  for (std::size_t k = 1; k < cuts.size(); ++k) x.push_back(cuts[k] - cuts[k - 1]);
  return x;
}

std::vector<Rational> random_grid_point(std::mt19937_64& rng, std::size_t rooms) {
  std::int64_t m = 1 + static_cast<std::int64_t>(draw(rng, 40));
  return to_rationals(random_composition(rng, rooms, m), m);
}

struct QuasiInstance {
  std::vector<int> caps;
  std::vector<std::vector<Rational>> values;

  std::size_t agents() const { return values.size(); }
  std::size_t rooms() const { return caps.size(); }

  std::vector<PreferenceOracle> closed_oracles() const {
    std::vector<PreferenceOracle> out;
    for (std::size_t i = 0; i < agents(); ++i) {
      out.push_back(free_room_closure(quasilinear_oracle("agent " + std::to_string(i), values[i], caps)));
    }
    return out;
  }

  /// Independent demand: per-unit argmax plus every free room.
  RoomSet demand(std::size_t i, const std::vector<Rational>& p) const {
    return brute_closure(brute_quasilinear(values[i], caps, p), p);
  }
};

QuasiInstance random_quasi(std::mt19937_64& rng, std::size_t rooms, int max_agents) {
  QuasiInstance inst;
  int n = static_cast<int>(rooms) + static_cast<int>(draw(rng, max_agents - rooms + 1));
  inst.caps = random_capacities(rng, rooms, n);
  for (int i = 0; i < n; ++i) inst.values.push_back(random_values(rng, rooms));
  return inst;
}

bool is_distribution(const std::vector<Rational>& p) {
  Rational sum = 0;
  for (const auto& x : p) {
    if (x < 0) return false;
    sum += x;
  }
  return sum == 1;
}

bool loads_match(const std::vector<std::size_t>& room_of, const std::vector<int>& caps) {
  std::vector<int> load(caps.size(), 0);
  for (auto r : room_of) {
    if (r >= caps.size()) return false;
    ++load[r];
  }
  return load == caps;
}

/// Exact result: every agent demands its room at the prices.
std::optional<std::string> independent_exact(const std::function<RoomSet(std::size_t, const std::vector<Rational>&)>& demand,
                                             const std::vector<int>& caps, const std::vector<Rational>& p,
                                             const std::vector<std::size_t>& room_of) {
  if (!is_distribution(p)) return "prices " + str(p) + " are not a distribution";
  if (!loads_match(room_of, caps)) return "assignment does not fill the rooms";
  for (std::size_t i = 0; i < room_of.size(); ++i) {
    if (!demand(i, p).contains(room_of[i])) return "agent " + std::to_string(i) + " envies at " + str(p);
  }
  return std::nullopt;
}

/// Eps result: witnesses demand the assigned rooms, the cell is small and the
/// prices are its barycenter.
std::optional<std::string> independent_cell(const std::function<RoomSet(std::size_t, const std::vector<Rational>&)>& demand,
                                            const std::vector<int>& caps, const Solution& sol, const Rational& eps) {
  if (!sol.cell) return "eps result without a cell";
  const auto& cell = *sol.cell;
  if (!loads_match(sol.assignment.room_of, caps)) return "assignment does not fill the rooms";
  std::vector<std::vector<Rational>> verts;
  for (const auto& v : cell.vertices) verts.push_back(v.coords());
  Rational diam = 0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    if (!is_distribution(verts[a])) return "cell vertex off the simplex";
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      Rational s = 0;
      for (std::size_t r = 0; r < caps.size(); ++r) s += (verts[a][r] - verts[b][r]) * (verts[a][r] - verts[b][r]);
      diam = std::max(diam, s);
    }
  }
  if (diam > eps * eps) return "cell diameter above epsilon";
  if (diam != cell.squared_diameter) return "reported diameter differs from the vertices";
  std::vector<Rational> mean(caps.size(), Rational(0));
  for (const auto& v : verts) {
    for (std::size_t r = 0; r < mean.size(); ++r) mean[r] += v[r] / static_cast<long>(verts.size());
  }
  if (mean != sol.prices.coords()) return "prices are not the cell barycenter";
  if (cell.witness.size() != sol.assignment.room_of.size()) return "witness count differs";
  for (std::size_t i = 0; i < cell.witness.size(); ++i) {
    if (cell.witness[i] >= verts.size()) return "witness out of range";
    if (!demand(i, verts[cell.witness[i]]).contains(sol.assignment.room_of[i])) {
      return "witness of agent " + std::to_string(i) + " does not demand its room";
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Check criterion_1() {
  Check v;
  std::mt19937_64 rng(20240101);
  SolverConfig config;
  config.epsilon = Rational(1, 1000);
  int exact = 0, eps = 0;
  auto start = Clock::now();
  for (int k = 0; k < 200; ++k) {
    std::size_t d = 2 + static_cast<std::size_t>(k % 3);
    QuasiInstance inst = random_quasi(rng, d, 8);
    auto oracles = inst.closed_oracles();
    Solution sol = solve_rental(oracles, inst.caps, config);
    auto demand = [&](std::size_t i, const std::vector<Rational>& p) { return inst.demand(i, p); };
    std::string tag = "instance " + std::to_string(k) + ": ";
    if (sol.status == SolveStatus::exact) {
      ++exact;
      if (!verify_envy_free(sol, oracles, inst.caps).ok) v.fail(tag + "verify_envy_free rejects the exact result");
      if (auto bad = independent_exact(demand, inst.caps, sol.prices.coords(), sol.assignment.room_of)) v.fail(tag + *bad);
    } else if (sol.status == SolveStatus::eps) {
      ++eps;
      if (!check_cell_certificate(sol, oracles, inst.caps, config.epsilon).ok) v.fail(tag + "certificate rejected");
      if (auto bad = independent_cell(demand, inst.caps, sol, config.epsilon)) v.fail(tag + *bad);
    } else {
      v.fail(tag + "solver failed");
    }
  }
  double secs = seconds_since(start);
  if (secs >= 120) v.fail("suite took " + std::to_string(secs) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "200 instances: %d exact, %d eps, %.2f s", exact, eps, secs);
  v.detail = buf;
  return v;
}

// Grid scan in integers: at x/200 the per-unit utility of room r, scaled by
// 200 * 840, is 1680 * a[r] - x[r] * (840 / c[r]) where v[r] = a[r] / 100.
std::optional<std::vector<std::int64_t>> scan_mesh_200(const QuasiInstance& inst) {
  const std::int64_t m = 200;
  std::vector<std::vector<std::int64_t>> a(inst.agents(), std::vector<std::int64_t>(inst.rooms()));
  for (std::size_t i = 0; i < inst.agents(); ++i) {
    for (std::size_t r = 0; r < inst.rooms(); ++r) a[i][r] = checked_int64(numerator_of(inst.values[i][r] * 100));
  }
  for (const auto& x : compositions(inst.rooms(), m)) {
    std::vector<RoomSet> edges;
    for (std::size_t i = 0; i < inst.agents(); ++i) {
      std::int64_t best = INT64_MIN;
      RoomSet set;
      for (std::size_t r = 0; r < inst.rooms(); ++r) {
        std::int64_t u = 1680 * a[i][r] - x[r] * (840 / inst.caps[r]);
        if (u > best) {
          best = u;
          set = RoomSet::single(r);
        } else if (u == best) {
          set.insert(r);
        }
      }
      for (std::size_t r = 0; r < inst.rooms(); ++r) {
        if (x[r] == 0) set.insert(r);
      }
      edges.push_back(set);
    }
    if (brute_hall(edges, inst.caps)) return x;
  }
  return std::nullopt;
}

Check criterion_2() {
  Check v;
  std::mt19937_64 rng(777);
  SolverConfig config;
  int feasible = 0, exact = 0, disagreements = 0;
  for (int k = 0; k < 50; ++k) {
    std::size_t d = 2 + static_cast<std::size_t>(k % 2);
    QuasiInstance inst = random_quasi(rng, d, 6);
    auto oracles = inst.closed_oracles();
    auto demand = [&](std::size_t i, const std::vector<Rational>& p) { return inst.demand(i, p); };
    std::string tag = "instance " + std::to_string(k) + ": ";
    auto point = scan_mesh_200(inst);
    Solution sol = solve_rental(oracles, inst.caps, config);
    if (sol.status == SolveStatus::exact) {
      ++exact;
      if (auto bad = independent_exact(demand, inst.caps, sol.prices.coords(), sol.assignment.room_of)) v.fail(tag + *bad);
    }
    if (!point) continue;
    ++feasible;
    // The scan's point must pass the same checker with some assignment.
    std::vector<Rational> p = to_rationals(*point, 200);
    std::vector<RoomSet> edges;
    for (std::size_t i = 0; i < inst.agents(); ++i) edges.push_back(inst.demand(i, p));
    auto assignments = all_assignments(edges, inst.caps);
    if (assignments.empty() || independent_exact(demand, inst.caps, p, assignments.front())) {
      v.fail(tag + "scan point " + str(p) + " does not pass the checker");
    }
    if (sol.status != SolveStatus::exact) {
      ++disagreements;
      v.fail(tag + "scan finds " + str(p) + " but the solver returned " + to_string(sol.status));
    }
  }
  if (feasible == 0) v.fail("no instance had a feasible mesh-200 point; the comparison is vacuous");
  v.detail = "50 instances: " + std::to_string(feasible) + " scan-feasible, " + std::to_string(exact) +
             " solved exactly, " + std::to_string(disagreements) + " disagreements";
  return v;
}

/// Largest number of agents placeable without exceeding capacities.
std::size_t brute_max_matching(const std::vector<RoomSet>& edges, const std::vector<int>& caps) {
  std::size_t best = 0;
  std::vector<int> load(caps.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t placed) -> void {
    if (i == edges.size()) {
      best = std::max(best, placed);
      return;
    }
    self(self, i + 1, placed);
    for (auto r : edges[i].members()) {
      if (load[r] == caps[r]) continue;
      ++load[r];
      self(self, i + 1, placed + 1);
      --load[r];
    }
  };
  rec(rec, 0, 0);
  return best;
}

std::optional<std::string> check_graph(const std::vector<RoomSet>& edges, const std::vector<int>& caps) {
  DemandGraph g;
  g.edges = edges;
  g.capacities = caps;
  FlowWitness w = feasible_assignment(g);
  bool brute = brute_feasible(edges, caps);
  if (w.feasible() != brute) return std::string("feasibility differs from enumeration");
  std::size_t best = brute_max_matching(edges, caps);
  if (w.flow != best) return "flow " + std::to_string(w.flow) + " but enumeration places " + std::to_string(best);
  if (deficiency(g) != static_cast<std::int64_t>(edges.size() - best)) return std::string("deficiency differs");
  if (w.feasible()) {
    std::vector<int> degree(caps.size(), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      std::size_t r = w.assignment->room_of[i];
      if (r >= caps.size() || !edges[i].contains(r)) return std::string("assignment uses a missing edge");
      ++degree[r];
    }
    if (degree != caps) return std::string("some room y has d_H(y) != c[y]");
  } else {
    std::int64_t need = 0;
    for (auto r : w.violating.members()) need += caps[r];
    std::int64_t have = 0;
    for (const auto& e : edges) have += (e.bits() & w.violating.bits()) ? 1 : 0;
    if (need - have != w.deficiency) return std::string("violating set does not account for the deficiency");
  }
  return std::nullopt;
}

Check criterion_3() {
  Check v;
  std::mt19937_64 rng(31337);
  int feasible = 0, random_graphs = 0, exhaustive = 0;
  for (int k = 0; k < 1000; ++k) {
    std::size_t d = 1 + draw(rng, 3);
    int n = static_cast<int>(d) + static_cast<int>(draw(rng, 7 - d));
    auto caps = random_capacities(rng, d, n);
    std::vector<RoomSet> edges;
    for (int i = 0; i < n; ++i) edges.push_back(RoomSet(static_cast<std::uint32_t>(draw(rng, 1u << d))));
    if (auto bad = check_graph(edges, caps)) v.fail("random graph " + std::to_string(k) + ": " + *bad);
    feasible += brute_feasible(edges, caps) ? 1 : 0;
    ++random_graphs;
  }
  for (int n = 2; n <= 4; ++n) {
    for (int c0 = 1; c0 < n; ++c0) {
      std::vector<int> caps{c0, n - c0};
      std::uint32_t total = 1u << (2 * n);
      for (std::uint32_t code = 0; code < total; ++code) {
        std::vector<RoomSet> edges;
        for (int i = 0; i < n; ++i) edges.push_back(RoomSet((code >> (2 * i)) & 3u));
        if (auto bad = check_graph(edges, caps)) v.fail("exhaustive n=" + std::to_string(n) + ": " + *bad);
        ++exhaustive;
      }
    }
  }
  v.detail = std::to_string(random_graphs) + " random graphs (" + std::to_string(feasible) + " feasible) and " +
             std::to_string(exhaustive) + " exhaustive edge sets";
  return v;
}

Check criterion_4() {
  Check v;
  std::mt19937_64 rng(4242);
  std::vector<std::vector<BalancedFamily>> families(5);
  for (std::size_t d = 2; d <= 4; ++d) families[d] = canonical_balanced_families(d);
  int probes = 0;
  for (int k = 0; k < 1000; ++k) {
    std::size_t d = 2 + draw(rng, 3);
    const auto& family = families[d][draw(rng, families[d].size())];
    // Independent balance check: weights times indicators sum to one per room.
    for (std::size_t r = 0; r < d; ++r) {
      Rational cover = 0;
      for (std::size_t t = 0; t < family.members.size(); ++t) {
        if (family.members[t].contains(r)) cover += family.weights[t];
      }
      if (cover != 1) v.fail("family is not balanced");
    }
    QuasiInstance inst = random_quasi(rng, d, 8);
    std::vector<Rational> p = random_grid_point(rng, d);
    PriceVector price = PriceVector::from_rationals(p);
    try {
      RoomSet t = claim2_probe(inst.closed_oracles(), inst.caps, family, price);
      if (std::find(family.members.begin(), family.members.end(), t) == family.members.end()) {
        v.fail("probe " + std::to_string(k) + ": returned set is not a family member");
      }
      std::int64_t need = 0;
      for (auto r : t.members()) need += inst.caps[r];
      std::int64_t have = 0;
      for (std::size_t i = 0; i < inst.agents(); ++i) have += (inst.demand(i, p).bits() & t.bits()) ? 1 : 0;
      if (have < need) v.fail("probe " + std::to_string(k) + ": |A_T| < c(T) at " + str(p));
      ++probes;
    } catch (const std::exception& e) {
      v.fail("probe " + std::to_string(k) + ": " + e.what());
    }
  }
  v.detail = std::to_string(probes) + " of 1000 probes found T with p in K_T";
  return v;
}

Check criterion_5() {
  Check v;
  std::mt19937_64 rng(5150);
  int zero = 0, positive = 0;
  for (int k = 0; k < 1000; ++k) {
    std::size_t d = 2 + draw(rng, 3);
    QuasiInstance inst = random_quasi(rng, d, 8);
    std::vector<Rational> p = random_grid_point(rng, d);
    DemandGraph g = build_demand_graph(inst.closed_oracles(), inst.caps, PriceVector::from_rationals(p));
    for (std::size_t i = 0; i < inst.agents(); ++i) {
      if (g.edges[i] != inst.demand(i, p)) v.fail("vertex " + std::to_string(k) + ": demand graph differs from brute force");
    }
    bool all_kt = true;
    for (std::uint32_t t = 0; t < (1u << d); ++t) all_kt = all_kt && in_k_t(g, RoomSet(t));
    bool zero_def = deficiency(g) == 0;
    if (zero_def != all_kt) v.fail("vertex " + std::to_string(k) + ": deficiency and K_T membership disagree");
    if (zero_def != brute_hall(g.edges, inst.caps)) v.fail("vertex " + std::to_string(k) + ": brute Hall disagrees");
    (zero_def ? zero : positive) += 1;
  }
  v.detail = "1000 vertices (" + std::to_string(zero) + " deficiency 0, " + std::to_string(positive) +
             " positive), 0 disagreements";
  if (!v.pass) v.detail = "1000 vertices";
  return v;
}

/// argmax over supp(p) of v[r] * p[r].
RoomSet brute_hungry(const std::vector<Rational>& v, const std::vector<Rational>& p) {
  RoomSet best;
  std::optional<Rational> top;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (p[r] == 0) continue;
    Rational u = v[r] * p[r];
    if (!top || u > *top) {
      top = u;
      best = RoomSet::single(r);
    } else if (u == *top) {
      best.insert(r);
    }
  }
  return best;
}

Check criterion_6() {
  Check v;
  std::mt19937_64 rng(6060);
  SolverConfig config;
  int exact = 0, eps = 0;
  for (int k = 0; k < 50; ++k) {
    std::size_t d = 2 + static_cast<std::size_t>(k % 3);
    int n = static_cast<int>(d) + static_cast<int>(draw(rng, 7 - d));
    CakeProblem problem;
    problem.capacities = random_capacities(rng, d, n);
    std::vector<std::vector<Rational>> values;
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> row;
      for (std::size_t r = 0; r < d; ++r) row.emplace_back(1 + static_cast<long>(draw(rng, 100)), 100L);
      values.push_back(row);
      problem.oracles.push_back(hungry_cake_oracle("agent " + std::to_string(i), row));
    }
    auto demand = [&](std::size_t i, const std::vector<Rational>& p) { return brute_hungry(values[i], p); };
    std::string tag = "instance " + std::to_string(k) + ": ";
    try {
      Solution sol = solve_cake(problem, config);
      if (sol.status == SolveStatus::failed) {
        v.fail(tag + "solver failed");
        continue;
      }
      for (auto r : sol.assignment.room_of) {
        if (!(sol.prices[r] > 0)) v.fail(tag + "assigned piece priced " + harmony::to_string(sol.prices[r]));
      }
      if (sol.status == SolveStatus::exact) {
        ++exact;
        if (!verify_envy_free(sol, problem.oracles, problem.capacities).ok) v.fail(tag + "rejected by original oracles");
        if (auto bad = independent_exact(demand, problem.capacities, sol.prices.coords(), sol.assignment.room_of)) {
          v.fail(tag + *bad);
        }
      } else {
        ++eps;
        if (!check_cell_certificate(sol, problem.oracles, problem.capacities, config.epsilon).ok) {
          v.fail(tag + "certificate rejected by original oracles");
        }
        if (auto bad = independent_cell(demand, problem.capacities, sol, config.epsilon)) v.fail(tag + *bad);
      }
    } catch (const PropertyViolation& e) {
      v.fail(tag + "interior assertion fired: " + e.what());
    }
  }
  v.detail = "50 instances: " + std::to_string(exact) + " exact, " + std::to_string(eps) + " eps, all pieces priced > 0";
  return v;
}

/// argmax of v[r] - p[r]/c[r] over rooms priced below 1.
RoomSet brute_exchange(const std::vector<Rational>& v, const std::vector<int>& caps, const std::vector<Rational>& p) {
  RoomSet best;
  std::optional<Rational> top;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (p[r] >= 1) continue;
    Rational u = v[r] - p[r] / caps[r];
    if (!top || u > *top) {
      top = u;
      best = RoomSet::single(r);
    } else if (u == *top) {
      best.insert(r);
    }
  }
  return best;
}

Check criterion_7() {
  Check v;
  std::mt19937_64 rng(7007);
  SolverConfig config;
  int exact = 0, eps = 0;
  for (int k = 0; k < 50; ++k) {
    std::size_t d = 2 + static_cast<std::size_t>(k % 3);
    QuasiInstance inst = random_quasi(rng, d, 6);
    ExchangeProblem problem;
    problem.capacities = inst.caps;
    for (std::size_t i = 0; i < inst.agents(); ++i) {
      problem.oracles.push_back(exchange_quasilinear_oracle("agent " + std::to_string(i), inst.values[i], inst.caps));
    }
    std::string tag = "instance " + std::to_string(k) + ": ";
    try {
      ExchangeSolution sol = solve_exchange(problem, config);
      if (sol.status == SolveStatus::failed) {
        v.fail(tag + "solver failed");
        continue;
      }
      const auto& p = sol.prices.coords();
      Rational low = *std::min_element(p.begin(), p.end());
      if (low != 0) v.fail(tag + "minimum price is " + harmony::to_string(low));
      for (const auto& x : p) {
        if (x < 0 || x > 1) v.fail(tag + "price outside [0,1]");
      }
      if (!loads_match(sol.assignment.room_of, inst.caps)) v.fail(tag + "assignment does not fill the rooms");
      for (std::size_t i = 0; i < inst.agents(); ++i) {
        std::size_t r = sol.assignment.room_of[i];
        if (p[r] == 1) v.fail(tag + "agent assigned a room priced 1");
      }
      if (sol.status == SolveStatus::exact) {
        ++exact;
        if (!verify_exchange(sol, problem.oracles, inst.caps).ok) v.fail(tag + "verify_exchange rejects");
        for (std::size_t i = 0; i < inst.agents(); ++i) {
          if (!brute_exchange(inst.values[i], inst.caps, p).contains(sol.assignment.room_of[i])) {
            v.fail(tag + "agent " + std::to_string(i) + " envies");
          }
        }
      } else {
        ++eps;
        if (!check_exchange_certificate(sol, problem.oracles, inst.caps).ok) v.fail(tag + "certificate rejected");
        for (std::size_t i = 0; i < inst.agents(); ++i) {
          const auto& w = sol.cell->vertices[sol.cell->witness[i]].coords();
          if (!brute_exchange(inst.values[i], inst.caps, w).contains(sol.assignment.room_of[i])) {
            v.fail(tag + "witness of agent " + std::to_string(i) + " does not demand its room");
          }
        }
      }
    } catch (const std::exception& e) {
      v.fail(tag + e.what());
    }
  }

  // Exact round trips on rationals, both directions.
  for (int k = 0; k < 1000; ++k) {
    std::size_t d = 2 + draw(rng, 4);
    std::vector<Rational> c;
    for (std::size_t r = 0; r < d; ++r) c.emplace_back(static_cast<long>(draw(rng, 1001)), 1000L);
    c[draw(rng, d)] = 0;
    CubePoint cube(c);
    if (simplex_to_cube(cube_to_simplex(cube)) != cube) v.fail("cube -> simplex -> cube differs at " + str(c));
    std::vector<Rational> q = random_grid_point(rng, d);
    PriceVector s = PriceVector::from_rationals(q);
    if (cube_to_simplex(simplex_to_cube(s)) != s) v.fail("simplex -> cube -> simplex differs at " + str(q));
  }

  // Float-rendered boundary points.
  double worst = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    std::size_t d = 2 + draw(rng, 4);
    std::vector<double> p(d);
    for (auto& x : p) x = unit(rng);
    p[draw(rng, d)] = 0.0;
    std::vector<double> back = simplex_to_cube(cube_to_simplex(p));
    std::vector<Rational> exact_p;
    for (double x : p) exact_p.emplace_back(x);
    std::vector<double> image = cube_to_simplex(p);
    Rational denom = 0;
    for (const auto& x : exact_p) denom += 1 - x;
    for (std::size_t r = 0; r < d; ++r) {
      worst = std::max(worst, std::abs(back[r] - p[r]));
      worst = std::max(worst, std::abs(image[r] - to_double((1 - exact_p[r]) / denom)));
    }
  }
  if (worst > 1e-12) v.fail("float round trip error " + std::to_string(worst));
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "50 instances: %d exact, %d eps; 2000 rational round trips exact; 1000 float round trips, max error %.2e",
                exact, eps, worst);
  v.detail = buf;
  return v;
}

Check criterion_8() {
  Check v;
  std::mt19937_64 rng(8080);
  std::size_t boundary = 0;
  for (int k = 0; k < 20; ++k) {
    std::size_t d = 2 + static_cast<std::size_t>(k % 3);
    QuasiInstance inst = random_quasi(rng, d, 8);
    PreferenceOracle closed = free_room_closure(quasilinear_oracle("agent", inst.values[0], inst.caps));
    AxiomReport report = check_axioms(closed, AssumptionSet::rental, 500, static_cast<std::uint64_t>(k));
    const AxiomResult& a2 = report.at("A2");
    if (a2.verdict != harmony::Verdict::pass) v.fail("instance " + std::to_string(k) + ": closure fails A2");
    if (report.boundary_samples == 0) v.fail("instance " + std::to_string(k) + ": no boundary samples");
    if (!report.passed()) v.fail("instance " + std::to_string(k) + ": some assumption fails");
    boundary += report.boundary_samples;
  }

  std::vector<Rational> values{rat(1), rat(0), rat(0)};
  std::vector<int> caps{1, 1, 1};
  AxiomReport raw = check_axioms(quasilinear_oracle("raw", values, caps), AssumptionSet::rental, 500, 1);
  const AxiomResult& a2 = raw.at("A2");
  std::string example;
  if (a2.verdict != harmony::Verdict::fail || !a2.counterexample) {
    v.fail("raw quasilinear oracle passes A2");
  } else {
    const auto& p = *a2.counterexample;
    RoomSet recomputed = brute_quasilinear(values, caps, p);
    if (recomputed != a2.demand) v.fail("counterexample demand does not match brute force");
    bool missing_free = false;
    for (std::size_t r = 0; r < p.size(); ++r) missing_free = missing_free || (p[r] == 0 && !recomputed.contains(r));
    if (!missing_free) v.fail("counterexample has no undemanded free room");
    example = " raw v=(1, 0, 0) fails A2 at p=" + str(p);
  }
  v.detail = "20 closure instances x 500 samples (" + std::to_string(boundary) + " boundary samples) pass A2;" + example;
  return v;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json random_problem_json(std::mt19937_64& rng, const std::string& variant, std::size_t d, int max_agents) {
  QuasiInstance inst = random_quasi(rng, d, max_agents);
  Json j;
  j["format"] = "harmony-problem/1";
  j["variant"] = variant;
  j["rooms"] = Json::array();
  for (std::size_t r = 0; r < d; ++r) j["rooms"].push_back({{"name", std::string(1, char('A' + r))}, {"capacity", inst.caps[r]}});
  j["agents"] = Json::array();
  for (std::size_t i = 0; i < inst.agents(); ++i) {
    Json values = Json::array();
    for (const auto& x : inst.values[i]) {
      values.push_back(variant == "cake" ? harmony::to_string(x + Rational(1, 100)) : harmony::to_string(x));
    }
    std::string family = variant == "cake" ? "hungry-cake" : "quasilinear";
    j["agents"].push_back({{"name", "agent" + std::to_string(i)}, {"oracle", {{"family", family}, {"values", values}}}});
  }
  return j;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(HARMONY_CLI) + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Check criterion_9() {
  Check v;
  fs::path dir = fs::temp_directory_path() / "harmony-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(9090);
  std::vector<fs::path> problems;
  const char* variants[] = {"rental", "rental", "rental", "cake", "exchange"};
  for (int k = 0; k < 10; ++k) {
    std::string variant = variants[k % 5];
    fs::path path = dir / ("problem" + std::to_string(k) + ".json");
    std::ofstream(path) << random_problem_json(rng, variant, 3 + static_cast<std::size_t>(k % 2), 8).dump(2);
    problems.push_back(path);
  }
  problems.push_back(HARMONY_DATA_DIR "/knife_edge.json");
  problems.push_back(HARMONY_DATA_DIR "/bargain.json");

  int compared = 0;
  for (std::size_t k = 0; k < problems.size(); ++k) {
    for (const char* extra : {"", "--offset on --seed 5"}) {
      std::vector<std::string> outputs;
      for (const char* threads : {"1", "8", "8", "3"}) {
        fs::path out = dir / ("out" + std::to_string(outputs.size()) + ".json");
        int code = run_cli("solve --input " + problems[k].string() + " " + extra + " --threads " + threads +
                           " --output " + out.string());
        if (code != 0) v.fail(problems[k].filename().string() + ": solve exited " + std::to_string(code));
        outputs.push_back(slurp(out));
      }
      for (const auto& o : outputs) {
        if (o != outputs.front() || o.empty()) v.fail(problems[k].filename().string() + ": outputs differ");
      }
      ++compared;
    }
  }
  fs::remove_all(dir);
  v.detail = std::to_string(compared) + " configurations, 4 runs each (threads 1, 8, 8, 3): byte-identical";
  return v;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"1 rental suite", criterion_1},        {"2 mesh-200 equivalence", criterion_2},
      {"3 matching vs enumeration", criterion_3}, {"4 balanced-family probe", criterion_4},
      {"5 Hall and K_T", criterion_5},        {"6 cake pipeline", criterion_6},
      {"7 exchange pipeline", criterion_7},   {"8 free-room closure", criterion_8},
      {"9 determinism", criterion_9},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Check v;
    auto start = Clock::now();
    try {
      v = run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    all = all && v.pass;
    std::printf("criterion %s: %s (%.2f s) %s%s\n", name.c_str(), v.pass ? "PASS" : "FAIL", seconds_since(start),
                v.detail.c_str(), v.pass ? "" : (" -- first failure: " + v.first_failure).c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
