#pragma once

// Test-side reference implementations. Everything here is brute force and
// shares no code with the library beyond the value types.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "harmony/matching.hpp"
#include "harmony/oracle.hpp"
#include "harmony/rational.hpp"
#include "harmony/room_set.hpp"
#include "harmony/simplex.hpp"

namespace harmony::testing {

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

/// Every capacity-respecting assignment with f(i) in edges[i].
inline std::vector<std::vector<std::size_t>> all_assignments(const std::vector<RoomSet>& edges,
                                                             const std::vector<int>& caps) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> f(edges.size());
  std::vector<int> load(caps.size(), 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == edges.size()) {
      for (std::size_t r = 0; r < caps.size(); ++r) {
        if (load[r] != caps[r]) return;
      }
      out.push_back(f);
      return;
    }
    for (std::size_t r = 0; r < caps.size(); ++r) {
      if (!edges[i].contains(r) || load[r] == caps[r]) continue;
      f[i] = r;
      ++load[r];
      self(self, i + 1);
      --load[r];
    }
  };
  rec(rec, 0);
  return out;
}

inline bool brute_feasible(const std::vector<RoomSet>& edges, const std::vector<int>& caps) {
  return !all_assignments(edges, caps).empty();
}

/// Hall's condition checked over every room subset.
inline bool brute_hall(const std::vector<RoomSet>& edges, const std::vector<int>& caps) {
  std::uint32_t full = (1u << caps.size()) - 1;
  for (std::uint32_t t = 0; t <= full; ++t) {
    int need = 0;
    for (std::size_t r = 0; r < caps.size(); ++r) {
      if ((t >> r) & 1u) need += caps[r];
    }
    int have = 0;
    for (const auto& e : edges) {
      if (e.bits() & t) ++have;
    }
    if (have < need) return false;
  }
  return true;
}

inline Rational rat(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

/// argmax_r v[r] - p[r]/c[r] evaluated independently of the library oracle.
inline RoomSet brute_quasilinear(const std::vector<Rational>& v, const std::vector<int>& caps,
                                 const std::vector<Rational>& p) {
  RoomSet best;
  std::optional<Rational> top;
  for (std::size_t r = 0; r < v.size(); ++r) {
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

inline RoomSet brute_closure(RoomSet inner, const std::vector<Rational>& p) {
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (p[r] == 0) inner.insert(r);
  }
  return inner;
}

/// Random capacities summing to n with every entry positive.
inline std::vector<int> random_capacities(std::mt19937_64& rng, std::size_t rooms, int agents) {
  std::vector<int> caps(rooms, 1);
  for (int k = static_cast<int>(rooms); k < agents; ++k) caps[draw(rng, rooms)] += 1;
  return caps;
}

/// Values on the 1/100 grid in [0, 1].
inline std::vector<Rational> random_values(std::mt19937_64& rng, std::size_t rooms) {
  std::vector<Rational> v;
  for (std::size_t r = 0; r < rooms; ++r) v.emplace_back(static_cast<long>(draw(rng, 101)), 100L);
  return v;
}

/// All integer compositions of `mesh` into `parts` nonnegative parts.
inline std::vector<std::vector<std::int64_t>> compositions(std::size_t parts, std::int64_t mesh) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(parts, 0);
  auto rec = [&](auto&& self, std::size_t i, std::int64_t left) -> void {
    if (i + 1 == parts) {
      x[i] = left;
      out.push_back(x);
      return;
    }
    for (std::int64_t k = left; k >= 0; --k) {
      x[i] = k;
      self(self, i + 1, left - k);
    }
  };
  rec(rec, 0, mesh);
  return out;
}

inline std::vector<Rational> to_rationals(const std::vector<std::int64_t>& x, std::int64_t mesh) {
  std::vector<Rational> out;
  for (auto v : x) out.emplace_back(v, mesh);
  return out;
}

}  // namespace harmony::testing
