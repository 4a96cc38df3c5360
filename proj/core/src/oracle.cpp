#include "harmony/oracle.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <unordered_map>

namespace harmony {

OracleError::OracleError(const std::string& agent, const std::string& price, const std::string& what)
    : std::runtime_error("oracle for agent '" + agent + "' at p=" + price + ": " + what),
      agent_(agent),
      price_(price) {}

namespace {

template <typename Score>
RoomSet argmax(std::size_t rooms, RoomSet eligible, Score score) {
  RoomSet best;
  std::optional<Rational> best_value;
  for (std::size_t r = 0; r < rooms; ++r) {
    if (!eligible.contains(r)) continue;
    Rational u = score(r);
    if (!best_value || u > *best_value) {
      best_value = u;
      best = RoomSet::single(r);
    } else if (u == *best_value) {
      best.insert(r);
    }
  }
  return best;
}

void check_capacities(std::size_t rooms, const std::vector<int>& capacities) {
  if (capacities.size() != rooms) throw InputError("one capacity per room is required");
  for (int c : capacities) {
    if (c <= 0) throw InputError("capacities must be positive");
  }
}

}  // namespace

PreferenceOracle quasilinear_oracle(std::string agent, std::vector<Rational> values,
                                    std::vector<int> capacities) {
  std::size_t rooms = values.size();
  check_capacities(rooms, capacities);
  return PreferenceOracle(std::move(agent), rooms,
                          [values = std::move(values), capacities = std::move(capacities)](
                              const PriceVector& p) {
                            return argmax(p.size(), RoomSet::all(p.size()), [&](std::size_t r) {
                              return values[r] - Rational(p.numerator(r), p.denominator() * capacities[r]);
                            });
                          });
}

CubeOracle exchange_quasilinear_oracle(std::string agent, std::vector<Rational> values,
                                       std::vector<int> capacities) {
  std::size_t rooms = values.size();
  check_capacities(rooms, capacities);
  return CubeOracle(std::move(agent), rooms,
                    [values = std::move(values), capacities = std::move(capacities)](const CubePoint& p) {
                      RoomSet affordable;
                      for (std::size_t r = 0; r < p.size(); ++r) {
                        if (p[r] < 1) affordable.insert(r);
                      }
                      return argmax(p.size(), affordable, [&](std::size_t r) {
                        return values[r] - p[r] / capacities[r];
                      });
                    });
}

PreferenceOracle hungry_cake_oracle(std::string agent, std::vector<Rational> values) {
  for (const auto& v : values) {
    if (v <= 0) throw InputError("hungry-cake values must be positive");
  }
  std::size_t rooms = values.size();
  return PreferenceOracle(std::move(agent), rooms, [values = std::move(values)](const PriceVector& p) {
    return argmax(p.size(), p.support(), [&](std::size_t r) {
      return values[r] * Rational(p.numerator(r), p.denominator());
    });
  });
}

PreferenceOracle constant_oracle(std::string agent, std::size_t rooms, RoomSet demand) {
  return PreferenceOracle(std::move(agent), rooms, [demand](const PriceVector&) { return demand; });
}

PreferenceOracle free_room_closure(const PreferenceOracle& inner) {
  return PreferenceOracle(
      inner.agent(), inner.rooms(),
      [inner](const PriceVector& p) { return inner(p) | p.free_rooms(); }, inner.concurrency());
}

PreferenceOracle cached(const PreferenceOracle& inner) {
  struct Cache {
    std::mutex mutex;
    std::unordered_map<PriceVector, RoomSet, PriceVectorHash> answers;
  };
  auto cache = std::make_shared<Cache>();
  return PreferenceOracle(
      inner.agent(), inner.rooms(),
      [inner, cache](const PriceVector& p) {
        {
          std::lock_guard lock(cache->mutex);
          if (auto it = cache->answers.find(p); it != cache->answers.end()) return it->second;
        }
        RoomSet answer = inner(p);
        std::lock_guard lock(cache->mutex);
        return cache->answers.emplace(p, answer).first->second;
      },
      inner.concurrency());
}

// ---------------------------------------------------------------------------
// Decision lists

namespace {

enum class Truth { no, yes, both };

Truth evaluate(const LinearCondition& cond, const PriceVector& p) {
  Rational lhs = 0;
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (cond.coeffs[r] != 0) lhs += cond.coeffs[r] * Rational(p.numerator(r), p.denominator());
  }
  if (lhs == cond.threshold) return Truth::both;
  bool holds = cond.op == Comparison::greater ? lhs > cond.threshold : lhs < cond.threshold;
  return holds ? Truth::yes : Truth::no;
}

RoomSet evaluate(const DecisionList& list, const PriceVector& p, std::size_t from) {
  for (std::size_t k = from; k < list.rules.size(); ++k) {
    const auto& rule = list.rules[k];
    Truth truth = Truth::yes;
    for (const auto& cond : rule.when) {
      Truth t = evaluate(cond, p);
      if (t == Truth::no) {
        truth = Truth::no;
        break;
      }
      if (t == Truth::both) truth = Truth::both;
    }
    if (truth == Truth::yes) return rule.then;
    if (truth == Truth::both) return rule.then | evaluate(list, p, k + 1);
  }
  return list.otherwise;
}

}  // namespace

PreferenceOracle decision_list_oracle(std::string agent, std::size_t rooms, DecisionList list) {
  RoomSet all = RoomSet::all(rooms);
  auto check_set = [&](RoomSet s, const std::string& where) {
    if (s.empty()) throw InputError(where + ": demand set must be nonempty");
    if (!s.subset_of(all)) throw InputError(where + ": demand set names an unknown room");
  };
  for (std::size_t k = 0; k < list.rules.size(); ++k) {
    const auto& rule = list.rules[k];
    std::string where = "rule " + std::to_string(k);
    check_set(rule.then, where);
    for (const auto& cond : rule.when) {
      if (cond.coeffs.size() != rooms) throw InputError(where + ": one coefficient per room is required");
    }
  }
  check_set(list.otherwise, "otherwise");
  return PreferenceOracle(std::move(agent), rooms,
                          [list = std::move(list)](const PriceVector& p) { return evaluate(list, p, 0); });
}

// ---------------------------------------------------------------------------
// Assumption checking

std::string to_string(AssumptionSet set) {
  switch (set) {
    case AssumptionSet::rental: return "rental";
    case AssumptionSet::cake: return "cake";
    case AssumptionSet::exchange: return "exchange";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_checkable: return "not-checkable";
  }
  return "?";
}

bool AxiomReport::passed() const {
  return std::none_of(results.begin(), results.end(),
                      [](const AxiomResult& r) { return r.verdict == Verdict::fail; });
}

const AxiomResult& AxiomReport::at(const std::string& assumption) const {
  for (const auto& r : results) {
    if (r.assumption == assumption) return r;
  }
  throw std::out_of_range("no result for assumption " + assumption);
}

namespace {

using Engine = std::mt19937_64;

std::int64_t uniform(Engine& engine, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random composition of `total` into the rooms of `positive`, each part >= 1.
PriceVector random_point(Engine& engine, std::size_t rooms, RoomSet positive) {
  auto members = positive.members();
  auto k = static_cast<std::int64_t>(members.size());
  std::int64_t total = uniform(engine, k, 12 * k + 24);
  std::vector<std::int64_t> nums(rooms, 0);
  for (auto r : members) nums[r] = 1;
  for (std::int64_t i = k; i < total; ++i) nums[members[engine() % members.size()]] += 1;
  return PriceVector(std::move(nums), total);
}

struct Recorder {
  AxiomResult result;
  template <typename Point>
  void record(bool ok, const Point& p, RoomSet demand) {
    result.checked += 1;
    if (!ok && result.verdict != Verdict::fail) {
      result.verdict = Verdict::fail;
      result.counterexample = p.coords();
      result.demand = demand;
    }
  }
};

AxiomResult closed_graph_result() {
  AxiomResult r;
  r.assumption = "A3";
  r.verdict = Verdict::not_checkable;
  r.note = "closed graph is a limit property; not checkable for black-box oracles";
  return r;
}

}  // namespace

AxiomReport check_axioms(const PreferenceOracle& oracle, AssumptionSet set, std::size_t samples,
                         std::uint64_t seed) {
  if (set == AssumptionSet::exchange) {
    throw InputError("exchange assumptions are checked on cube oracles");
  }
  const std::size_t rooms = oracle.rooms();
  Engine engine(seed);
  AxiomReport report;
  report.set = set;
  report.agent = oracle.agent();

  Recorder a1{{"A1"}};
  Recorder a2{{"A2"}};
  Recorder a2o{{"A2o"}};
  Recorder a2star{{"A2*"}};

  auto visit = [&](const PriceVector& p) {
    RoomSet demand = oracle(p);
    RoomSet free = p.free_rooms();
    a1.record(!demand.empty(), p, demand);
    if (set == AssumptionSet::rental) {
      a2.record(free.subset_of(demand), p, demand);
      a2o.record(free.empty() || demand.intersects(free), p, demand);
    } else {
      a2star.record(demand.subset_of(p.support()), p, demand);
    }
  };

  std::size_t produced = 0;
  for (std::size_t r = 0; r < rooms && produced < samples; ++r, ++produced) {
    visit(PriceVector::vertex(rooms, r));
    report.vertex_samples += 1;
  }
  RoomSet all = RoomSet::all(rooms);
  for (std::size_t k = 0; produced < samples; ++k, ++produced) {
    bool want_boundary = (k % 2 == 0) && rooms > 1;
    RoomSet positive = all;
    if (want_boundary) {
      // Random nonempty proper subset of rooms keeps positive prices.
      std::uint32_t mask = 0;
      while (mask == 0 || mask == all.bits()) mask = static_cast<std::uint32_t>(engine()) & all.bits();
      positive = RoomSet(mask);
      report.boundary_samples += 1;
    } else {
      report.interior_samples += 1;
    }
    visit(random_point(engine, rooms, positive));
  }

  report.results.push_back(a1.result);
  if (set == AssumptionSet::rental) {
    report.results.push_back(a2.result);
    report.results.push_back(a2o.result);
  } else {
    report.results.push_back(a2star.result);
  }
  report.results.push_back(closed_graph_result());
  return report;
}

AxiomReport check_axioms(const CubeOracle& oracle, std::size_t samples, std::uint64_t seed) {
  const std::size_t rooms = oracle.rooms();
  Engine engine(seed);
  AxiomReport report;
  report.set = AssumptionSet::exchange;
  report.agent = oracle.agent();
  Recorder a1p{{"A1'"}};
  Recorder a2p{{"A2'"}};

  auto visit = [&](const CubePoint& p) {
    RoomSet demand = oracle(p);
    RoomSet below_one;
    for (std::size_t r = 0; r < rooms; ++r) {
      if (p[r] < 1) below_one.insert(r);
    }
    a1p.record(below_one.empty() || !demand.empty(), p, demand);
    a2p.record(demand.subset_of(below_one), p, demand);
  };

  std::size_t produced = 0;
  const std::uint64_t corners = rooms >= 20 ? (std::uint64_t{1} << 20) : (std::uint64_t{1} << rooms);
  for (std::uint64_t c = 0; c < corners && produced < samples; ++c, ++produced) {
    std::vector<Rational> coords;
    for (std::size_t r = 0; r < rooms; ++r) coords.emplace_back(static_cast<int>((c >> r) & 1u));
    visit(CubePoint(std::move(coords)));
    report.vertex_samples += 1;
  }
  for (std::size_t k = 0; produced < samples; ++k, ++produced) {
    bool boundary = k % 2 == 0;
    std::int64_t den = uniform(engine, 2, 60);
    std::vector<Rational> coords;
    for (std::size_t r = 0; r < rooms; ++r) coords.emplace_back(uniform(engine, 1, den - 1), den);
    if (boundary) {
      // Pin a random nonempty set of coordinates to 0 or 1.
      std::uint64_t mask = 0;
      while (mask == 0) mask = engine() & ((std::uint64_t{1} << rooms) - 1);
      for (std::size_t r = 0; r < rooms; ++r) {
        if ((mask >> r) & 1u) coords[r] = Rational(static_cast<int>(engine() & 1u));
      }
      report.boundary_samples += 1;
    } else {
      report.interior_samples += 1;
    }
    visit(CubePoint(std::move(coords)));
  }
  report.results.push_back(a1p.result);
  report.results.push_back(a2p.result);
  report.results.push_back(closed_graph_result());
  return report;
}

}  // namespace harmony
