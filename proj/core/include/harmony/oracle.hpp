#pragma once

// Preference oracles: the set-valued demand map L_i(p) seen as a black box,
// the built-in families, combinators, and a sampled assumption checker.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmony/rational.hpp"
#include "harmony/room_set.hpp"
#include "harmony/simplex.hpp"

namespace harmony {

enum class Concurrency { concurrent_safe, strictly_sequential };

/// Raised when an oracle violates its contract; carries agent and price.
class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& agent, const std::string& price, const std::string& what);
  const std::string& agent() const { return agent_; }
  const std::string& price() const { return price_; }

 private:
  std::string agent_;
  std::string price_;
};

/// A demand oracle over some price domain. Queries are validated: the answer
/// must be a subset of the room set, and any exception thrown by the query is
/// rethrown as an OracleError naming the agent and the price.
template <typename Point>
class BasicOracle {
 public:
  using Query = std::function<RoomSet(const Point&)>;

  BasicOracle(std::string agent, std::size_t rooms, Query query,
              Concurrency concurrency = Concurrency::concurrent_safe)
      : agent_(std::move(agent)),
        rooms_(rooms),
        query_(std::make_shared<const Query>(std::move(query))),
        concurrency_(concurrency) {}

  RoomSet operator()(const Point& p) const {
    if (p.size() != rooms_) throw OracleError(agent_, p.to_string(), "price dimension mismatch");
    RoomSet out;
    try {
      out = (*query_)(p);
    } catch (const OracleError&) {
      throw;
    } catch (const std::exception& e) {
      throw OracleError(agent_, p.to_string(), e.what());
    }
    if (!out.subset_of(RoomSet::all(rooms_))) {
      throw OracleError(agent_, p.to_string(), "demand set names a room outside R");
    }
    return out;
  }

  const std::string& agent() const { return agent_; }
  std::size_t rooms() const { return rooms_; }
  Concurrency concurrency() const { return concurrency_; }

 private:
  std::string agent_;
  std::size_t rooms_;
  std::shared_ptr<const Query> query_;
  Concurrency concurrency_;
};

/// Oracle over the price simplex Delta(R).
using PreferenceOracle = BasicOracle<PriceVector>;
/// Oracle over the cube [0,1]^R (exchange variant).
using CubeOracle = BasicOracle<CubePoint>;

/// L(p) = argmax_r (v[r] - p[r]/c[r]), ties included. Each of the c[r] units
/// of room r costs p[r]/c[r].
PreferenceOracle quasilinear_oracle(std::string agent, std::vector<Rational> values,
                                    std::vector<int> capacities);

/// Exchange-economy counterpart: argmax of v[r] - p[r]/c[r] over the rooms with
/// p[r] < 1; empty only when every price is 1.
CubeOracle exchange_quasilinear_oracle(std::string agent, std::vector<Rational> values,
                                       std::vector<int> capacities);

/// L(p) = argmax over supp(p) of v[r] * p[r]; never contains an empty piece.
PreferenceOracle hungry_cake_oracle(std::string agent, std::vector<Rational> values);

PreferenceOracle constant_oracle(std::string agent, std::size_t rooms, RoomSet demand);

/// p -> L(p) U supp(p)^c.
PreferenceOracle free_room_closure(const PreferenceOracle& inner);

/// Memoizes answers per exact price, so repeated queries at equal prices
/// return equal sets even when the inner oracle is stateful.
PreferenceOracle cached(const PreferenceOracle& inner);

// ---------------------------------------------------------------------------
// Decision lists: ordered rules over linear price comparisons.

enum class Comparison { greater, less };

struct LinearCondition {
  std::vector<Rational> coeffs;  // one per room
  Comparison op = Comparison::greater;
  Rational threshold = 0;
};

struct DecisionRule {
  std::vector<LinearCondition> when;  // conjunction
  RoomSet then;
};

/// The first rule whose conditions hold decides. A condition evaluated exactly
/// at its threshold is ambiguous; both branches are taken and their demand
/// sets united.
struct DecisionList {
  std::vector<DecisionRule> rules;
  RoomSet otherwise;
};

/// Throws InputError on a malformed list (wrong coefficient count, empty or
/// out-of-range demand sets).
PreferenceOracle decision_list_oracle(std::string agent, std::size_t rooms, DecisionList list);

// ---------------------------------------------------------------------------
// Assumption checking by sampling.

enum class AssumptionSet { rental, cake, exchange };
enum class Verdict { pass, fail, not_checkable };

struct AxiomResult {
  std::string assumption;  // "A1", "A2", "A2o", "A2*", "A1'", "A2'", "A3"
  Verdict verdict = Verdict::pass;
  std::size_t checked = 0;
  std::optional<std::vector<Rational>> counterexample;
  RoomSet demand;
  std::string note;
};

struct AxiomReport {
  AssumptionSet set = AssumptionSet::rental;
  std::string agent;
  std::vector<AxiomResult> results;
  std::size_t vertex_samples = 0;
  std::size_t boundary_samples = 0;
  std::size_t interior_samples = 0;

  /// True when no checkable assumption failed.
  bool passed() const;
  const AxiomResult& at(const std::string& assumption) const;
};

/// Samples vertices, boundary and interior prices deterministically from the
/// seed. The closed-graph assumption is always reported not-checkable.
AxiomReport check_axioms(const PreferenceOracle& oracle, AssumptionSet set, std::size_t samples,
                         std::uint64_t seed);
AxiomReport check_axioms(const CubeOracle& oracle, std::size_t samples, std::uint64_t seed);

std::string to_string(AssumptionSet set);
std::string to_string(Verdict verdict);

}  // namespace harmony
