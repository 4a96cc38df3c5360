#include "harmony/variants.hpp"

#include <algorithm>
#include <numeric>

namespace harmony {

namespace {

RoomSet cheap_rooms(const PriceVector& q) {
  RoomSet cheap;
  auto d = static_cast<__int128>(q.size());
  for (std::size_t r = 0; r < q.size(); ++r) {
    // q[r] <= 1/|R|  <=>  |R| * numerator <= denominator
    if (d * q.numerator(r) <= q.denominator()) cheap.insert(r);
  }
  return cheap;
}

void require_capacities(std::size_t agents, std::span<const int> capacities) {
  if (capacities.empty()) throw InputError("room set must be nonempty");
  std::int64_t total = 0;
  for (int c : capacities) {
    if (c <= 0) throw InputError("capacities must be positive");
    total += c;
  }
  if (total != static_cast<std::int64_t>(agents)) {
    throw InputError("capacities sum to " + std::to_string(total) + " but there are " +
                     std::to_string(agents) + " agents");
  }
}

Assignment single_room(std::size_t agents) { return Assignment{std::vector<std::size_t>(agents, 0)}; }

}  // namespace

PreferenceOracle cake_transform(const PreferenceOracle& inner) {
  if (inner.rooms() < 2) throw DomainError("cake transform needs at least two rooms");
  return PreferenceOracle(
      inner.agent(), inner.rooms(),
      [inner](const PriceVector& q) {
        switch (classify_cake_image(q)) {
          case ImageRegion::interior: return inner(*cake_unembed(q));
          case ImageRegion::boundary: return inner(*cake_unembed(q)) | cheap_rooms(q);
          case ImageRegion::outside: break;
        }
        return cheap_rooms(q);
      },
      inner.concurrency());
}

Solution solve_cake(const CakeProblem& problem, const SolverConfig& config) {
  config.validate();
  const auto& oracles = problem.oracles;
  require_capacities(oracles.size(), problem.capacities);
  const std::size_t rooms = problem.capacities.size();

  if (rooms == 1) {
    Solution s;
    s.status = SolveStatus::exact;
    s.prices = PriceVector::vertex(1, 0);
    s.assignment = single_room(oracles.size());
    for (const auto& o : oracles) s.demand.push_back(o(s.prices));
    if (!verify_envy_free(s, oracles, problem.capacities).ok) {
      throw PropertyViolation("an agent does not demand the whole cake");
    }
    return s;
  }

  std::vector<PreferenceOracle> transformed;
  for (const auto& o : oracles) transformed.push_back(cake_transform(o));
  SolverConfig inner_config = config;
  // phi^-1 stretches lengths by |R|-1.
  inner_config.epsilon = config.epsilon / static_cast<long>(rooms - 1);
  inner_config.accept_cell = [user = config.accept_cell](const std::vector<PriceVector>& verts) {
    std::vector<Rational> mean(verts.front().size(), Rational(0));
    for (const auto& v : verts) {
      if (!cake_unembed(v)) return false;
      for (std::size_t r = 0; r < mean.size(); ++r) mean[r] += v[r];
    }
    for (auto& c : mean) c /= static_cast<long>(verts.size());
    if (classify_cake_image(PriceVector::from_rationals(mean)) != ImageRegion::interior) return false;
    if (!user) return true;
    std::vector<PriceVector> back;
    for (const auto& v : verts) back.push_back(*cake_unembed(v));
    return user(back);
  };
  Solution inner = solve_rental(transformed, problem.capacities, inner_config);

  Solution out;
  out.status = inner.status;
  out.assignment = inner.assignment;
  out.stats = inner.stats;

  if (inner.status == SolveStatus::exact) {
    if (classify_cake_image(inner.prices) != ImageRegion::interior) {
      throw PropertyViolation("envy-free price " + inner.prices.to_string() +
                              " is not interior to the embedded simplex; an oracle demands an empty piece");
    }
    out.prices = *cake_unembed(inner.prices);
    for (const auto& o : oracles) out.demand.push_back(o(out.prices));
    VerifyReport check = verify_envy_free(out, oracles, problem.capacities);
    if (!check.ok) throw PropertyViolation("cake solution fails against the original oracles: " + check.message);
    return out;
  }

  if (inner.status == SolveStatus::eps) {
    if (classify_cake_image(inner.prices) != ImageRegion::interior) {
      throw PropertyViolation("certificate cell barycenter is not interior to the embedded simplex");
    }
    CellCertificate cert;
    for (const auto& v : inner.cell->vertices) {
      auto back = cake_unembed(v);
      if (!back) throw PropertyViolation("certificate cell leaves the embedded simplex");
      cert.vertices.push_back(*back);
    }
    cert.squared_diameter = inner.cell->squared_diameter * static_cast<long>((rooms - 1) * (rooms - 1));
    // A witness on the image boundary may owe its room to the cheap-room
    // branch; use the first vertex where the original oracle agrees.
    for (std::size_t i = 0; i < oracles.size(); ++i) {
      std::size_t room = out.assignment.room_of[i];
      std::optional<std::size_t> found;
      for (std::size_t k = 0; k < cert.vertices.size() && !found; ++k) {
        if (oracles[i](cert.vertices[k]).contains(room)) found = k;
      }
      if (!found) {
        throw PropertyViolation("no vertex of the certificate cell supports agent '" + oracles[i].agent() +
                                "' in the original coordinates");
      }
      cert.witness.push_back(*found);
    }
    out.prices = *cake_unembed(inner.prices);
    out.cell = std::move(cert);
    return out;
  }

  out.prices = inner.prices;
  if (auto back = cake_unembed(inner.prices)) out.prices = *back;
  return out;
}

PreferenceOracle exchange_transform(const CubeOracle& inner) {
  return PreferenceOracle(
      inner.agent(), inner.rooms(), [inner](const PriceVector& q) { return inner(simplex_to_cube(q)); },
      inner.concurrency());
}

ExchangeSolution solve_exchange(const ExchangeProblem& problem, const SolverConfig& config) {
  require_capacities(problem.oracles.size(), problem.capacities);
  CakeProblem cake;
  cake.capacities = problem.capacities;
  for (const auto& o : problem.oracles) cake.oracles.push_back(exchange_transform(o));
  Solution inner = solve_cake(cake, config);

  ExchangeSolution out;
  out.status = inner.status;
  out.assignment = inner.assignment;
  out.prices = simplex_to_cube(inner.prices);

  if (inner.status == SolveStatus::exact) {
    for (const auto& o : problem.oracles) out.demand.push_back(o(out.prices));
    VerifyReport check = verify_exchange(out, problem.oracles, problem.capacities);
    if (!check.ok) throw PropertyViolation("exchange solution fails against the original oracles: " + check.message);
  } else if (inner.status == SolveStatus::eps) {
    ExchangeCell cell;
    for (const auto& v : inner.cell->vertices) cell.vertices.push_back(simplex_to_cube(v));
    cell.witness = inner.cell->witness;
    out.cell = std::move(cell);
    VerifyReport check = check_exchange_certificate(out, problem.oracles, problem.capacities);
    if (!check.ok) throw PropertyViolation("exchange certificate fails against the original oracles: " + check.message);
  }
  out.simplex_solution = std::move(inner);
  return out;
}

namespace {

VerifyReport check_prices(const CubePoint& prices, const Assignment& assignment,
                          std::span<const int> capacities, std::size_t agents) {
  VerifyReport report;
  if (assignment.room_of.size() != agents || !assignment.respects(capacities)) {
    report.message = "assignment does not fill every room to capacity";
    return report;
  }
  if (!prices.in_slice()) {
    report.message = "no room is priced 0";
    return report;
  }
  for (std::size_t i = 0; i < agents; ++i) {
    if (prices[assignment.room_of[i]] == 1) report.offending_agents.push_back(i);
  }
  if (!report.offending_agents.empty()) {
    report.message = "an agent is assigned a room priced 1";
    return report;
  }
  report.ok = true;
  return report;
}

}  // namespace

VerifyReport verify_exchange(const ExchangeSolution& solution, std::span<const CubeOracle> oracles,
                             std::span<const int> capacities) {
  if (solution.status != SolveStatus::exact) return VerifyReport{false, {}, "solution is not exact"};
  VerifyReport report = check_prices(solution.prices, solution.assignment, capacities, oracles.size());
  if (!report.ok) return report;
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    if (!oracles[i](solution.prices).contains(solution.assignment.room_of[i])) {
      report.offending_agents.push_back(i);
    }
  }
  report.ok = report.offending_agents.empty();
  if (!report.ok) {
    report.message = "agent '" + oracles[report.offending_agents.front()].agent() +
                     "' does not demand its assigned room";
  }
  return report;
}

VerifyReport check_exchange_certificate(const ExchangeSolution& solution,
                                        std::span<const CubeOracle> oracles,
                                        std::span<const int> capacities) {
  if (solution.status != SolveStatus::eps || !solution.cell) {
    return VerifyReport{false, {}, "solution carries no cell certificate"};
  }
  VerifyReport report = check_prices(solution.prices, solution.assignment, capacities, oracles.size());
  if (!report.ok) return report;
  const ExchangeCell& cell = *solution.cell;
  if (cell.witness.size() != oracles.size()) return VerifyReport{false, {}, "certificate lacks a witness per agent"};
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    std::size_t k = cell.witness[i];
    if (k >= cell.vertices.size() || !cell.vertices[k].in_slice() ||
        !oracles[i](cell.vertices[k]).contains(solution.assignment.room_of[i])) {
      report.offending_agents.push_back(i);
    }
  }
  report.ok = report.offending_agents.empty();
  if (!report.ok) {
    report.message = "witness vertex for agent '" + oracles[report.offending_agents.front()].agent() +
                     "' does not demand the assigned room";
  }
  return report;
}

}  // namespace harmony
