#include "harmony_tools/commands.hpp"

#include <spdlog/spdlog.h>

namespace harmony::service {

SolverConfig effective_config(const ProblemSpec& spec, const SolverOverrides& flags) {
  SolverConfig config;
  spec.solver.apply(config);
  flags.apply(config);
  config.validate();
  return config;
}

SolutionDoc solve_problem(const ProblemSpec& spec, const SolverConfig& config) {
  return solve_problem(spec, config, InteractiveQuery{});
}

SolutionDoc solve_problem(const ProblemSpec& spec, const SolverConfig& config, const InteractiveQuery& interactive) {
  BuiltProblem built = build_problem(spec, interactive);
  SolverConfig run = config;
  if (!run.on_progress) {
    run.on_progress = [](const SolverProgress& p) {
      spdlog::debug("level {} mesh {} cells {} queries {}", p.level, p.mesh, p.cells, p.queries);
    };
  }
  spdlog::info("solving {} problem: {} rooms, {} agents", to_string(spec.variant), spec.rooms.size(),
               spec.agents.size());
  SolutionDoc doc;
  switch (spec.variant) {
    case Variant::rental:
      doc = make_solution_doc(spec, built, solve_rental(built.simplex_oracles, built.capacities, run));
      break;
    case Variant::cake:
      doc = make_solution_doc(spec, built, solve_cake(CakeProblem{built.simplex_oracles, built.capacities}, run));
      break;
    case Variant::exchange:
      doc = make_solution_doc(spec, built,
                              solve_exchange(ExchangeProblem{built.cube_oracles, built.capacities}, run));
      break;
  }
  record_config(doc, config);
  spdlog::info("status {} after {} vertices", to_string(doc.status), doc.stats.vertices_evaluated);
  return doc;
}

namespace {

VerifyOutcome mismatch(const std::string& what) { return {kUsage, "solution does not match the problem: " + what}; }

std::optional<VerifyOutcome> check_shape(const SolutionDoc& doc, const ProblemSpec& spec) {
  if (doc.variant != spec.variant) return mismatch("variant differs");
  if (doc.rooms.size() != spec.rooms.size()) return mismatch("room count differs");
  for (std::size_t r = 0; r < spec.rooms.size(); ++r) {
    if (doc.rooms[r].name != spec.rooms[r].name || doc.rooms[r].capacity != spec.rooms[r].capacity) {
      return mismatch("room '" + spec.rooms[r].name + "' differs");
    }
  }
  if (doc.status == SolveStatus::failed) return std::nullopt;
  if (doc.real_agents() != spec.agents.size() || doc.dummy_agents != spec.surplus()) {
    return mismatch("agent count differs");
  }
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    if (doc.agents[i] != spec.agents[i].name) return mismatch("agent '" + spec.agents[i].name + "' differs");
  }
  return std::nullopt;
}

Assignment assignment_of(const SolutionDoc& doc) { return Assignment{doc.assignment}; }

VerifyOutcome from_report(const VerifyReport& report, const SolutionDoc& doc, int ok_code, int bad_code) {
  if (report.ok) return {ok_code, ""};
  std::string message = report.message;
  if (!report.offending_agents.empty()) {
    message += " (agents:";
    for (auto i : report.offending_agents) message += " '" + doc.agents[i] + "'";
    message += ")";
  }
  return {bad_code, message};
}

Rational max_squared_distance(const std::vector<PriceVector>& points) {
  Rational best = 0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      Rational s = 0;
      for (std::size_t r = 0; r < points[a].size(); ++r) {
        Rational diff = points[a][r] - points[b][r];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  }
  return best;
}

VerifyOutcome verify_simplex(const SolutionDoc& doc, const BuiltProblem& built) {
  Solution sol;
  sol.status = doc.status;
  sol.prices = PriceVector::from_rationals(doc.prices);
  sol.assignment = assignment_of(doc);
  if (doc.status == SolveStatus::exact) {
    return from_report(verify_envy_free(sol, built.simplex_oracles, built.capacities), doc, kOk, kEnvyFailure);
  }
  if (!doc.certificate) return {kCertificateInvalid, "eps solution without a certificate"};
  CellCertificate cert;
  for (const auto& v : doc.certificate->vertices) cert.vertices.push_back(PriceVector::from_rationals(v));
  cert.witness = doc.certificate->witness;
  cert.squared_diameter = doc.certificate->squared_diameter;
  sol.cell = std::move(cert);
  return from_report(check_cell_certificate(sol, built.simplex_oracles, built.capacities, doc.epsilon), doc,
                     kCertificateValid, kCertificateInvalid);
}

VerifyOutcome verify_cube(const SolutionDoc& doc, const BuiltProblem& built) {
  ExchangeSolution sol;
  sol.status = doc.status;
  sol.prices = CubePoint(doc.prices);
  sol.assignment = assignment_of(doc);
  if (doc.status == SolveStatus::exact) {
    return from_report(verify_exchange(sol, built.cube_oracles, built.capacities), doc, kOk, kEnvyFailure);
  }
  if (!doc.certificate) return {kCertificateInvalid, "eps solution without a certificate"};
  ExchangeCell cell;
  std::vector<PriceVector> simplex_vertices;
  for (const auto& v : doc.certificate->vertices) {
    CubePoint p(v);
    if (!p.in_slice()) return {kCertificateInvalid, "certificate vertex has no zero price"};
    simplex_vertices.push_back(cube_to_simplex(p));
    cell.vertices.push_back(std::move(p));
  }
  cell.witness = doc.certificate->witness;
  sol.cell = std::move(cell);
  Rational diam = max_squared_distance(simplex_vertices);
  if (diam != doc.certificate->squared_diameter) return {kCertificateInvalid, "reported diameter does not match the cell"};
  if (diam > doc.epsilon * doc.epsilon) return {kCertificateInvalid, "cell diameter exceeds epsilon"};
  std::vector<Rational> mean(doc.prices.size(), Rational(0));
  for (const auto& v : simplex_vertices) {
    for (std::size_t r = 0; r < mean.size(); ++r) mean[r] += v[r];
  }
  for (auto& m : mean) m /= static_cast<long>(simplex_vertices.size());
  if (simplex_to_cube(PriceVector::from_rationals(mean)) != sol.prices) {
    return {kCertificateInvalid, "prices are not the image of the cell barycenter"};
  }
  return from_report(check_exchange_certificate(sol, built.cube_oracles, built.capacities), doc,
                     kCertificateValid, kCertificateInvalid);
}

}  // namespace

VerifyOutcome verify_solution(const SolutionDoc& doc, const ProblemSpec& spec) {
  if (auto bad = check_shape(doc, spec)) return *bad;
  if (doc.status == SolveStatus::failed) return {kFailedSolution, "solver reported status failed"};
  if (spec.has_interactive()) {
    return {kNotVerifiable, "problem has interactive agents; their answers cannot be replayed"};
  }
  BuiltProblem built = build_problem(spec);
  try {
    return spec.variant == Variant::exchange ? verify_cube(doc, built) : verify_simplex(doc, built);
  } catch (const InputError& e) {
    return {kUsage, e.what()};
  }
}

// ---------------------------------------------------------------------------

namespace {

Json axiom_json(const AxiomReport& report, const ProblemSpec& spec) {
  Json agent;
  agent["agent"] = report.agent;
  agent["passed"] = report.passed();
  agent["samples"] = {{"vertex", report.vertex_samples},
                      {"boundary", report.boundary_samples},
                      {"interior", report.interior_samples}};
  agent["results"] = Json::array();
  for (const auto& r : report.results) {
    Json j;
    j["assumption"] = r.assumption;
    j["verdict"] = to_string(r.verdict);
    j["checked"] = r.checked;
    if (r.counterexample) {
      j["counterexample"] = Json::array();
      for (std::size_t k = 0; k < r.counterexample->size(); ++k) {
        Json c = rational_json((*r.counterexample)[k]);
        c["room"] = spec.rooms[k].name;
        j["counterexample"].push_back(c);
      }
      j["demand"] = Json::array();
      for (auto room : r.demand.members()) j["demand"].push_back(spec.rooms[room].name);
    }
    if (!r.note.empty()) j["note"] = r.note;
    agent["results"].push_back(j);
  }
  return agent;
}

}  // namespace

Json check_oracles(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
  InteractiveQuery unavailable = [](std::size_t, const std::vector<Rational>&) -> RoomSet {
    throw InputError("interactive agents are not sampled");
  };
  BuiltProblem built = build_problem(spec, unavailable);
  Json report;
  report["format"] = kReportFormat;
  report["variant"] = to_string(spec.variant);
  report["free_room_closure"] = spec.free_room_closure;
  report["samples"] = samples;
  report["seed"] = seed;
  report["agents"] = Json::array();
  bool passed = true;
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    if (spec.agents[i].oracle.family == "interactive") {
      report["agents"].push_back(
          {{"agent", spec.agents[i].name}, {"passed", true}, {"skipped", "interactive agents are not sampled"}});
      continue;
    }
    AxiomReport r;
    switch (spec.variant) {
      case Variant::rental: r = check_axioms(built.simplex_oracles[i], AssumptionSet::rental, samples, seed); break;
      case Variant::cake: r = check_axioms(built.simplex_oracles[i], AssumptionSet::cake, samples, seed); break;
      case Variant::exchange: r = check_axioms(built.cube_oracles[i], samples, seed); break;
    }
    passed = passed && r.passed();
    report["agents"].push_back(axiom_json(r, spec));
  }
  report["passed"] = passed;
  return report;
}

}  // namespace harmony::service
