#include "harmony_tools/solution.hpp"

#include <set>

#include "json_reader.hpp"

namespace harmony::service {

using detail::Node;

std::string decimal_string(const Rational& value, int digits) {
  BigInt scale = 1;
  for (int k = 0; k < digits; ++k) scale *= 10;
  bool negative = value < 0;
  Rational mag = negative ? Rational(-value) : value;
  BigInt num = numerator_of(mag) * scale;
  BigInt den = denominator_of(mag);
  BigInt q = num / den;
  BigInt rem = num - q * den;
  if (rem * 2 >= den) q += 1;
  BigInt whole = q / scale;
  BigInt frac = q - whole * scale;
  std::string out = (negative && q != 0 ? "-" : "") + whole.str();
  if (frac != 0) {
    std::string f = frac.str();
    f.insert(0, static_cast<std::size_t>(digits) - f.size(), '0');
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

Json rational_json(const Rational& value) {
  Json j;
  j["rational"] = to_string(value);
  j["decimal"] = decimal_string(value);
  return j;
}

std::string render(const Json& json) { return json.dump(2) + "\n"; }

void record_config(SolutionDoc& doc, const SolverConfig& config) {
  doc.mesh_start = config.mesh_start;
  doc.epsilon = config.epsilon;
  doc.max_doublings = config.max_doublings;
  doc.beam = config.beam;
  doc.seed = config.seed;
  doc.offset = config.offset;
  doc.vertex_budget = config.vertex_budget;
}

namespace {

SolutionDoc skeleton(const ProblemSpec& spec, const BuiltProblem& built) {
  SolutionDoc doc;
  doc.variant = spec.variant;
  doc.rooms = spec.rooms;
  for (const auto& a : spec.agents) doc.agents.push_back(a.name);
  std::size_t total = built.variant == Variant::exchange ? built.cube_oracles.size() : built.simplex_oracles.size();
  doc.dummy_agents = total - built.real_agents;
  for (std::size_t k = 0; k < doc.dummy_agents; ++k) doc.agents.push_back("dummy " + std::to_string(k + 1));
  return doc;
}

std::vector<std::vector<Rational>> coords_of(const std::vector<PriceVector>& points) {
  std::vector<std::vector<Rational>> out;
  for (const auto& p : points) out.push_back(p.coords());
  return out;
}

}  // namespace

SolutionDoc make_solution_doc(const ProblemSpec& spec, const BuiltProblem& built, const Solution& sol) {
  SolutionDoc doc = skeleton(spec, built);
  doc.status = sol.status;
  doc.prices = sol.prices.coords();
  if (sol.status != SolveStatus::failed) doc.assignment = sol.assignment.room_of;
  doc.demand = sol.demand;
  if (sol.cell) {
    SolutionDoc::Certificate cert;
    cert.vertices = coords_of(sol.cell->vertices);
    if (sol.status == SolveStatus::eps) cert.witness = sol.cell->witness;
    cert.squared_diameter = sol.cell->squared_diameter;
    doc.certificate = std::move(cert);
  }
  doc.stats = sol.stats;
  return doc;
}

SolutionDoc make_solution_doc(const ProblemSpec& spec, const BuiltProblem& built, const ExchangeSolution& sol) {
  SolutionDoc doc = skeleton(spec, built);
  doc.status = sol.status;
  doc.prices = sol.prices.coords();
  if (sol.status != SolveStatus::failed) doc.assignment = sol.assignment.room_of;
  doc.demand = sol.demand;
  if (sol.cell) {
    SolutionDoc::Certificate cert;
    for (const auto& v : sol.cell->vertices) cert.vertices.push_back(v.coords());
    cert.witness = sol.cell->witness;
    // Diameter of the simplex-side cell the certificate was mapped from.
    if (sol.simplex_solution.cell) cert.squared_diameter = sol.simplex_solution.cell->squared_diameter;
    doc.certificate = std::move(cert);
  }
  doc.stats = sol.simplex_solution.stats;
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

Json room_list(const SolutionDoc& doc, RoomSet set) {
  Json out = Json::array();
  for (auto r : set.members()) out.push_back(doc.rooms[r].name);
  return out;
}

Json point_json(const std::vector<Rational>& coords) {
  Json out = Json::array();
  for (const auto& c : coords) out.push_back(rational_json(c));
  return out;
}

}  // namespace

Json solution_to_json(const SolutionDoc& doc) {
  Json j;
  j["format"] = kSolutionFormat;
  j["variant"] = to_string(doc.variant);
  j["status"] = to_string(doc.status);
  j["rooms"] = Json::array();
  for (const auto& r : doc.rooms) j["rooms"].push_back({{"name", r.name}, {"capacity", r.capacity}});

  j["prices"] = Json::array();
  for (std::size_t r = 0; r < doc.prices.size(); ++r) {
    Json p = rational_json(doc.prices[r]);
    Json entry;
    entry["room"] = doc.rooms[r].name;
    entry["rational"] = p["rational"];
    entry["decimal"] = p["decimal"];
    entry["per_unit"] = rational_json(doc.prices[r] / doc.rooms[r].capacity);
    j["prices"].push_back(entry);
  }

  j["assignment"] = Json::array();
  for (std::size_t i = 0; i < doc.assignment.size(); ++i) {
    Json a;
    a["agent"] = doc.agents[i];
    a["room"] = doc.rooms[doc.assignment[i]].name;
    if (i >= doc.real_agents()) a["dummy"] = true;
    j["assignment"].push_back(a);
  }

  if (!doc.demand.empty()) {
    j["demand"] = Json::array();
    for (std::size_t i = 0; i < doc.demand.size(); ++i) {
      j["demand"].push_back({{"agent", doc.agents[i]}, {"rooms", room_list(doc, doc.demand[i])}});
    }
  }

  if (doc.certificate) {
    const auto& c = *doc.certificate;
    Json cert;
    cert["squared_diameter"] = rational_json(c.squared_diameter);
    cert["vertices"] = Json::array();
    for (const auto& v : c.vertices) cert["vertices"].push_back(point_json(v));
    if (!c.witness.empty()) {
      cert["witness"] = Json::array();
      for (std::size_t i = 0; i < c.witness.size(); ++i) {
        cert["witness"].push_back({{"agent", doc.agents[i]}, {"vertex", c.witness[i]}});
      }
    }
    j["certificate"] = cert;
  }

  Json solver;
  solver["mesh_start"] = doc.mesh_start;
  solver["epsilon"] = to_string(doc.epsilon);
  solver["max_doublings"] = doc.max_doublings;
  solver["beam"] = doc.beam;
  solver["seed"] = doc.seed;
  solver["offset"] = doc.offset;
  solver["vertex_budget"] = doc.vertex_budget;
  j["solver"] = solver;

  Json stats;
  stats["oracle_queries"] = doc.stats.oracle_queries;
  stats["vertices_evaluated"] = doc.stats.vertices_evaluated;
  stats["cells_visited"] = doc.stats.cells_visited;
  stats["levels"] = doc.stats.levels;
  stats["final_mesh"] = doc.stats.final_mesh;
  j["stats"] = stats;
  return j;
}

namespace {

SolveStatus parse_status(const Node& node) {
  std::string s = node.string();
  if (s == "exact") return SolveStatus::exact;
  if (s == "eps") return SolveStatus::eps;
  if (s == "failed") return SolveStatus::failed;
  node.fail("expected \"exact\", \"eps\" or \"failed\"");
}

/// Reads {"rational": ..., "decimal": ...}; the decimal must be the rendering
/// of the rational.
Rational parse_rational_json(const Node& node, std::initializer_list<const char*> extra = {}) {
  node.require_object();
  for (const auto& [key, _] : node.value().items()) {
    bool ok = key == "rational" || key == "decimal";
    for (const char* e : extra) ok = ok || key == e;
    if (!ok) Node(node.value(), node.pointer() + "/" + detail::escape_token(key)).fail("unknown property");
  }
  Node r = node.at("rational");
  if (!r.value().is_string()) r.fail("expected a rational string");
  Rational v = r.rational();
  if (node.has("decimal")) {
    Node d = node.at("decimal");
    if (d.string() != decimal_string(v)) d.fail("decimal rendering does not match the rational");
  }
  return v;
}

std::size_t index_of(const Node& node, const std::vector<std::string>& names, const std::string& what) {
  std::string name = node.string();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return k;
  }
  node.fail("unknown " + what + " '" + name + "'");
}

std::uint64_t count(const Node& node) { return static_cast<std::uint64_t>(node.integer(0)); }

}  // namespace

SolutionDoc parse_solution(const Json& json) {
  Node root(json, "");
  root.only({"format", "variant", "status", "rooms", "prices", "assignment", "demand", "certificate", "solver",
             "stats"});
  Node format = root.at("format");
  if (format.string() != kSolutionFormat) format.fail(std::string("expected \"") + kSolutionFormat + "\"");
  SolutionDoc doc;
  Node variant = root.at("variant");
  try {
    doc.variant = parse_variant(variant.string());
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    variant.fail(e.what());
  }
  doc.status = parse_status(root.at("status"));

  Node rooms = root.at("rooms");
  rooms.require_array(1);
  std::vector<std::string> room_names;
  for (std::size_t k = 0; k < rooms.size(); ++k) {
    Node room = rooms.at(k);
    room.only({"name", "capacity"});
    RoomSpec r{room.at("name").string(), static_cast<int>(room.at("capacity").integer(1, 1 << 20))};
    room_names.push_back(r.name);
    doc.rooms.push_back(std::move(r));
  }

  Node prices = root.at("prices");
  prices.require_array();
  if (prices.size() != doc.rooms.size()) prices.fail("expected one price per room");
  for (std::size_t k = 0; k < prices.size(); ++k) {
    Node p = prices.at(k);
    if (p.at("room").string() != doc.rooms[k].name) p.at("room").fail("prices must follow room order");
    Rational v = parse_rational_json(p, {"room", "per_unit"});
    if (p.has("per_unit") && parse_rational_json(p.at("per_unit")) != v / doc.rooms[k].capacity) {
      p.at("per_unit").fail("per-unit price does not match price / capacity");
    }
    doc.prices.push_back(v);
  }

  Node assignment = root.at("assignment");
  assignment.require_array();
  std::set<std::string> seen;
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    Node a = assignment.at(k);
    a.only({"agent", "room", "dummy"});
    std::string agent = a.at("agent").string();
    if (!seen.insert(agent).second) a.at("agent").fail("duplicate agent '" + agent + "'");
    bool dummy = a.has("dummy") && a.at("dummy").boolean();
    if (dummy) {
      doc.dummy_agents += 1;
    } else if (doc.dummy_agents > 0) {
      a.fail("dummy agents must come last");
    }
    doc.agents.push_back(agent);
    doc.assignment.push_back(index_of(a.at("room"), room_names, "room"));
  }

  if (root.has("demand")) {
    Node demand = root.at("demand");
    demand.require_array();
    for (std::size_t k = 0; k < demand.size(); ++k) {
      Node d = demand.at(k);
      d.only({"agent", "rooms"});
      if (k >= doc.agents.size() || d.at("agent").string() != doc.agents[k]) {
        d.at("agent").fail("demand entries must follow assignment order");
      }
      Node list = d.at("rooms");
      list.require_array();
      RoomSet set;
      for (std::size_t r = 0; r < list.size(); ++r) set.insert(index_of(list.at(r), room_names, "room"));
      doc.demand.push_back(set);
    }
  }

  if (root.has("certificate")) {
    Node c = root.at("certificate");
    c.only({"squared_diameter", "vertices", "witness"});
    SolutionDoc::Certificate cert;
    cert.squared_diameter = parse_rational_json(c.at("squared_diameter"));
    Node vertices = c.at("vertices");
    vertices.require_array(1);
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      Node v = vertices.at(k);
      v.require_array();
      if (v.size() != doc.rooms.size()) v.fail("expected one coordinate per room");
      std::vector<Rational> coords;
      for (std::size_t r = 0; r < v.size(); ++r) coords.push_back(parse_rational_json(v.at(r)));
      cert.vertices.push_back(std::move(coords));
    }
    if (c.has("witness")) {
      Node w = c.at("witness");
      w.require_array();
      for (std::size_t k = 0; k < w.size(); ++k) {
        Node item = w.at(k);
        item.only({"agent", "vertex"});
        if (k >= doc.agents.size() || item.at("agent").string() != doc.agents[k]) {
          item.at("agent").fail("witness entries must follow assignment order");
        }
        cert.witness.push_back(
            static_cast<std::size_t>(item.at("vertex").integer(0, static_cast<std::int64_t>(cert.vertices.size()) - 1)));
      }
    }
    doc.certificate = std::move(cert);
  }

  Node solver = root.at("solver");
  solver.only({"mesh_start", "epsilon", "max_doublings", "beam", "seed", "offset", "vertex_budget"});
  doc.mesh_start = solver.at("mesh_start").integer(1);
  doc.epsilon = solver.at("epsilon").rational();
  doc.max_doublings = static_cast<int>(solver.at("max_doublings").integer(0, 40));
  doc.beam = static_cast<std::size_t>(solver.at("beam").integer(1));
  doc.seed = count(solver.at("seed"));
  doc.offset = solver.at("offset").boolean();
  doc.vertex_budget = static_cast<std::size_t>(solver.at("vertex_budget").integer(1));

  Node stats = root.at("stats");
  stats.only({"oracle_queries", "vertices_evaluated", "cells_visited", "levels", "final_mesh"});
  doc.stats.oracle_queries = count(stats.at("oracle_queries"));
  doc.stats.vertices_evaluated = count(stats.at("vertices_evaluated"));
  doc.stats.cells_visited = count(stats.at("cells_visited"));
  doc.stats.levels = count(stats.at("levels"));
  doc.stats.final_mesh = stats.at("final_mesh").integer(0);
  return doc;
}

}  // namespace harmony::service
