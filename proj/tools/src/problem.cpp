#include "harmony_tools/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_reader.hpp"

namespace harmony::service {

using detail::Node;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::rental: return "rental";
    case Variant::cake: return "cake";
    case Variant::exchange: return "exchange";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "rental") return Variant::rental;
  if (text == "cake") return Variant::cake;
  if (text == "exchange") return Variant::exchange;
  throw InputError("unknown variant '" + text + "' (expected rental, cake or exchange)");
}

void SolverOverrides::apply(SolverConfig& config) const {
  if (mesh_start) config.mesh_start = *mesh_start;
  if (epsilon) config.epsilon = *epsilon;
  if (max_doublings) config.max_doublings = *max_doublings;
  if (beam) config.beam = *beam;
  if (seed) config.seed = *seed;
  if (offset) config.offset = *offset;
  if (vertex_budget) config.vertex_budget = *vertex_budget;
  if (threads) config.threads = *threads;
}

std::vector<int> ProblemSpec::capacities() const {
  std::vector<int> out;
  for (const auto& r : rooms) out.push_back(r.capacity);
  return out;
}

std::size_t ProblemSpec::room_index(const std::string& name) const {
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    if (rooms[r].name == name) return r;
  }
  throw InputError("unknown room '" + name + "'");
}

bool ProblemSpec::has_interactive() const {
  for (const auto& a : agents) {
    if (a.oracle.family == "interactive") return true;
  }
  return false;
}

std::size_t ProblemSpec::surplus() const {
  std::size_t total = 0;
  for (const auto& r : rooms) total += static_cast<std::size_t>(r.capacity);
  return total > agents.size() ? total - agents.size() : 0;
}

namespace {

RoomSet parse_room_names(const Node& node, const ProblemSpec& spec, std::size_t min_items) {
  node.require_array(min_items);
  RoomSet out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    Node item = node.at(k);
    std::string name = item.string();
    std::size_t r = 0;
    try {
      r = spec.room_index(name);
    } catch (const InputError&) {
      item.fail("unknown room '" + name + "'");
    }
    out.insert(r);
  }
  return out;
}

std::vector<Rational> parse_values(const Node& node, std::size_t rooms) {
  node.require_array();
  if (node.size() != rooms) node.fail("expected one value per room (" + std::to_string(rooms) + ")");
  std::vector<Rational> out;
  for (std::size_t k = 0; k < rooms; ++k) out.push_back(node.at(k).rational());
  return out;
}

LinearCondition parse_condition(const Node& node, const ProblemSpec& spec) {
  node.only({"coeffs", "op", "threshold"});
  LinearCondition cond;
  cond.coeffs.assign(spec.rooms.size(), Rational(0));
  Node coeffs = node.at("coeffs");
  coeffs.require_object();
  for (const auto& [room, _] : coeffs.value().items()) {
    Node c = coeffs.at(room);
    std::size_t r = 0;
    try {
      r = spec.room_index(room);
    } catch (const InputError&) {
      c.fail("unknown room '" + room + "'");
    }
    cond.coeffs[r] = c.rational();
  }
  Node op = node.at("op");
  std::string text = op.string();
  if (text == ">") cond.op = Comparison::greater;
  else if (text == "<") cond.op = Comparison::less;
  else op.fail("expected \">\" or \"<\"");
  cond.threshold = node.at("threshold").rational();
  return cond;
}

OracleSpec parse_oracle(const Node& node, const ProblemSpec& spec) {
  node.require_object();
  OracleSpec o;
  Node family = node.at("family");
  o.family = family.string();
  const std::size_t rooms = spec.rooms.size();
  if (o.family == "quasilinear") {
    node.only({"family", "values"});
    o.values = parse_values(node.at("values"), rooms);
  } else if (o.family == "hungry-cake") {
    node.only({"family", "values"});
    o.values = parse_values(node.at("values"), rooms);
    for (std::size_t r = 0; r < rooms; ++r) {
      if (o.values[r] <= 0) node.at("values").at(r).fail("hungry-cake values must be positive");
    }
  } else if (o.family == "decision-list") {
    node.only({"family", "rules", "otherwise"});
    Node rules = node.at("rules");
    rules.require_array();
    for (std::size_t k = 0; k < rules.size(); ++k) {
      Node rule = rules.at(k);
      rule.only({"when", "then"});
      DecisionRule dr;
      Node when = rule.at("when");
      when.require_array(1);
      for (std::size_t c = 0; c < when.size(); ++c) dr.when.push_back(parse_condition(when.at(c), spec));
      dr.then = parse_room_names(rule.at("then"), spec, 1);
      o.list.rules.push_back(std::move(dr));
    }
    o.list.otherwise = parse_room_names(node.at("otherwise"), spec, 1);
  } else if (o.family == "constant") {
    node.only({"family", "rooms"});
    o.rooms = parse_room_names(node.at("rooms"), spec, 0);
  } else if (o.family == "interactive") {
    node.only({"family"});
  } else {
    family.fail("unknown oracle family '" + o.family +
                "' (expected quasilinear, hungry-cake, decision-list, constant or interactive)");
  }
  if (spec.variant == Variant::exchange && (o.family == "hungry-cake" || o.family == "decision-list")) {
    family.fail("family '" + o.family + "' is not available for the exchange variant");
  }
  return o;
}

SolverOverrides parse_solver(const Node& node) {
  node.only({"mesh_start", "epsilon", "max_doublings", "beam", "seed", "offset", "vertex_budget", "threads"});
  SolverOverrides s;
  if (node.has("mesh_start")) s.mesh_start = node.at("mesh_start").integer(1, 1 << 20);
  if (node.has("epsilon")) {
    Node e = node.at("epsilon");
    s.epsilon = e.rational();
    if (*s.epsilon <= 0) e.fail("epsilon must be positive");
  }
  if (node.has("max_doublings")) s.max_doublings = static_cast<int>(node.at("max_doublings").integer(0, 40));
  if (node.has("beam")) s.beam = static_cast<std::size_t>(node.at("beam").integer(1, 1 << 20));
  if (node.has("seed")) s.seed = static_cast<std::uint64_t>(node.at("seed").integer(0));
  if (node.has("offset")) s.offset = node.at("offset").boolean();
  if (node.has("vertex_budget")) s.vertex_budget = static_cast<std::size_t>(node.at("vertex_budget").integer(1));
  if (node.has("threads")) s.threads = static_cast<unsigned>(node.at("threads").integer(0, 1024));
  return s;
}

}  // namespace

ProblemSpec parse_problem(const Json& doc) {
  Node root(doc, "");
  root.only({"format", "variant", "rooms", "agents", "free_room_closure", "allow_surplus", "solver", "note"});
  ProblemSpec spec;
  if (root.has("format")) {
    Node f = root.at("format");
    if (f.string() != kProblemFormat) f.fail(std::string("expected \"") + kProblemFormat + "\"");
  }
  Node variant = root.at("variant");
  try {
    spec.variant = parse_variant(variant.string());
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    variant.fail(e.what());
  }

  Node rooms = root.at("rooms");
  rooms.require_array(1);
  if (rooms.size() > kMaxRooms) rooms.fail("at most 32 rooms are supported");
  std::set<std::string> room_names;
  for (std::size_t k = 0; k < rooms.size(); ++k) {
    Node room = rooms.at(k);
    room.only({"name", "capacity"});
    RoomSpec r;
    Node name = room.at("name");
    r.name = name.string();
    if (r.name.empty()) name.fail("room names must be nonempty");
    if (!room_names.insert(r.name).second) name.fail("duplicate room name '" + r.name + "'");
    r.capacity = room.has("capacity") ? static_cast<int>(room.at("capacity").integer(1, 1 << 20)) : 1;
    spec.rooms.push_back(std::move(r));
  }

  if (root.has("free_room_closure")) {
    Node c = root.at("free_room_closure");
    spec.free_room_closure = c.boolean();
    if (spec.free_room_closure && spec.variant != Variant::rental) {
      c.fail("the free-room closure applies to the rental variant only");
    }
  } else {
    spec.free_room_closure = spec.variant == Variant::rental;
  }
  if (root.has("allow_surplus")) spec.allow_surplus = root.at("allow_surplus").boolean();

  Node agents = root.at("agents");
  agents.require_array(1);
  std::set<std::string> agent_names;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    Node agent = agents.at(k);
    agent.only({"name", "oracle"});
    AgentSpec a;
    Node name = agent.at("name");
    a.name = name.string();
    if (a.name.empty()) name.fail("agent names must be nonempty");
    if (!agent_names.insert(a.name).second) name.fail("duplicate agent name '" + a.name + "'");
    a.oracle = parse_oracle(agent.at("oracle"), spec);
    spec.agents.push_back(std::move(a));
  }

  std::int64_t total = 0;
  for (const auto& r : spec.rooms) total += r.capacity;
  auto n = static_cast<std::int64_t>(spec.agents.size());
  if (total < n) {
    rooms.fail("capacities sum to " + std::to_string(total) + " but there are " + std::to_string(n) + " agents");
  }
  if (total > n && !spec.allow_surplus) {
    rooms.fail("capacities sum to " + std::to_string(total) + " but there are " + std::to_string(n) +
               " agents; set \"allow_surplus\": true to fill the surplus with dummy agents");
  }

  if (root.has("solver")) spec.solver = parse_solver(root.at("solver"));
  return spec;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ProblemSpec load_problem(const std::filesystem::path& path) { return parse_problem(read_json_file(path)); }

namespace {

Json room_names(const ProblemSpec& spec, RoomSet set) {
  Json out = Json::array();
  for (auto r : set.members()) out.push_back(spec.rooms[r].name);
  return out;
}

Json rationals(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

}  // namespace

Json problem_to_json(const ProblemSpec& spec) {
  Json doc;
  doc["format"] = kProblemFormat;
  doc["variant"] = to_string(spec.variant);
  doc["rooms"] = Json::array();
  for (const auto& r : spec.rooms) doc["rooms"].push_back({{"name", r.name}, {"capacity", r.capacity}});
  doc["free_room_closure"] = spec.free_room_closure;
  doc["allow_surplus"] = spec.allow_surplus;
  doc["agents"] = Json::array();
  for (const auto& a : spec.agents) {
    Json o;
    o["family"] = a.oracle.family;
    if (a.oracle.family == "quasilinear" || a.oracle.family == "hungry-cake") o["values"] = rationals(a.oracle.values);
    if (a.oracle.family == "constant") o["rooms"] = room_names(spec, a.oracle.rooms);
    if (a.oracle.family == "decision-list") {
      o["rules"] = Json::array();
      for (const auto& rule : a.oracle.list.rules) {
        Json when = Json::array();
        for (const auto& c : rule.when) {
          Json coeffs = Json::object();
          for (std::size_t r = 0; r < spec.rooms.size(); ++r) {
            if (c.coeffs[r] != 0) coeffs[spec.rooms[r].name] = to_string(c.coeffs[r]);
          }
          when.push_back({{"coeffs", coeffs},
                          {"op", c.op == Comparison::greater ? ">" : "<"},
                          {"threshold", to_string(c.threshold)}});
        }
        o["rules"].push_back({{"when", when}, {"then", room_names(spec, rule.then)}});
      }
      o["otherwise"] = room_names(spec, a.oracle.list.otherwise);
    }
    doc["agents"].push_back({{"name", a.name}, {"oracle", o}});
  }
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

PreferenceOracle simplex_oracle(const ProblemSpec& spec, std::size_t i, const InteractiveQuery& interactive) {
  const AgentSpec& a = spec.agents[i];
  const std::size_t rooms = spec.rooms.size();
  const OracleSpec& o = a.oracle;
  if (o.family == "quasilinear") return quasilinear_oracle(a.name, o.values, spec.capacities());
  if (o.family == "hungry-cake") return hungry_cake_oracle(a.name, o.values);
  if (o.family == "decision-list") return decision_list_oracle(a.name, rooms, o.list);
  if (o.family == "constant") return constant_oracle(a.name, rooms, o.rooms);
  if (!interactive) throw InputError("agent '" + a.name + "' is interactive; run it through `serve`");
  return PreferenceOracle(
      a.name, rooms, [interactive, i](const PriceVector& p) { return interactive(i, p.coords()); },
      Concurrency::strictly_sequential);
}

CubeOracle cube_oracle(const ProblemSpec& spec, std::size_t i, const InteractiveQuery& interactive) {
  const AgentSpec& a = spec.agents[i];
  const std::size_t rooms = spec.rooms.size();
  const OracleSpec& o = a.oracle;
  if (o.family == "quasilinear") return exchange_quasilinear_oracle(a.name, o.values, spec.capacities());
  if (o.family == "constant") {
    RoomSet fixed = o.rooms;
    return CubeOracle(a.name, rooms, [fixed](const CubePoint&) { return fixed; });
  }
  if (o.family != "interactive") throw InputError("family '" + o.family + "' is not available for exchange");
  if (!interactive) throw InputError("agent '" + a.name + "' is interactive; run it through `serve`");
  return CubeOracle(
      a.name, rooms, [interactive, i](const CubePoint& p) { return interactive(i, p.coords()); },
      Concurrency::strictly_sequential);
}

}  // namespace

BuiltProblem build_problem(const ProblemSpec& spec, const InteractiveQuery& interactive) {
  BuiltProblem built;
  built.variant = spec.variant;
  built.capacities = spec.capacities();
  built.real_agents = spec.agents.size();
  const std::size_t rooms = spec.rooms.size();
  const std::size_t dummies = spec.surplus();

  if (spec.variant == Variant::exchange) {
    for (std::size_t i = 0; i < spec.agents.size(); ++i) built.cube_oracles.push_back(cube_oracle(spec, i, interactive));
    for (std::size_t k = 0; k < dummies; ++k) {
      built.cube_oracles.emplace_back("dummy " + std::to_string(k + 1), rooms, [](const CubePoint& p) {
        RoomSet affordable;
        for (std::size_t r = 0; r < p.size(); ++r) {
          if (p[r] < 1) affordable.insert(r);
        }
        return affordable;
      });
    }
    return built;
  }

  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    PreferenceOracle o = simplex_oracle(spec, i, interactive);
    if (spec.variant == Variant::rental && spec.free_room_closure) o = free_room_closure(o);
    built.simplex_oracles.push_back(std::move(o));
  }
  for (std::size_t k = 0; k < dummies; ++k) {
    std::string name = "dummy " + std::to_string(k + 1);
    if (spec.variant == Variant::rental) {
      built.simplex_oracles.push_back(constant_oracle(name, rooms, RoomSet::all(rooms)));
    } else {
      built.simplex_oracles.emplace_back(name, rooms, [](const PriceVector& p) { return p.support(); });
    }
  }
  return built;
}

}  // namespace harmony::service
