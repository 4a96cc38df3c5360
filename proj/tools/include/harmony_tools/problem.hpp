#pragma once

// Problem files: parsing, validation and construction of the oracles.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmony/oracle.hpp"
#include "harmony/solver.hpp"
#include "harmony/variants.hpp"

namespace harmony::service {

using Json = nlohmann::ordered_json;

inline constexpr const char* kProblemFormat = "harmony-problem/1";
inline constexpr const char* kSolutionFormat = "harmony-solution/1";
inline constexpr const char* kReportFormat = "harmony-report/1";

/// Validation failure at a JSON pointer inside a document.
class SchemaError : public InputError {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : InputError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class Variant { rental, cake, exchange };

std::string to_string(Variant v);
using harmony::to_string;
Variant parse_variant(const std::string& text);

struct RoomSpec {
  std::string name;
  int capacity = 1;
};

struct OracleSpec {
  /// quasilinear | hungry-cake | decision-list | constant | interactive
  std::string family;
  std::vector<Rational> values;
  DecisionList list;
  RoomSet rooms;
};

struct AgentSpec {
  std::string name;
  OracleSpec oracle;
};

/// Solver settings a problem file may override; unset fields keep defaults.
struct SolverOverrides {
  std::optional<std::int64_t> mesh_start;
  std::optional<Rational> epsilon;
  std::optional<int> max_doublings;
  std::optional<std::size_t> beam;
  std::optional<std::uint64_t> seed;
  std::optional<bool> offset;
  std::optional<std::size_t> vertex_budget;
  std::optional<unsigned> threads;

  void apply(SolverConfig& config) const;
};

struct ProblemSpec {
  Variant variant = Variant::rental;
  std::vector<RoomSpec> rooms;
  std::vector<AgentSpec> agents;
  /// Rental only: wrap every programmatic oracle with the free-room closure
  /// and auto-add free rooms to interactive answers.
  bool free_room_closure = true;
  /// Accept total capacity above the number of agents by adding dummy agents
  /// that take whatever is left.
  bool allow_surplus = false;
  SolverOverrides solver;

  std::vector<int> capacities() const;
  std::size_t room_index(const std::string& name) const;
  bool has_interactive() const;
  /// Total capacity minus the number of agents.
  std::size_t surplus() const;
};

/// Validates a problem document; every error names the offending JSON pointer.
ProblemSpec parse_problem(const Json& doc);
ProblemSpec load_problem(const std::filesystem::path& path);
Json problem_to_json(const ProblemSpec& spec);

/// Answers a query for a human-driven agent: (agent index, prices) -> rooms.
/// Prices are simplex coordinates for rental and cake, cube coordinates for
/// exchange.
using InteractiveQuery = std::function<RoomSet(std::size_t agent, const std::vector<Rational>& prices)>;

/// The problem's agents as oracles, padded with dummy agents for surplus
/// capacity. Dummy agents come after the real ones.
struct BuiltProblem {
  Variant variant = Variant::rental;
  std::vector<int> capacities;
  std::size_t real_agents = 0;
  std::vector<PreferenceOracle> simplex_oracles;  // rental, cake
  std::vector<CubeOracle> cube_oracles;           // exchange
};

/// Throws InputError when the problem has interactive agents and no query
/// function is supplied.
BuiltProblem build_problem(const ProblemSpec& spec, const InteractiveQuery& interactive = {});

Json read_json_file(const std::filesystem::path& path);

}  // namespace harmony::service
