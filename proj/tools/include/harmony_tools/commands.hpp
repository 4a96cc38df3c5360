#pragma once

// The batch commands behind the CLI, callable in-process.

#include <filesystem>
#include <optional>
#include <string>

#include "harmony_tools/problem.hpp"
#include "harmony_tools/solution.hpp"

namespace harmony::service {

/// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kEnvyFailure = 1,
  kCertificateValid = 2,
  kCertificateInvalid = 3,
  kFailedSolution = 4,
  kNotVerifiable = 5,
  kUsage = 64,
  /// An oracle broke the assumptions of its variant during solving.
  kAssumptionViolated = 65,
};

/// Library defaults, then the problem file's solver block, then the flags.
SolverConfig effective_config(const ProblemSpec& spec, const SolverOverrides& flags);

/// Solves a problem without interactive agents.
SolutionDoc solve_problem(const ProblemSpec& spec, const SolverConfig& config);

/// Solves with the given interactive query function (used by the session).
SolutionDoc solve_problem(const ProblemSpec& spec, const SolverConfig& config, const InteractiveQuery& interactive);

struct VerifyOutcome {
  int code = kUsage;
  std::string message;
};

/// Exact solutions are re-checked against the oracles; eps solutions have
/// their certificate checked instead.
VerifyOutcome verify_solution(const SolutionDoc& solution, const ProblemSpec& spec);

/// Sampled assumption checks for every programmatic agent, against the
/// assumption set of the problem's variant.
Json check_oracles(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed);

}  // namespace harmony::service
