#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "harmony_tools/commands.hpp"
#include "harmony_tools/session.hpp"

using namespace harmony;
using namespace harmony::service;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("harmony");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("HARMONY_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

struct SolverFlags {
  std::optional<std::int64_t> mesh_start;
  std::optional<std::string> epsilon;
  std::optional<int> max_doublings;
  std::optional<std::size_t> beam;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> offset;
  std::optional<unsigned> threads;

  void add_to(CLI::App* app) {
    app->add_option("--mesh-start", mesh_start, "Initial mesh resolution");
    app->add_option("--epsilon", epsilon, "Target cell diameter, e.g. 1/1000 or 0.001");
    app->add_option("--max-doublings", max_doublings, "Mesh refinements before giving up");
    app->add_option("--beam", beam, "Cells refined per level");
    app->add_option("--seed", seed, "Seed for the mesh offset and tie breaking");
    app->add_option("--offset", offset, "Offset the mesh (on|off)")->check(CLI::IsMember({"on", "off"}));
    app->add_option("--threads", threads, "Worker threads; 0 uses every core");
  }

  SolverOverrides overrides() const {
    SolverOverrides o;
    o.mesh_start = mesh_start;
    if (epsilon) o.epsilon = parse_rational(*epsilon);
    o.max_doublings = max_doublings;
    o.beam = beam;
    o.seed = seed;
    if (offset) o.offset = *offset == "on";
    o.threads = threads;
    return o;
  }
};

ProblemSpec load_with_variant(const std::string& path, const std::optional<std::string>& variant) {
  Json doc = read_json_file(path);
  if (variant && doc.is_object()) doc["variant"] = *variant;
  return parse_problem(doc);
}

void write_output(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw InputError("cannot write " + *path);
  out << text;
}

int cmd_solve(const std::string& input, const std::optional<std::string>& variant, const SolverFlags& flags,
              const std::optional<std::string>& output) {
  ProblemSpec spec = load_with_variant(input, variant);
  if (spec.has_interactive()) throw InputError("problem has interactive agents; run `harmony serve` instead");
  SolverConfig config = effective_config(spec, flags.overrides());
  SolutionDoc doc = solve_problem(spec, config);
  write_output(render(solution_to_json(doc)), output);
  return doc.status == SolveStatus::failed ? kFailedSolution : kOk;
}

int cmd_verify(const std::string& solution, const std::string& problem) {
  ProblemSpec spec = load_problem(problem);
  SolutionDoc doc = parse_solution(read_json_file(solution));
  VerifyOutcome outcome = verify_solution(doc, spec);
  switch (outcome.code) {
    case kOk: std::cout << "envy-free: every agent demands its assigned room\n"; break;
    case kCertificateValid:
      std::cout << "not independently verifiable at a point; cell certificate is valid\n";
      break;
    default: std::cerr << "error: " << outcome.message << "\n"; break;
  }
  return outcome.code;
}

int cmd_check(const std::string& input, std::size_t samples, std::uint64_t seed,
              const std::optional<std::string>& output) {
  ProblemSpec spec = load_problem(input);
  Json report = check_oracles(spec, samples, seed);
  write_output(render(report), output);
  return report["passed"].get<bool>() ? kOk : kEnvyFailure;
}

int cmd_serve(const std::string& input, std::uint16_t port, std::size_t query_budget, const SolverFlags& flags) {
  ProblemSpec spec = load_problem(input);
  SolverConfig config = effective_config(spec, flags.overrides());
  SessionServer server(std::move(spec), std::move(config), port, SessionOptions{query_budget});
  std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
  std::signal(SIGINT, [](int) { std::_Exit(0); });
  std::signal(SIGTERM, [](int) { std::_Exit(0); });
  server.serve();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Envy-free rent division, cake cutting and exchange pricing"};
  app.require_subcommand(1);

  std::string input, solution, problem;
  std::optional<std::string> variant, output;
  SolverFlags flags;
  std::size_t samples = 500;
  std::uint64_t seed = 0;
  std::uint16_t port = 8765;
  std::size_t query_budget = 0;

  auto* solve = app.add_subcommand("solve", "Compute prices and an assignment");
  solve->add_option("--input", input, "Problem file")->required();
  solve->add_option("--variant", variant, "Override the problem's variant")
      ->check(CLI::IsMember({"rental", "cake", "exchange"}));
  solve->add_option("--output", output, "Solution file (default stdout)");
  flags.add_to(solve);

  auto* verify = app.add_subcommand("verify", "Re-check a solution against its problem");
  verify->add_option("--solution", solution, "Solution file")->required();
  verify->add_option("--problem", problem, "Problem file")->required();

  auto* check = app.add_subcommand("check-oracle", "Sample every agent against the variant's assumptions");
  check->add_option("--input", input, "Problem file")->required();
  check->add_option("--samples", samples, "Samples per agent")->check(CLI::Range(1, 1000000));
  check->add_option("--seed", seed, "Sampling seed");
  check->add_option("--output", output, "Report file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run interactive elicitation sessions");
  serve->add_option("--input", input, "Problem file")->required();
  serve->add_option("--port", port, "TCP port on 127.0.0.1; 0 picks one");
  serve->add_option("--query-budget", query_budget, "Questions per session; 0 uses the vertex budget");
  flags.add_to(serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(input, variant, flags, output);
    if (*verify) return cmd_verify(solution, problem);
    if (*check) return cmd_check(input, samples, seed, output);
    if (*serve) return cmd_serve(input, port, query_budget, flags);
  } catch (const PropertyViolation& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumptionViolated;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return kUsage;
}
