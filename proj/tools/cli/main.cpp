#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace otsm::cli;

  CLI::App app{"Orthogonal trace-sum maximization: solve, certify, and benchmark"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Run proximal block relaxation on a problem file");
  s->add_option("--input", solve.input, "Problem JSON")->required();
  s->add_option("--out", solve.out, "Report JSON")->required();
  s->add_option("--solution-out", solve.solution_out, "Solution JSON (default: <out>.solution.json)");
  s->add_option("--alpha", solve.alpha, "Proximity constant, or 'inf'")->capture_default_str();
  s->add_option("--tol", solve.tol, "Mean-change stopping tolerance")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "Maximum number of cycles")->capture_default_str();
  s->add_option("--init", solve.init, "identity, spectral, or file:PATH")->capture_default_str();
  s->add_flag("--certify", solve.certify, "Run the global-optimality certificate");
  s->add_flag("--trace", solve.trace, "Include the objective trace in the report");

  CertifyOptions cert;
  auto* c = app.add_subcommand("certify", "Check a candidate solution for global optimality");
  c->add_option("--input", cert.input, "Problem JSON")->required();
  c->add_option("--solution", cert.solution, "Solution JSON")->required();
  c->add_option("--out", cert.out, "Report JSON")->required();

  auto* demo = app.add_subcommand("demo-oscillation", "Replay the 4-cycle of the non-proximal ascent");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Synthetic Procrustes certification study");
  b->add_option("--m", bench.m, "Number of views")->capture_default_str();
  b->add_option("--n", bench.n, "Landmarks per view")->capture_default_str();
  b->add_option("--r", bench.r, "Rank")->capture_default_str();
  b->add_option("--d", bench.d, "Comma-separated dimensions")->delimiter(',')->capture_default_str();
  b->add_option("--sigma", bench.sigma, "Comma-separated noise levels")->delimiter(',')->capture_default_str();
  b->add_option("--reps", bench.reps, "Replications per cell")->capture_default_str();
  b->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  b->add_option("--threads", bench.threads, "Worker threads")->capture_default_str();
  b->add_option("--out", bench.out, "Results CSV")->required();

  ExampleOptions example;
  auto* e = app.add_subcommand("example-hard", "Write the 3-block example with S12 = -I, S13 = S23 = I");
  e->add_option("--d", example.d, "Block dimension")->capture_default_str();
  e->add_option("--r", example.r, "Rank")->capture_default_str();
  e->add_option("--out", example.out, "Problem JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (s->parsed()) return cmd_solve(solve, std::cout, std::cerr);
  if (c->parsed()) return cmd_certify(cert, std::cout, std::cerr);
  if (demo->parsed()) return cmd_demo_oscillation(std::cout, std::cerr);
  if (b->parsed()) return cmd_bench(bench, std::cout, std::cerr);
  if (e->parsed()) return cmd_example_hard(example, std::cout, std::cerr);
  return kExitInputError;
}
