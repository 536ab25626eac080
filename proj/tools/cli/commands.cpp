#include "cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cli/io.hpp"

namespace otsm::cli {

namespace {

// Short human-readable number; folds -0 into 0 so the demo output is stable.
std::string num(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << (x + 0.0);
  return os.str();
}

std::string matrix_inline(const Matrix& m) {
  std::string s = "[";
  for (Index i = 0; i < m.rows(); ++i) {
    if (i > 0) s += "; ";
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) s += " ";
      s += num(m(i, j));
    }
  }
  return s + "]";
}

double parse_alpha(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return kInfiniteAlpha;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("--alpha: expected a positive number or 'inf', got '" + text + "'");
  }
  if (used != text.size() || !(value > 0.0) || std::isinf(value)) {
    throw InputError("--alpha: expected a positive number or 'inf', got '" + text + "'");
  }
  return value;
}

InitStrategy parse_init(const std::string& text, const OtsmProblem& problem, std::ostream& err) {
  if (text == "identity") return IdentityInit{};
  if (text == "spectral") return SpectralInit{};
  if (text.rfind("file:", 0) == 0) {
    const std::filesystem::path path = text.substr(5);
    if (path.empty()) throw InputError("--init: 'file:' needs a path");
    return CustomInit{load_solution(path, problem.dims(), err)};
  }
  throw InputError("--init: expected identity, spectral, or file:PATH, got '" + text + "'");
}

// Runs `body` and maps library exceptions to exit code 1 with a one-line diagnostic.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
  } catch (const InternalError& e) {
    err << "error: internal check failed: " << e.what() << '\n';
  }
  return kExitInputError;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::CertifiedGlobal:
      return kExitOk;
    case Verdict::Inconclusive:
      return kExitInconclusive;
    case Verdict::CertifiedNotGlobal:
      return kExitNotGlobal;
  }
  return kExitInconclusive;
}

void print_certificate(const CertificateReport& cert, std::ostream& out) {
  out << "verdict: " << to_string(cert.verdict) << '\n';
  out << "taus:";
  for (double t : cert.taus) out << ' ' << num(t, 10);
  out << '\n';
  out << "lambda_min(L*): " << num(cert.lmin_full, 10) << " (tol " << num(cert.tol_psd, 3) << ")\n";
  out << "lambda_min on complement: " << num(cert.lmin_reduced, 10) << '\n';
  out << "dual upper bound: " << num(cert.dual_bound, 10) << '\n';
}

}  // namespace

std::filesystem::path default_solution_path(const std::filesystem::path& report) {
  std::filesystem::path p = report;
  p.replace_extension();
  p += ".solution.json";
  return p;
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const OtsmProblem problem = load_problem(opts.input);
    SolverConfig config;
    config.alpha = parse_alpha(opts.alpha);
    config.tol = opts.tol;
    config.max_iter = opts.max_iter;
    config.init = parse_init(opts.init, problem, err);
    if (std::isinf(config.alpha)) {
      config.allow_infinite_alpha = true;
      err << "warning: --alpha inf drops the proximal term; the iteration may oscillate and is "
             "not guaranteed to converge\n";
    }
    config.validate();
    const std::filesystem::path solution_path = opts.solution_out.value_or(default_solution_path(opts.out));

    const SolveReport rep = solve(problem, config);
    std::optional<CertificateReport> cert;
    if (opts.certify) cert = certify(problem, rep.solution);

    write_json_atomic(solution_path, solution_to_json(rep.solution));
    write_json_atomic(opts.out, solve_report_to_json(rep, cert ? &*cert : nullptr, opts.trace));

    out << "objective: " << num(rep.final_objective(), 10) << " (start " << num(rep.initial_objective(), 10)
        << ")\n";
    out << "iterations: " << rep.iterations << '\n';
    out << "stop reason: " << to_string(rep.stop_reason) << '\n';
    out << "stationarity: gradient residual " << num(rep.stationarity.max_gradient_residual, 3)
        << ", asymmetry " << num(rep.stationarity.max_asymmetry, 3) << '\n';
    if (cert) print_certificate(*cert, out);
    out << "wrote " << opts.out.string() << " and " << solution_path.string() << '\n';

    return rep.stop_reason == StopReason::Converged ? kExitOk : kExitMaxIter;
  });
}

int cmd_certify(const CertifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const OtsmProblem problem = load_problem(opts.input);
    const BlockOrthogonal point = load_solution(opts.solution, problem.dims(), err);
    const CertificateReport cert = certify(problem, point);
    const StationarityReport stat = stationarity(problem, point);

    nlohmann::json doc;
    doc["objective"] = objective(problem, point);
    doc["stationarity"] = {{"max_gradient_residual", stat.max_gradient_residual},
                           {"max_asymmetry", stat.max_asymmetry}};
    doc["certificate"] = certificate_to_json(cert);
    write_json_atomic(opts.out, doc);

    out << "objective: " << num(doc["objective"].get<double>(), 10) << '\n';
    print_certificate(cert, out);
    out << "wrote " << opts.out.string() << '\n';
    return verdict_exit(cert.verdict);
  });
}

int cmd_demo_oscillation(std::ostream& out, std::ostream& err) {
  OscillationTrace trace;
  try {
    trace = oscillation_demo();
  } catch (const InternalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDemoFailed;
  }
  const OtsmProblem problem = hard_example(3, 2);

  out << "Classical block ascent (alpha = inf) on the 3-block example, d = 3, r = 2\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << "iterate " << k << ":";
    for (Index i = 0; i < 3; ++i) out << "  O" << i + 1 << " = " << matrix_inline(trace.iterates[k].block(i));
    out << '\n';
  }
  out << "objective:";
  for (double f : trace.objectives) out << ' ' << num(f);
  out << '\n';
  out << "global optimum: " << num(trace.global_optimum) << '\n';

  bool all_ok = true;
  for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
    std::vector<Matrix> blocks = trace.iterates[k].blocks();
    for (Index i = 0; i < 3; ++i) {
      const Matrix b = problem.block_gradient(blocks, i);
      const Matrix& next = trace.iterates[k + 1].block(i);
      Eigen::JacobiSVD<Matrix> svd(b);
      const double nuc = svd.singularValues().sum();
      const double attained = (next.transpose() * b).trace();
      const bool ok = std::abs(attained - nuc) <= 1e-10;
      all_ok = all_ok && ok;
      out << "cycle " << k + 1 << " block " << i + 1 << ": tr(O^T B) = " << num(attained) << ", ||B||_* = "
          << num(nuc) << (ok ? "  ok" : "  FAILED") << '\n';
      blocks[static_cast<std::size_t>(i)] = next;
    }
  }
  out << "cycle closes: " << (trace.cycle_closes ? "yes" : "no") << '\n';
  out << "finite alpha = 1000 from (I,J,I): " << trace.fixed_point_iterations << " cycle, mean change "
      << num(trace.fixed_point_mean_change) << (trace.fixed_point_ok ? "  ok" : "  FAILED") << '\n';
  all_ok = all_ok && trace.ok();
  out << (all_ok ? "all checks passed" : "some checks FAILED") << '\n';
  return all_ok ? kExitOk : kExitDemoFailed;
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentGrid grid;
    grid.m = opts.m;
    grid.n = opts.n;
    grid.r = opts.r;
    grid.d_values.assign(opts.d.begin(), opts.d.end());
    grid.sigma_values = opts.sigma;
    grid.reps = opts.reps;
    grid.seed = opts.seed;
    grid.threads = opts.threads;
    grid.validate();

    const auto results = run_grid(grid);
    export_results(results, opts.out);

    out << std::left << std::setw(6) << "d" << std::setw(10) << "sigma" << std::setw(10) << "init"
        << std::setw(11) << "certified" << std::setw(14) << "inconclusive" << std::setw(12) << "not_global"
        << "mean_iter\n";
    for (const auto& cell : results) {
      out << std::setw(6) << cell.d << std::setw(10) << num(cell.sigma) << std::setw(10) << to_string(cell.init)
          << std::setw(11) << (std::to_string(cell.certified) + "/" + std::to_string(cell.runs()))
          << std::setw(14) << cell.inconclusive << std::setw(12) << cell.not_global
          << num(cell.mean_iterations) << '\n';
      if (cell.failures > 0) err << "warning: " << cell.failures << " failed runs in this cell\n";
    }
    out << "wrote " << opts.out.string() << '\n';
    return kExitOk;
  });
}

int cmd_example_hard(const ExampleOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const OtsmProblem problem = hard_example(opts.d, opts.r);
    write_json_atomic(opts.out, problem_to_json(problem));
    out << "wrote " << opts.out.string() << '\n';
    return kExitOk;
  });
}

}  // namespace otsm::cli
