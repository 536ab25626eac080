#include "otsm/solver.hpp"

#include <cmath>
#include <sstream>

#include "otsm/builders.hpp"

namespace otsm {

namespace {

// Objective change below which a cycle counts as "no progress" for the stagnation guard.
constexpr double kStagnationDelta = 1e-14;
constexpr int kStagnationCycles = 10;

double objective_of(const OtsmProblem& problem, const std::vector<Matrix>& blocks) {
  double total = 0.0;
  for (const auto& [key, s] : problem.stored_blocks()) {
    const auto [i, j] = key;
    total += (blocks[static_cast<std::size_t>(i)].transpose() * s *
              blocks[static_cast<std::size_t>(j)])
                 .trace();
  }
  return total;
}

double nuclear_norm(const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(b);
  return svd.singularValues().sum();
}

}  // namespace

void SolverConfig::validate() const {
  if (std::isnan(alpha) || alpha <= 0.0) {
    throw ValidationError("SolverConfig: alpha must be positive");
  }
  if (std::isinf(alpha) && !allow_infinite_alpha) {
    throw ValidationError(
        "SolverConfig: alpha=+inf disables the proximal term; set allow_infinite_alpha");
  }
  if (!(tol > 0.0)) throw ValidationError("SolverConfig: tol must be positive");
  if (max_iter < 1) throw ValidationError("SolverConfig: max_iter must be positive");
  if (!(monotonicity_slack >= 0.0)) {
    throw ValidationError("SolverConfig: monotonicity_slack must be nonnegative");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return "converged";
    case StopReason::MaxIter:
      return "max_iter";
    case StopReason::Stagnated:
      return "stagnated";
  }
  return "unknown";
}

BlockOrthogonal init_identity(const BlockDims& dims) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(dims.count()));
  for (Index i = 0; i < dims.count(); ++i) {
    blocks.push_back(identity_columns(dims.dim(i), dims.rank()));
  }
  return BlockOrthogonal(dims, std::move(blocks));
}

BlockOrthogonal init_spectral(const OtsmProblem& problem) {
  const BlockDims& dims = problem.dims();
  const Matrix stilde = assemble_stilde(problem);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(stilde);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("init_spectral: eigendecomposition of S~ failed");
  }
  // Eigenvalues come back ascending; take the top r, largest first.
  const Index r = dims.rank();
  const Index total = dims.total();
  Matrix top(total, r);
  for (Index c = 0; c < r; ++c) top.col(c) = eig.eigenvectors().col(total - 1 - c);

  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(dims.count()));
  for (Index i = 0; i < dims.count(); ++i) {
    blocks.push_back(polar_project(top.middleRows(dims.offset(i), dims.dim(i))));
  }
  return BlockOrthogonal(dims, std::move(blocks));
}

BlockOrthogonal make_initial_point(const OtsmProblem& problem, const InitStrategy& init) {
  if (std::holds_alternative<IdentityInit>(init)) return init_identity(problem.dims());
  if (std::holds_alternative<SpectralInit>(init)) return init_spectral(problem);
  const BlockOrthogonal& custom = std::get<CustomInit>(init).point;
  check_compatible(problem, custom);
  return custom;
}

Matrix step_block(const OtsmProblem& problem, const std::vector<Matrix>& blocks, Index i,
                  double alpha) {
  Matrix b = problem.block_gradient(blocks, i);
  if (std::isfinite(alpha)) b += blocks[static_cast<std::size_t>(i)] / alpha;
  return polar_project(b);
}

SolveReport solve(const OtsmProblem& problem, const SolverConfig& config) {
  config.validate();
  const BlockOrthogonal start = make_initial_point(problem, config.init);
  const BlockDims& dims = problem.dims();
  const auto m = static_cast<std::size_t>(dims.count());
  const bool finite_alpha = std::isfinite(config.alpha);

  std::vector<Matrix> blocks = start.blocks();
  std::vector<Matrix> previous;

  SolveReport report(start);
  report.alpha = config.alpha;
  report.objective_trace.push_back(objective_of(problem, blocks));
  if (config.record_history) report.history.push_back(start);

  int flat_cycles = 0;
  report.stop_reason = StopReason::MaxIter;
  for (int k = 1; k <= config.max_iter; ++k) {
    previous = blocks;
    for (std::size_t i = 0; i < m; ++i) {
      blocks[i] = step_block(problem, blocks, static_cast<Index>(i), config.alpha);
    }

    double change = 0.0;
    double step_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = (blocks[i] - previous[i]).norm();
      change += d;
      step_sq += d * d;
    }
    change /= static_cast<double>(m);

    const double f_prev = report.objective_trace.back();
    const double f_new = objective_of(problem, blocks);
    if (finite_alpha && f_new < f_prev - config.monotonicity_slack * (1.0 + std::abs(f_prev))) {
      std::ostringstream os;
      os.precision(17);
      os << "solve: objective decreased at cycle " << k << " (" << f_prev << " -> " << f_new
         << ") with finite alpha=" << config.alpha;
      throw InternalError(os.str());
    }

    report.objective_trace.push_back(f_new);
    report.mean_change_trace.push_back(change);
    report.step_sq_trace.push_back(step_sq);
    report.iterations = k;
    if (config.record_history) {
      report.history.emplace_back(dims, blocks, 1e-8);
    }

    if (change < config.tol) {
      report.stop_reason = StopReason::Converged;
      break;
    }
    flat_cycles = std::abs(f_new - f_prev) < kStagnationDelta ? flat_cycles + 1 : 0;
    if (flat_cycles >= kStagnationCycles) {
      report.stop_reason = StopReason::Stagnated;
      break;
    }
  }

  report.solution = BlockOrthogonal(dims, std::move(blocks));
  report.stationarity = stationarity(problem, report.solution);
  return report;
}

OscillationTrace oscillation_demo(double alpha) {
  const OtsmProblem problem = hard_example(3, 2);
  const BlockDims& dims = problem.dims();

  const Matrix eye = identity_columns(3, 2);
  Matrix swap = Matrix::Zero(3, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;

  // Each row is (O_1, O_2, O_3) after a full cycle.
  const std::vector<std::vector<Matrix>> cycle = {
      {eye, swap, eye}, {-swap, eye, -swap}, {-eye, -swap, -eye}, {swap, -eye, swap},
      {eye, swap, eye}};

  OscillationTrace trace;
  for (const auto& point : cycle) trace.iterates.emplace_back(dims, point);

  // Replay each scripted block update against the alpha=+inf block matrix B.
  for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
    std::vector<Matrix> blocks = cycle[k];
    for (Index i = 0; i < dims.count(); ++i) {
      const Matrix b = problem.block_gradient(blocks, i);
      const Matrix& next = cycle[k + 1][static_cast<std::size_t>(i)];
      const double gap = std::abs((next.transpose() * b).trace() - nuclear_norm(b));
      trace.max_argmax_gap = std::max(trace.max_argmax_gap, gap);
      blocks[static_cast<std::size_t>(i)] = next;
    }
  }
  trace.argmax_ok = trace.max_argmax_gap <= 1e-10;

  for (std::size_t k = 0; k < 4; ++k) {
    trace.objectives.push_back(objective(problem, trace.iterates[k]));
  }
  trace.objective_constant = true;
  for (double f : trace.objectives) {
    trace.objective_constant = trace.objective_constant && std::abs(f - 2.0) <= 1e-12;
  }
  trace.cycle_closes = (trace.iterates.back().stacked() - trace.iterates.front().stacked())
                           .norm() == 0.0;

  SolverConfig config;
  config.alpha = alpha;
  config.init = CustomInit{trace.iterates.front()};
  const SolveReport fixed = solve(problem, config);
  trace.fixed_point_iterations = fixed.iterations;
  trace.fixed_point_mean_change = fixed.mean_change_trace.front();
  trace.fixed_point_ok = fixed.iterations == 1 && fixed.stop_reason == StopReason::Converged &&
                         trace.fixed_point_mean_change <= 1e-12;

  if (!trace.ok()) {
    std::ostringstream os;
    os << "oscillation_demo: verification failed (argmax gap " << trace.max_argmax_gap
       << ", fixed-point change " << trace.fixed_point_mean_change << ")";
    throw InternalError(os.str());
  }
  return trace;
}

}  // namespace otsm
