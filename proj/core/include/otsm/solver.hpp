#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "otsm/core.hpp"

namespace otsm {

struct IdentityInit {};
struct SpectralInit {};
struct CustomInit {
  BlockOrthogonal point;
};
using InitStrategy = std::variant<IdentityInit, SpectralInit, CustomInit>;

inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

struct SolverConfig {
  /// Proximity constant. +inf drops the proximal term and needs allow_infinite_alpha.
  double alpha = 1000.0;
  /// Stop when (1/m) sum_i ||O_i^k - O_i^{k-1}||_F < tol after a full cycle.
  double tol = 1e-5;
  int max_iter = 2000;
  InitStrategy init = IdentityInit{};
  /// Keep every end-of-cycle iterate in SolveReport::history.
  bool record_history = false;
  /// Relative slack on the per-cycle objective increase for finite alpha.
  double monotonicity_slack = 1e-12;
  /// Opt-in for the classical (non-proximal) block ascent, which may oscillate.
  bool allow_infinite_alpha = false;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

enum class StopReason { Converged, MaxIter, Stagnated };

std::string_view to_string(StopReason reason);

struct SolveReport {
  explicit SolveReport(BlockOrthogonal start) : solution(std::move(start)) {}

  BlockOrthogonal solution;
  /// objective_trace[0] is the initial objective; entry k is the value after cycle k.
  std::vector<double> objective_trace;
  /// mean_change_trace[k-1] is (1/m) sum_i ||O_i^k - O_i^{k-1}||_F.
  std::vector<double> mean_change_trace;
  /// step_sq_trace[k-1] is sum_i ||O_i^k - O_i^{k-1}||_F^2.
  std::vector<double> step_sq_trace;
  int iterations = 0;
  StopReason stop_reason = StopReason::MaxIter;
  StationarityReport stationarity;
  /// End-of-cycle iterates (index 0 = initial point); empty unless record_history.
  std::vector<BlockOrthogonal> history;
  double alpha = 1000.0;

  double initial_objective() const { return objective_trace.front(); }
  double final_objective() const { return objective_trace.back(); }
};

/// First r columns of I_{d_i} for each block.
BlockOrthogonal init_identity(const BlockDims& dims);

/// Top-r eigenvectors of S~, split into blocks and polar-projected.
BlockOrthogonal init_spectral(const OtsmProblem& problem);

BlockOrthogonal make_initial_point(const OtsmProblem& problem, const InitStrategy& init);

/// One proximal block update: polar factor of sum_{j != i} S_ij O_j + O_i / alpha.
/// With alpha = +inf the proximal term is dropped.
Matrix step_block(const OtsmProblem& problem, const std::vector<Matrix>& blocks, Index i,
                  double alpha);

/// Proximal block relaxation. Blocks are swept in ascending order each cycle.
/// Throws InternalError if a finite-alpha cycle decreases the objective beyond
/// monotonicity_slack.
SolveReport solve(const OtsmProblem& problem, const SolverConfig& config = {});

/// Scripted trajectory of the classical ascent on the d=3, r=2 hard instance.
struct OscillationTrace {
  /// (I,J,I), (-J,I,-J), (-I,-J,-I), (J,-I,J), and the return to (I,J,I).
  std::vector<BlockOrthogonal> iterates;
  /// Objective at the first four iterates.
  std::vector<double> objectives;
  /// max over block updates of |tr(next^T B) - ||B||_*|.
  double max_argmax_gap = 0.0;
  /// The finite-alpha solve started at (I,J,I).
  double fixed_point_mean_change = 0.0;
  int fixed_point_iterations = 0;
  /// Best objective value, for comparison with the cycle.
  double global_optimum = 3.0;
  bool argmax_ok = false;
  bool objective_constant = false;
  bool cycle_closes = false;
  bool fixed_point_ok = false;

  bool ok() const { return argmax_ok && objective_constant && cycle_closes && fixed_point_ok; }
};

/// Replays the 4-cycle and checks each step against the nuclear-norm identity.
/// Throws InternalError when a check fails.
OscillationTrace oscillation_demo(double alpha = 1000.0);

}  // namespace otsm
