#pragma once

#include <cstdint>
#include <vector>

#include "otsm/core.hpp"

namespace otsm {

/// m data matrices A_i, each n x d_i, sharing the row count n.
struct ViewData {
  std::vector<Matrix> views;
};

/// Target Y and regressors A_1..A_K, all n x d.
struct OlsData {
  Matrix target;
  std::vector<Matrix> regressors;
};

/// MAXDIFF / multi-set CCA: S_ij = A_i^T A_j. Throws ValidationError if the
/// views disagree on n or some d_i < rank.
OtsmProblem build_maxdiff(const ViewData& data, Index rank);

struct ProcrustesProblem {
  OtsmProblem problem;
  /// sum_i ||A_i||_F^2
  double offset = 0.0;

  /// Pairwise discrepancy (1/2) sum_{i,j} ||A_i O_i - A_j O_j||_F^2 recovered
  /// from the trace objective: (m - 1) * offset - 2 * objective. Exact when
  /// every block is square orthogonal (r = d).
  double discrepancy_from_objective(double objective_value) const;
};

/// Generalized Procrustes analysis on equal-width landmark sets (r <= d).
ProcrustesProblem build_procrustes(const ViewData& data, Index rank);

/// (1/2) sum_{i,j} ||A_i O_i - A_j O_j||_F^2 evaluated directly.
double procrustes_discrepancy(const ViewData& data, const BlockOrthogonal& point);

/// Orthogonal least squares reduced to K+1 blocks with S_ij = -A_i^T A_j and A_{K+1} = Y.
struct OlsProblem {
  OtsmProblem problem;

  /// (O_1..O_{K+1}) -> (-O_1 O_{K+1}^T, ..., -O_K O_{K+1}^T).
  std::vector<Matrix> recover(const BlockOrthogonal& solution) const;
};

OlsProblem build_ols(const OlsData& data);

/// (1/2) ||Y - sum_i A_i O_i||_F^2
double ols_criterion(const OlsData& data, const std::vector<Matrix>& rotations);

/// m = 3 instance with S_12 = -I_d, S_13 = I_d, S_23 = I_d at rank r.
OtsmProblem hard_example(Index d, Index rank);

struct SyntheticProcrustes {
  ViewData data;
  OtsmProblem problem;
  /// R_i in O(d, d) with A_i = L R_i^T + sigma E_i.
  std::vector<Matrix> ground_truth;
};

/// Landmarks L (n x d, standard normal), uniformly random rotations R_i, and
/// views A_i = L R_i^T + sigma * E_i. The problem is MAXDIFF at rank r.
/// Bit-identical for identical arguments on a given platform.
SyntheticProcrustes synth_procrustes(Index m, Index n, Index d, Index rank, double sigma,
                                     std::uint64_t seed);

/// Haar-distributed d x d orthogonal matrix (QR of a Gaussian matrix with sign fix).
template <typename Rng>
Matrix random_orthogonal(Index d, Rng& rng);

/// Matrix with independent standard normal entries, filled row by row.
template <typename Rng>
Matrix random_gaussian(Index rows, Index cols, Rng& rng);

}  // namespace otsm

#include "otsm/detail/random_matrix.hpp"
