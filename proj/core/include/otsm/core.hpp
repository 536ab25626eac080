#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace otsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when inputs violate a shape or feasibility contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a dense factorization fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an algorithmic invariant is broken. Signals a bug, not bad data.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Default tolerance on ||O^T O - I||_F for Stiefel membership.
inline constexpr double kDefaultOrthTol = 1e-10;

/// Shape of an instance: m blocks of row-dimension d_i, common column rank r.
class BlockDims {
 public:
  /// Throws ValidationError unless m >= 2, every d_i >= 1, and 1 <= r <= min d_i.
  BlockDims(std::vector<Index> dims, Index rank);

  Index count() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index i) const { return dims_.at(static_cast<std::size_t>(i)); }
  Index rank() const { return rank_; }
  /// D = sum of d_i.
  Index total() const { return offsets_.back(); }
  /// Row offset of block i inside the stacked D-dimensional space.
  Index offset(Index i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  const std::vector<Index>& dims() const { return dims_; }

  bool operator==(const BlockDims&) const = default;

 private:
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
  Index rank_;
};

/// Off-diagonal data blocks S_ij, stored for i < j only (0-based).
/// The full matrix S~ is symmetric with zero diagonal blocks; S_ji = S_ij^T.
class OtsmProblem {
 public:
  using BlockMap = std::map<std::pair<Index, Index>, Matrix>;

  /// Keys must satisfy 0 <= i < j < m and each S_ij must be d_i x d_j.
  OtsmProblem(BlockDims dims, BlockMap blocks);

  const BlockDims& dims() const { return dims_; }
  const BlockMap& stored_blocks() const { return blocks_; }

  /// S_ij for any i != j; transposes for i > j, zero when absent. Diagonal is zero.
  Matrix block(Index i, Index j) const;

  /// sum_{j != i} S_ij * O_j for block i, given one matrix per block.
  Matrix block_gradient(const std::vector<Matrix>& blocks, Index i) const;

 private:
  BlockDims dims_;
  BlockMap blocks_;
};

/// A point (O_1, ..., O_m) on the product of Stiefel manifolds.
class BlockOrthogonal {
 public:
  /// Throws ValidationError on shape mismatch or when some ||O_i^T O_i - I||_F > orth_tol.
  BlockOrthogonal(BlockDims dims, std::vector<Matrix> blocks,
                  double orth_tol = kDefaultOrthTol);

  const BlockDims& dims() const { return dims_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(Index i) const { return blocks_.at(static_cast<std::size_t>(i)); }

  /// The D x r matrix [O_1; ...; O_m].
  Matrix stacked() const;

  /// max_i ||O_i^T O_i - I_r||_F
  double orthonormality_error() const;

 private:
  BlockDims dims_;
  std::vector<Matrix> blocks_;
};

struct StationarityReport {
  /// ||sum_{j != i} S_ij O_j - O_i Lambda_i||_F per block.
  std::vector<double> gradient_residual;
  /// ||Lambda_i - Lambda_i^T||_F per block.
  std::vector<double> asymmetry;
  double max_gradient_residual = 0.0;
  double max_asymmetry = 0.0;

  bool stationary(double tol) const {
    return max_gradient_residual <= tol && max_asymmetry <= tol;
  }
};

/// ||O^T O - I||_F for a single block.
double orthonormality_error(const Matrix& block);

/// Dense symmetric D x D matrix S~ with zero diagonal blocks.
Matrix assemble_stilde(const OtsmProblem& problem);

/// sum_{i<j} tr(O_i^T S_ij O_j).
double objective(const OtsmProblem& problem, const BlockOrthogonal& point);

/// Nearest Stiefel matrix P Q^T from the thin SVD B = P D Q^T.
/// Maximizes tr(O^T b) over d x r orthonormal O. For rank-deficient b the
/// result is the SVD routine's deterministic completion.
Matrix polar_project(const Matrix& b);

/// Lambda_i = O_i^T sum_{j != i} S_ij O_j, not symmetrized.
std::vector<Matrix> lagrange_multipliers(const OtsmProblem& problem,
                                         const BlockOrthogonal& point);

StationarityReport stationarity(const OtsmProblem& problem, const BlockOrthogonal& point);

/// Throws ValidationError when point and problem shapes differ.
void check_compatible(const OtsmProblem& problem, const BlockOrthogonal& point);

/// The first r columns of the d x d identity.
Matrix identity_columns(Index d, Index r);

}  // namespace otsm
