#include "otsm/core.hpp"

#include <algorithm>
#include <sstream>

namespace otsm {

namespace {

std::string shape_string(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

}  // namespace

BlockDims::BlockDims(std::vector<Index> dims, Index rank) : dims_(std::move(dims)), rank_(rank) {
  if (dims_.size() < 2) {
    throw ValidationError("BlockDims: need at least 2 blocks, got " +
                          std::to_string(dims_.size()));
  }
  if (rank_ < 1) {
    throw ValidationError("BlockDims: rank r must be positive, got " + std::to_string(rank_));
  }
  offsets_.reserve(dims_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) {
      throw ValidationError("BlockDims: d_" + std::to_string(i + 1) + " must be positive");
    }
    if (dims_[i] < rank_) {
      throw ValidationError("BlockDims: r=" + std::to_string(rank_) + " exceeds d_" +
                            std::to_string(i + 1) + "=" + std::to_string(dims_[i]));
    }
    offsets_.push_back(offsets_.back() + dims_[i]);
  }
}

OtsmProblem::OtsmProblem(BlockDims dims, BlockMap blocks)
    : dims_(std::move(dims)), blocks_(std::move(blocks)) {
  const Index m = dims_.count();
  for (const auto& [key, s] : blocks_) {
    const auto [i, j] = key;
    if (i < 0 || j >= m || i >= j) {
      throw ValidationError("OtsmProblem: block key (" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ") must satisfy 1 <= i < j <= m");
    }
    if (s.rows() != dims_.dim(i) || s.cols() != dims_.dim(j)) {
      throw ValidationError("OtsmProblem: S_" + std::to_string(i + 1) + std::to_string(j + 1) +
                            " is " + shape_string(s.rows(), s.cols()) + ", expected " +
                            shape_string(dims_.dim(i), dims_.dim(j)));
    }
    if (!s.allFinite()) {
      throw ValidationError("OtsmProblem: S_" + std::to_string(i + 1) + std::to_string(j + 1) +
                            " has non-finite entries");
    }
  }
}

Matrix OtsmProblem::block(Index i, Index j) const {
  if (i == j) return Matrix::Zero(dims_.dim(i), dims_.dim(j));
  if (i < j) {
    auto it = blocks_.find({i, j});
    return it == blocks_.end() ? Matrix::Zero(dims_.dim(i), dims_.dim(j)) : it->second;
  }
  auto it = blocks_.find({j, i});
  return it == blocks_.end() ? Matrix::Zero(dims_.dim(i), dims_.dim(j))
                             : Matrix(it->second.transpose());
}

Matrix OtsmProblem::block_gradient(const std::vector<Matrix>& blocks, Index i) const {
  Matrix g = Matrix::Zero(dims_.dim(i), blocks.at(static_cast<std::size_t>(i)).cols());
  for (const auto& [key, s] : blocks_) {
    const auto [a, b] = key;
    if (a == i) {
      g.noalias() += s * blocks[static_cast<std::size_t>(b)];
    } else if (b == i) {
      g.noalias() += s.transpose() * blocks[static_cast<std::size_t>(a)];
    }
  }
  return g;
}

BlockOrthogonal::BlockOrthogonal(BlockDims dims, std::vector<Matrix> blocks, double orth_tol)
    : dims_(std::move(dims)), blocks_(std::move(blocks)) {
  if (static_cast<Index>(blocks_.size()) != dims_.count()) {
    throw ValidationError("BlockOrthogonal: expected " + std::to_string(dims_.count()) +
                          " blocks, got " + std::to_string(blocks_.size()));
  }
  for (Index i = 0; i < dims_.count(); ++i) {
    const Matrix& o = blocks_[static_cast<std::size_t>(i)];
    if (o.rows() != dims_.dim(i) || o.cols() != dims_.rank()) {
      throw ValidationError("BlockOrthogonal: block " + std::to_string(i + 1) + " is " +
                            shape_string(o.rows(), o.cols()) + ", expected " +
                            shape_string(dims_.dim(i), dims_.rank()));
    }
    const double err = otsm::orthonormality_error(o);
    if (!(err <= orth_tol)) {
      throw ValidationError("BlockOrthogonal: block " + std::to_string(i + 1) +
                            " is not orthonormal (||O^T O - I||_F = " + std::to_string(err) +
                            ")");
    }
  }
}

Matrix BlockOrthogonal::stacked() const {
  Matrix out(dims_.total(), dims_.rank());
  for (Index i = 0; i < dims_.count(); ++i) {
    out.middleRows(dims_.offset(i), dims_.dim(i)) = block(i);
  }
  return out;
}

double BlockOrthogonal::orthonormality_error() const {
  double worst = 0.0;
  for (const auto& o : blocks_) worst = std::max(worst, otsm::orthonormality_error(o));
  return worst;
}

double orthonormality_error(const Matrix& block) {
  const Matrix gram = block.transpose() * block;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).norm();
}

void check_compatible(const OtsmProblem& problem, const BlockOrthogonal& point) {
  if (!(problem.dims() == point.dims())) {
    throw ValidationError("point dimensions do not match the problem");
  }
}

Matrix assemble_stilde(const OtsmProblem& problem) {
  const BlockDims& dims = problem.dims();
  Matrix full = Matrix::Zero(dims.total(), dims.total());
  for (const auto& [key, s] : problem.stored_blocks()) {
    const auto [i, j] = key;
    full.block(dims.offset(i), dims.offset(j), s.rows(), s.cols()) = s;
    full.block(dims.offset(j), dims.offset(i), s.cols(), s.rows()) = s.transpose();
  }
  return full;
}

double objective(const OtsmProblem& problem, const BlockOrthogonal& point) {
  check_compatible(problem, point);
  double total = 0.0;
  for (const auto& [key, s] : problem.stored_blocks()) {
    const auto [i, j] = key;
    total += (point.block(i).transpose() * s * point.block(j)).trace();
  }
  return total;
}

Matrix polar_project(const Matrix& b) {
  if (b.rows() < b.cols()) {
    throw ValidationError("polar_project: need d >= r, got " + shape_string(b.rows(), b.cols()));
  }
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("polar_project: SVD failed");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

std::vector<Matrix> lagrange_multipliers(const OtsmProblem& problem,
                                         const BlockOrthogonal& point) {
  check_compatible(problem, point);
  std::vector<Matrix> out;
  out.reserve(point.blocks().size());
  for (Index i = 0; i < point.dims().count(); ++i) {
    out.push_back(point.block(i).transpose() * problem.block_gradient(point.blocks(), i));
  }
  return out;
}

StationarityReport stationarity(const OtsmProblem& problem, const BlockOrthogonal& point) {
  check_compatible(problem, point);
  StationarityReport report;
  for (Index i = 0; i < point.dims().count(); ++i) {
    const Matrix g = problem.block_gradient(point.blocks(), i);
    const Matrix lambda = point.block(i).transpose() * g;
    const double grad = (g - point.block(i) * lambda).norm();
    const double asym = (lambda - lambda.transpose()).norm();
    report.gradient_residual.push_back(grad);
    report.asymmetry.push_back(asym);
    report.max_gradient_residual = std::max(report.max_gradient_residual, grad);
    report.max_asymmetry = std::max(report.max_asymmetry, asym);
  }
  return report;
}

Matrix identity_columns(Index d, Index r) { return Matrix::Identity(d, r); }

}  // namespace otsm
