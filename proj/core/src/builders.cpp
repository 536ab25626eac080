#include "otsm/builders.hpp"

#include <random>

namespace otsm {

namespace {

void check_views(const std::vector<Matrix>& views, const char* who) {
  if (views.size() < 2) {
    throw ValidationError(std::string(who) + ": need at least 2 views");
  }
  const Index n = views.front().rows();
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].rows() != n) {
      throw ValidationError(std::string(who) + ": view " + std::to_string(i + 1) + " has " +
                            std::to_string(views[i].rows()) + " rows, expected " +
                            std::to_string(n));
    }
  }
}

BlockDims dims_of(const std::vector<Matrix>& views, Index rank) {
  std::vector<Index> dims;
  dims.reserve(views.size());
  for (const auto& a : views) dims.push_back(a.cols());
  return BlockDims(std::move(dims), rank);
}

OtsmProblem::BlockMap cross_products(const std::vector<Matrix>& views, double sign) {
  OtsmProblem::BlockMap blocks;
  const auto m = static_cast<Index>(views.size());
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      blocks.emplace(std::pair{i, j}, sign * views[static_cast<std::size_t>(i)].transpose() *
                                          views[static_cast<std::size_t>(j)]);
    }
  }
  return blocks;
}

}  // namespace

OtsmProblem build_maxdiff(const ViewData& data, Index rank) {
  check_views(data.views, "build_maxdiff");
  return OtsmProblem(dims_of(data.views, rank), cross_products(data.views, 1.0));
}

double ProcrustesProblem::discrepancy_from_objective(double objective_value) const {
  const auto m = static_cast<double>(problem.dims().count());
  return (m - 1.0) * offset - 2.0 * objective_value;
}

ProcrustesProblem build_procrustes(const ViewData& data, Index rank) {
  check_views(data.views, "build_procrustes");
  const Index d = data.views.front().cols();
  double offset = 0.0;
  for (std::size_t i = 0; i < data.views.size(); ++i) {
    if (data.views[i].cols() != d) {
      throw ValidationError("build_procrustes: view " + std::to_string(i + 1) + " has " +
                            std::to_string(data.views[i].cols()) + " columns, expected " +
                            std::to_string(d));
    }
    offset += data.views[i].squaredNorm();
  }
  return {OtsmProblem(dims_of(data.views, rank), cross_products(data.views, 1.0)), offset};
}

double procrustes_discrepancy(const ViewData& data, const BlockOrthogonal& point) {
  const auto m = data.views.size();
  if (static_cast<Index>(m) != point.dims().count()) {
    throw ValidationError("procrustes_discrepancy: view count does not match point");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      total += (data.views[i] * point.block(static_cast<Index>(i)) -
                data.views[j] * point.block(static_cast<Index>(j)))
                   .squaredNorm();
    }
  }
  // Ordered pairs count each unordered pair twice; the 1/2 cancels that.
  return total;
}

OlsProblem build_ols(const OlsData& data) {
  if (data.regressors.empty()) {
    throw ValidationError("build_ols: need at least one regressor");
  }
  std::vector<Matrix> views = data.regressors;
  views.push_back(data.target);
  check_views(views, "build_ols");
  const Index d = data.target.cols();
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].cols() != d) {
      throw ValidationError("build_ols: matrix " + std::to_string(i + 1) + " has " +
                            std::to_string(views[i].cols()) + " columns, expected " +
                            std::to_string(d));
    }
  }
  return {OtsmProblem(dims_of(views, d), cross_products(views, -1.0))};
}

std::vector<Matrix> OlsProblem::recover(const BlockOrthogonal& solution) const {
  check_compatible(problem, solution);
  const Index k = problem.dims().count() - 1;
  if (problem.dims().rank() != problem.dims().dim(k)) {
    throw ValidationError("OlsProblem::recover: requires square orthogonal blocks (r = d)");
  }
  const Matrix& last = solution.block(k);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) out.push_back(-solution.block(i) * last.transpose());
  return out;
}

double ols_criterion(const OlsData& data, const std::vector<Matrix>& rotations) {
  if (rotations.size() != data.regressors.size()) {
    throw ValidationError("ols_criterion: need one rotation per regressor");
  }
  Matrix residual = data.target;
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    residual -= data.regressors[i] * rotations[i];
  }
  return 0.5 * residual.squaredNorm();
}

OtsmProblem hard_example(Index d, Index rank) {
  const Matrix eye = Matrix::Identity(d, d);
  OtsmProblem::BlockMap blocks;
  blocks.emplace(std::pair<Index, Index>{0, 1}, -eye);
  blocks.emplace(std::pair<Index, Index>{0, 2}, eye);
  blocks.emplace(std::pair<Index, Index>{1, 2}, eye);
  return OtsmProblem(BlockDims({d, d, d}, rank), std::move(blocks));
}

SyntheticProcrustes synth_procrustes(Index m, Index n, Index d, Index rank, double sigma,
                                     std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("synth_procrustes: sigma must be nonnegative");
  if (n < 1) throw ValidationError("synth_procrustes: n must be positive");
  std::mt19937_64 rng(seed);
  const Matrix landmarks = random_gaussian(n, d, rng);

  ViewData data;
  std::vector<Matrix> truth;
  data.views.reserve(static_cast<std::size_t>(m));
  truth.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    Matrix rotation = random_orthogonal(d, rng);
    // Noise is always drawn so that the rotations do not depend on sigma.
    const Matrix noise = random_gaussian(n, d, rng);
    data.views.push_back(landmarks * rotation.transpose() + sigma * noise);
    truth.push_back(std::move(rotation));
  }
  OtsmProblem problem = build_maxdiff(data, rank);
  SyntheticProcrustes out{std::move(data), std::move(problem), std::move(truth)};
  return out;
}

}  // namespace otsm
