#include <gtest/gtest.h>

#include <random>

#include "otsm/builders.hpp"
#include "otsm/certificate.hpp"
#include "otsm/solver.hpp"
#include "support/oracles.hpp"

namespace otsm {
namespace {

SolverConfig spectral() {
  SolverConfig c;
  c.init = SpectralInit{};
  return c;
}

TEST(Maxdiff, IdenticalViews) {
  const ViewData data{{Matrix::Identity(2, 2), Matrix::Identity(2, 2)}};
  EXPECT_NEAR(solve(build_maxdiff(data, 1), spectral()).final_objective(), 1.0, 1e-8);
  EXPECT_NEAR(solve(build_maxdiff(data, 2)).final_objective(), 2.0, 1e-12);
}

TEST(Maxdiff, StildeIsGramMinusDiagonalBlocks) {
  std::mt19937_64 rng(3);
  const ViewData data{{testing::gaussian(6, 2, rng), testing::gaussian(6, 3, rng), testing::gaussian(6, 4, rng)}};
  Matrix stacked(6, 9);
  stacked << data.views[0], data.views[1], data.views[2];
  Matrix expected = stacked.transpose() * stacked;
  expected.block(0, 0, 2, 2).setZero();
  expected.block(2, 2, 3, 3).setZero();
  expected.block(5, 5, 4, 4).setZero();
  EXPECT_NEAR((assemble_stilde(build_maxdiff(data, 2)) - expected).norm(), 0.0, 1e-12);
}

TEST(Maxdiff, RejectsInconsistentViews) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(build_maxdiff({{testing::gaussian(5, 2, rng), testing::gaussian(4, 2, rng)}}, 1),
               ValidationError);
  EXPECT_THROW(build_maxdiff({{testing::gaussian(5, 2, rng)}}, 1), ValidationError);
  EXPECT_THROW(build_maxdiff({{testing::gaussian(5, 2, rng), testing::gaussian(5, 1, rng)}}, 2),
               ValidationError);
}

TEST(Procrustes, ExactlyRotatedCopyHasZeroDiscrepancy) {
  std::mt19937_64 rng(11);
  const Matrix a1 = testing::gaussian(20, 3, rng);
  const Matrix q = testing::random_stiefel(3, 3, rng);
  const ViewData data{{a1, a1 * q}};
  const auto gpa = build_procrustes(data, 3);
  EXPECT_NEAR(gpa.offset, 2.0 * a1.squaredNorm(), 1e-10);

  const auto rep = solve(gpa.problem, spectral());
  const double direct = procrustes_discrepancy(data, rep.solution);
  EXPECT_LE(direct, 1e-8 * gpa.offset);
  EXPECT_NEAR(gpa.discrepancy_from_objective(rep.final_objective()), direct, 1e-8 * gpa.offset);
}

TEST(Procrustes, DiscrepancyIdentityAtRandomRotations) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 2 + trial % 4;
    ViewData data;
    std::vector<Matrix> rotations;
    for (Index i = 0; i < m; ++i) {
      data.views.push_back(testing::gaussian(8, 3, rng));
      rotations.push_back(testing::random_stiefel(3, 3, rng));
    }
    const auto gpa = build_procrustes(data, 3);
    const BlockOrthogonal point(gpa.problem.dims(), rotations);
    const double direct = procrustes_discrepancy(data, point);
    EXPECT_NEAR(gpa.discrepancy_from_objective(objective(gpa.problem, point)), direct,
                1e-10 * (1.0 + direct));
  }
}

TEST(Procrustes, RejectsUnequalWidths) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(build_procrustes({{testing::gaussian(5, 3, rng), testing::gaussian(5, 2, rng)}}, 2),
               ValidationError);
}

TEST(Ols, SingleRegressorRecoversRotation) {
  std::mt19937_64 rng(21);
  const Matrix a = testing::gaussian(30, 4, rng);
  const Matrix q = testing::random_stiefel(4, 4, rng);
  const OlsData data{a * q, {a}};
  const auto ols = build_ols(data);
  const auto rotations = ols.recover(solve(ols.problem, spectral()).solution);
  ASSERT_EQ(rotations.size(), 1u);
  EXPECT_LE((rotations[0] - q).norm(), 1e-6);
  EXPECT_LE(ols_criterion(data, rotations), 1e-8);
}

TEST(Ols, CriterionMatchesObjectiveIdentity) {
  // 0.5 ||Y - sum A_i R_i||^2 = 0.5 sum ||A_i||^2 + 0.5 ||Y||^2 - f(O)
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 3;
    OlsData data{testing::gaussian(10, 3, rng), {}};
    double total = data.target.squaredNorm();
    for (std::size_t i = 0; i < k; ++i) {
      data.regressors.push_back(testing::gaussian(10, 3, rng));
      total += data.regressors.back().squaredNorm();
    }
    const auto ols = build_ols(data);
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i <= k; ++i) blocks.push_back(testing::random_stiefel(3, 3, rng));
    const BlockOrthogonal point(ols.problem.dims(), blocks);
    EXPECT_NEAR(ols_criterion(data, ols.recover(point)), 0.5 * total - objective(ols.problem, point),
                1e-10 * (1.0 + total));
  }
}

TEST(Ols, NoiselessTwoRegressors) {
  std::mt19937_64 rng(23);
  int exact = 0;
  for (int trial = 0; trial < 10; ++trial) {
    OlsData data{Matrix::Zero(40, 3), {testing::gaussian(40, 3, rng), testing::gaussian(40, 3, rng)}};
    for (const auto& a : data.regressors) data.target += a * testing::random_stiefel(3, 3, rng);
    const auto ols = build_ols(data);
    const auto rotations = ols.recover(solve(ols.problem, spectral()).solution);
    for (const auto& r : rotations) EXPECT_LE(orthonormality_error(r), 1e-10);
    if (ols_criterion(data, rotations) <= 1e-6 * data.target.squaredNorm()) ++exact;
  }
  EXPECT_GE(exact, 8);
}

TEST(Ols, ZeroTargetDoesNotIncreaseCriterion) {
  std::mt19937_64 rng(24);
  OlsData data{Matrix::Zero(12, 2), {testing::gaussian(12, 2, rng), testing::gaussian(12, 2, rng)}};
  const auto ols = build_ols(data);
  const auto rotations = ols.recover(solve(ols.problem).solution);
  const double start = 0.5 * (data.regressors[0] + data.regressors[1]).squaredNorm();
  EXPECT_LE(ols_criterion(data, rotations), start + 1e-10);
}

TEST(Ols, Validation) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(build_ols({testing::gaussian(5, 2, rng), {}}), ValidationError);
  EXPECT_THROW(build_ols({testing::gaussian(5, 2, rng), {testing::gaussian(5, 3, rng)}}), ValidationError);
  EXPECT_THROW(ols_criterion({testing::gaussian(5, 2, rng), {testing::gaussian(5, 2, rng)}}, {}),
               ValidationError);
}

TEST(HardExample, ScalarBruteForce) {
  const OtsmProblem p = hard_example(1, 1);
  double best = -1e300;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<Matrix> o;
    for (int i = 0; i < 3; ++i) o.push_back(Matrix::Constant(1, 1, (mask >> i) & 1 ? -1.0 : 1.0));
    best = std::max(best, objective(p, BlockOrthogonal(p.dims(), o)));
  }
  EXPECT_EQ(best, 1.0);
  EXPECT_NEAR(solve(p, spectral()).final_objective(), 1.0, 1e-8);
}

TEST(Synthetic, ShapesAndGroundTruth) {
  const auto s = synth_procrustes(4, 30, 5, 2, 0.5, 17);
  ASSERT_EQ(s.data.views.size(), 4u);
  ASSERT_EQ(s.ground_truth.size(), 4u);
  for (const auto& a : s.data.views) {
    EXPECT_EQ(a.rows(), 30);
    EXPECT_EQ(a.cols(), 5);
  }
  for (const auto& r : s.ground_truth) EXPECT_LE(orthonormality_error(r), 1e-12);
  EXPECT_EQ(s.problem.dims().rank(), 2);
  EXPECT_EQ(s.problem.dims().count(), 4);
}

TEST(Synthetic, NoiselessViewsAreRotatedCopies) {
  const auto s = synth_procrustes(3, 25, 4, 4, 0.0, 5);
  // A_i R_i = L for all i.
  const Matrix l0 = s.data.views[0] * s.ground_truth[0];
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_LE((s.data.views[i] * s.ground_truth[i] - l0).norm(), 1e-10);
  }
}

TEST(Synthetic, Reproducible) {
  const auto a = synth_procrustes(3, 10, 4, 2, 1.0, 99);
  const auto b = synth_procrustes(3, 10, 4, 2, 1.0, 99);
  const auto c = synth_procrustes(3, 10, 4, 2, 1.0, 100);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.data.views[i], b.data.views[i]);
    EXPECT_EQ(a.ground_truth[i], b.ground_truth[i]);
  }
  EXPECT_NE(a.data.views[0], c.data.views[0]);
  // Rotations do not depend on sigma.
  const auto d = synth_procrustes(3, 10, 4, 2, 7.0, 99);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.ground_truth[i], d.ground_truth[i]);
  EXPECT_THROW(synth_procrustes(3, 10, 4, 2, -1.0, 1), ValidationError);
}

TEST(Synthetic, NoiselessInstancesCertify) {
  int certified = 0;
  for (int k = 0; k < 50; ++k) {
    const auto s = synth_procrustes(5, 100, 10, 3, 0.0, 1000 + static_cast<std::uint64_t>(k));
    const auto rep = solve(s.problem, spectral());
    if (certify(s.problem, rep.solution).verdict == Verdict::CertifiedGlobal) ++certified;
  }
  EXPECT_GE(certified, 50);
}

TEST(RandomMatrix, OrthogonalIsOrthogonal) {
  std::mt19937_64 rng(4);
  for (Index d = 1; d <= 6; ++d) {
    const Matrix q = random_orthogonal(d, rng);
    EXPECT_LE((q.transpose() * q - Matrix::Identity(d, d)).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace otsm
