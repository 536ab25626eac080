#include "otsm/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace otsm {

namespace {

Vector symmetric_eigenvalues(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed");
  }
  return eig.eigenvalues();
}

double min_eigenvalue(const Matrix& a) {
  const Vector ev = symmetric_eigenvalues(a);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

std::vector<double> taus_of(const std::vector<Matrix>& lambdas) {
  std::vector<double> taus;
  taus.reserve(lambdas.size());
  for (const auto& l : lambdas) taus.push_back(min_eigenvalue(symmetrized(l)));
  return taus;
}

Matrix certificate_from(const Matrix& stilde, const BlockOrthogonal& point,
                        const std::vector<Matrix>& lambdas, std::span<const double> taus) {
  const BlockDims& dims = point.dims();
  Matrix lstar = -stilde;
  for (Index i = 0; i < dims.count(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Matrix& o = point.block(i);
    const Matrix proj = o * o.transpose();
    const Index d = dims.dim(i);
    lstar.block(dims.offset(i), dims.offset(i), d, d) +=
        o * symmetrized(lambdas[k]) * o.transpose() +
        taus[k] * (Matrix::Identity(d, d) - proj);
  }
  // Restore exact symmetry lost to rounding in the products above.
  return symmetrized(lstar);
}

Matrix normalized_stack(const BlockOrthogonal& point) {
  return point.stacked() / std::sqrt(static_cast<double>(point.dims().count()));
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::CertifiedGlobal:
      return "certified_global";
    case Verdict::CertifiedNotGlobal:
      return "certified_not_global";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double CertificateReport::min_tau() const {
  return taus.empty() ? 0.0 : *std::min_element(taus.begin(), taus.end());
}

double default_tol_psd(const OtsmProblem& problem) {
  const Vector ev = symmetric_eigenvalues(assemble_stilde(problem));
  const double spectral = ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
  return 1e-6 * (1.0 + spectral);
}

Matrix certificate_matrix(const OtsmProblem& problem, const BlockOrthogonal& point) {
  const std::vector<Matrix> lambdas = lagrange_multipliers(problem, point);
  const std::vector<double> taus = taus_of(lambdas);
  return certificate_from(assemble_stilde(problem), point, lambdas, taus);
}

Matrix certificate_matrix(const OtsmProblem& problem, const BlockOrthogonal& point,
                          std::span<const double> taus) {
  if (static_cast<Index>(taus.size()) != point.dims().count()) {
    throw ValidationError("certificate_matrix: need one tau per block");
  }
  const std::vector<Matrix> lambdas = lagrange_multipliers(problem, point);
  return certificate_from(assemble_stilde(problem), point, lambdas, taus);
}

Matrix orthogonal_complement(const Matrix& o_bar) {
  const Index total = o_bar.rows();
  const Index r = o_bar.cols();
  if (r > total) throw ValidationError("orthogonal_complement: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(o_bar);
  // The trailing columns of Q span range(o_bar)^perp whenever R is nonsingular.
  const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Index k = 0; k < r; ++k) {
    if (std::abs(rr(k, k)) <= 1e-12) {
      throw ValidationError("orthogonal_complement: stacked point is rank deficient");
    }
  }
  const Matrix q = qr.householderQ() * Matrix::Identity(total, total);
  return q.rightCols(total - r);
}

Matrix reduced_certificate(const OtsmProblem& problem, const BlockOrthogonal& point) {
  const Matrix lstar = certificate_matrix(problem, point);
  const Matrix perp = orthogonal_complement(normalized_stack(point));
  return symmetrized(perp.transpose() * lstar * perp);
}

double dual_upper_bound(const OtsmProblem& problem) {
  const BlockDims& dims = problem.dims();
  const Vector ev = symmetric_eigenvalues(assemble_stilde(problem));
  return 0.5 * static_cast<double>(dims.count()) * static_cast<double>(dims.rank()) *
         ev.maxCoeff();
}

CertificateReport certify(const OtsmProblem& problem, const BlockOrthogonal& point,
                          const CertificateTolerances& tolerances) {
  check_compatible(problem, point);
  const BlockDims& dims = problem.dims();
  const Matrix stilde = assemble_stilde(problem);
  const Vector stilde_ev = symmetric_eigenvalues(stilde);

  CertificateReport report;
  report.lambdas = lagrange_multipliers(problem, point);
  report.taus = taus_of(report.lambdas);
  for (const auto& l : report.lambdas) {
    report.asymmetry = std::max(report.asymmetry, (l - l.transpose()).norm());
  }

  const Matrix lstar = certificate_from(stilde, point, report.lambdas, report.taus);
  report.lmin_full = min_eigenvalue(lstar);

  const Matrix o_bar = normalized_stack(point);
  report.null_residual = (lstar * o_bar).norm();
  const Matrix perp = orthogonal_complement(o_bar);
  report.lmin_reduced = min_eigenvalue(symmetrized(perp.transpose() * lstar * perp));

  report.dual_bound = 0.5 * static_cast<double>(dims.count()) *
                      static_cast<double>(dims.rank()) * stilde_ev.maxCoeff();
  report.tol_psd = tolerances.tol_psd.value_or(1e-6 * (1.0 + stilde_ev.cwiseAbs().maxCoeff()));
  report.tol_tau = tolerances.tol_tau;

  if (report.min_tau() < -report.tol_tau) {
    report.verdict = Verdict::CertifiedNotGlobal;
  } else if (report.lmin_full >= -report.tol_psd) {
    report.verdict = Verdict::CertifiedGlobal;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

}  // namespace otsm
