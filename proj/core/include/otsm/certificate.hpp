#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "otsm/core.hpp"

namespace otsm {

enum class Verdict { CertifiedGlobal, CertifiedNotGlobal, Inconclusive };

std::string_view to_string(Verdict verdict);

struct CertificateTolerances {
  /// PSD tolerance on lambda_min(L*). Unset means 1e-6 * (1 + ||S~||_2).
  std::optional<double> tol_psd;
  /// A tau_i below -tol_tau proves the point is not a global maximizer.
  double tol_tau = 1e-8;
};

/// Global-optimality diagnosis of a candidate point.
///
/// The verdict is advisory. Raw eigenvalues are always reported so callers can
/// re-judge with their own tolerances.
struct CertificateReport {
  /// Lambda_i = O_i^T sum_{j != i} S_ij O_j, as computed (not symmetrized).
  std::vector<Matrix> lambdas;
  /// Smallest eigenvalue of (Lambda_i + Lambda_i^T) / 2.
  std::vector<double> taus;
  double lmin_full = 0.0;
  double lmin_reduced = 0.0;
  double dual_bound = 0.0;
  /// max_i ||Lambda_i - Lambda_i^T||_F
  double asymmetry = 0.0;
  /// ||L* O_bar||_F with O_bar = m^{-1/2} [O_1; ...; O_m]; zero at exact stationary points.
  double null_residual = 0.0;
  double tol_psd = 0.0;
  double tol_tau = 0.0;
  Verdict verdict = Verdict::Inconclusive;

  double min_tau() const;
};

/// 1e-6 * (1 + ||S~||_2)
double default_tol_psd(const OtsmProblem& problem);

/// L* = blockdiag(O_i Lbar_i O_i^T + tau_i (I - O_i O_i^T)) - S~, where Lbar_i is
/// the symmetrized multiplier and tau_i its smallest eigenvalue.
Matrix certificate_matrix(const OtsmProblem& problem, const BlockOrthogonal& point);

/// Same as above with caller-supplied tau_i (one per block).
Matrix certificate_matrix(const OtsmProblem& problem, const BlockOrthogonal& point,
                          std::span<const double> taus);

/// (O_bar^perp)^T L* O_bar^perp, the (D-r) x (D-r) restriction of L* to the
/// orthogonal complement of the stacked point.
Matrix reduced_certificate(const OtsmProblem& problem, const BlockOrthogonal& point);

/// Orthonormal basis of the complement of range(o_bar), D x (D - r). o_bar
/// needs full column rank, not exact orthonormality.
Matrix orthogonal_complement(const Matrix& o_bar);

/// (m/2) * r * lambda_max(S~), from the closed-form feasible dual point.
double dual_upper_bound(const OtsmProblem& problem);

/// Verdict: some tau_i < -tol_tau gives CertifiedNotGlobal; otherwise
/// lambda_min(L*) >= -tol_psd gives CertifiedGlobal; otherwise Inconclusive.
CertificateReport certify(const OtsmProblem& problem, const BlockOrthogonal& point,
                          const CertificateTolerances& tolerances = {});

}  // namespace otsm
