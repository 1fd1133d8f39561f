#pragma once

// Simultaneous extension of two operators: given A, B : H -> K and subspaces
// M, N of H, the operator that agrees with A on M and with B on N.

#include <cstdint>
#include <optional>

#include "opext/subspace.hpp"

namespace opext {

struct Compatibility {
  bool ok = false;
  /// max |(A - B) v| over an orthonormal basis v of M cap N.
  double residual = 0.0;
};

/// A and B coincide on M cap N, up to residual_atol * (1 + |A - B|).
Compatibility compatible(const Matrix& a, const Matrix& b, const Subspace& m,
                         const Subspace& n, const Tolerance& tol = {});

struct CriterionResult {
  bool holds = false;
  double margin = 0.0;
};

/// R(A^T - B^T) in M^perp + N^perp, decided by a rank test against an
/// orthonormal basis of the sum.
///
/// The margin measures how cheaply R(A^T - B^T) is represented in the
/// (generally non-orthogonal) frame [basis(M^perp) | basis(N^perp)]: it is
/// 1 / max |F^+ v| over unit v in that range, so it tends to zero when the
/// inclusion is about to fail (M + N close to non-closed) and is 0 when it
/// does fail. With A == B the range is empty and the margin is 1.
CriterionResult bounded_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                                  const Subspace& n, const Tolerance& tol = {});

/// (A^T - B^T)^{-1}(M^perp + N^perp) is the whole of K. For matrices this is
/// the same statement as bounded_criterion.
bool closable_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                        const Subspace& n, const Tolerance& tol = {});

/// R(A^T - B^T) + M^perp + N^perp equals M^perp + N^perp.
bool closed_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                      const Subspace& n, const Tolerance& tol = {});

struct MetricSup {
  /// max over unit m in M of |(A-B)m|^2 / (1 - |P_N m|^2).
  double kappa13 = 0.0;
  /// [kappa13, 2 kappa13] brackets the same supremum with denominator
  /// 1 - |P_N m|.
  double lower = 0.0;
  double upper = 0.0;
};

/// Throws PreconditionError if M is zero or M cap N != {0} at tolerance.
MetricSup metric_sup(const Matrix& a, const Matrix& b, const Subspace& m, const Subspace& n,
                     const Tolerance& tol = {});

/// Largest sampled value of |(A-B)m|^2 / (1 - |P_N m|) over `samples`
/// uniformly random unit vectors m in M.
double metric_sup_monte_carlo(const Matrix& a, const Matrix& b, const Subspace& m,
                              const Subspace& n, std::size_t samples, std::uint64_t seed);

struct ExtensionReport {
  bool compatible = false;
  double incompat_residual = 0.0;
  /// Equal to A on M, to B on N and to B on (M + N)^perp.
  std::optional<Matrix> c_full;
  /// Equal to c_full on M + N and zero on (M + N)^perp.
  std::optional<Matrix> c_canonical;
  bool bounded = false;
  double bounded_margin = 0.0;
  bool closable = false;
  bool closed = false;
  /// For matrices the three criteria coincide; recorded so reports say so.
  bool criteria_coincide = true;
  double extension_norm = 0.0;
  std::optional<double> metric_sup;
  /// Max agreement residuals on bases of M and N.
  double agreement_m = 0.0;
  double agreement_n = 0.0;
};

/// C = (A - B) (P_{N^perp} P_M)^+ + B together with every criterion.
/// Incompatible inputs give a report with compatible == false and no
/// matrices.
ExtensionReport build(const Matrix& a, const Matrix& b, const Subspace& m, const Subspace& n,
                      const Tolerance& tol = {});

void require_extension_shapes(const Matrix& a, const Matrix& b, const Subspace& m,
                              const Subspace& n, const char* op);

}  // namespace opext
