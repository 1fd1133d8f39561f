#pragma once

// Dense numeric kernel: every factorization in the library goes through the
// SVD defined here, so rank decisions are made in exactly one place.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace opext {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (row/column counts, ambient dimensions).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

struct Tolerance {
  /// Singular values at or below rank_rtol * sigma_max count as zero.
  double rank_rtol = 1e-10;
  /// Absolute threshold for residual-type checks.
  double residual_atol = 1e-8;

  /// Throws PreconditionError unless both thresholds lie in (0, 1).
  void validate() const;
};

/// Thin wrapper around a full SVD with a deterministic sign convention:
/// every left singular vector is flipped so that its largest-magnitude entry
/// is positive (the matching right vector is flipped with it).
struct Svd {
  Matrix U;      // rows x rows
  Vector sigma;  // min(rows, cols), nonincreasing
  Matrix V;      // cols x cols

  /// Number of singular values strictly above rtol * sigma_max.
  Index rank(double rtol) const;
  double threshold(double rtol) const;
};

Svd svd(const Matrix& m);

/// Moore-Penrose inverse with singular values <= rank_rtol * sigma_max
/// dropped. A positive `reference` raises the cutoff to
/// rank_rtol * max(sigma_max, reference), as for null_basis.
Matrix pinv(const Matrix& m, const Tolerance& tol = {}, double reference = 0.0);

Index rank_tol(const Matrix& m, const Tolerance& tol = {});

/// Largest singular value (0 for empty or zero matrices).
double op_norm(const Matrix& m);

/// Smallest singular value that survives the rank threshold, or 0 when the
/// matrix has numerical rank zero.
double smallest_nonzero_singular_value(const Matrix& m, const Tolerance& tol = {});

/// Residuals of the four Penrose identities for a candidate inverse `g`:
/// |MGM - M|, |GMG - G|, |(MG)^T - MG|, |(GM)^T - GM| (spectral norms).
struct PenroseResiduals {
  double mgm = 0.0;
  double gmg = 0.0;
  double mg_sym = 0.0;
  double gm_sym = 0.0;

  double max() const;
};

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& g);

/// R(y) is contained in R(x) at tolerance: rank_tol([x | y']) == rank_tol(x),
/// where y' is y rescaled to x's spectral norm so the relative rank cliff
/// applies to both blocks alike.
bool range_contains(const Matrix& x, const Matrix& y, const Tolerance& tol = {});

/// Orthonormal basis of the column space (left singular vectors above the
/// rank threshold).
Matrix range_basis(const Matrix& m, const Tolerance& tol = {});

/// Orthonormal basis of the null space (right singular vectors at or below
/// the rank threshold; the whole domain when the matrix is zero). The
/// threshold is rank_rtol * max(sigma_max, reference): pass the norm of the
/// operator a product was formed from when the product itself may be pure
/// rounding noise.
Matrix null_basis(const Matrix& m, const Tolerance& tol = {}, double reference = 0.0);

/// Square root of a symmetric PSD matrix. Eigenvalues at or below
/// rank_rtol * lambda_max are set to zero before the root is taken, so
/// rank_tol(psd_sqrt(P)) == rank_tol(P).
Matrix psd_sqrt(const Matrix& p, const Tolerance& tol = {});

/// Smallest eigenvalue of the symmetric part of a square matrix.
double min_eigenvalue_sym(const Matrix& m);

/// Spectral norm of m - m^T (infinity for non-square input).
double asymmetry(const Matrix& m);

/// Throws PreconditionError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const std::string& what);

/// Vertical and horizontal concatenation with shape checks.
Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);

}  // namespace opext
