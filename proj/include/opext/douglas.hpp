#pragma once

// Range inclusion and factorization: T = S X (Douglas) and the dual B = X A.

#include <optional>

#include "opext/numkernel.hpp"

namespace opext {

struct DouglasSolution {
  bool solvable = false;
  /// Minimal-norm solution S^+ T.
  std::optional<Matrix> x;
  /// |S^+ T|, the smallest lambda with T T^T <= lambda^2 S S^T.
  std::optional<double> lambda;
  /// |S X - T|.
  double residual = 0.0;
  /// Smallest eigenvalue of lambda^2 S S^T - T T^T.
  double certificate_min_eig = 0.0;
  /// certificate_min_eig >= -residual_atol.
  bool certified = false;
};

/// Solve T = S X. Throws ShapeError if the row counts differ.
DouglasSolution douglas_solve(const Matrix& s, const Matrix& t, const Tolerance& tol = {});

struct DualSolution {
  bool solvable = false;
  /// B A^+.
  std::optional<Matrix> x;
  /// |X A - B|.
  double residual = 0.0;
};

/// Solve B = X A, solvable iff R(B^T) in R(A^T). Throws ShapeError if the
/// column counts differ.
DualSolution dual_solve(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

/// |B A^+|, the best constant in |Bx| <= c |Ax|. Throws PreconditionError
/// unless N(A) is contained in N(B).
double quotient_gain(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

}  // namespace opext
