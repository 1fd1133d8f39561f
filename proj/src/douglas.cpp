#include "opext/douglas.hpp"

namespace opext {

DouglasSolution douglas_solve(const Matrix& s, const Matrix& t, const Tolerance& tol) {
  if (s.rows() != t.rows()) throw ShapeError("douglas_solve: S and T differ in row count");
  require_finite(s, "S");
  require_finite(t, "T");
  DouglasSolution out;
  Matrix x = pinv(s, tol) * t;
  const double lambda = op_norm(x);
  out.residual = op_norm(s * x - t);
  out.solvable = range_contains(s, t, tol);
  const Matrix gap = lambda * lambda * (s * s.transpose()) - t * t.transpose();
  out.certificate_min_eig = min_eigenvalue_sym(gap);
  out.certified = out.certificate_min_eig >= -tol.residual_atol;
  if (out.solvable) {
    out.x = std::move(x);
    out.lambda = lambda;
  }
  return out;
}

DualSolution dual_solve(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  if (a.cols() != b.cols()) throw ShapeError("dual_solve: A and B differ in column count");
  require_finite(a, "A");
  require_finite(b, "B");
  DualSolution out;
  Matrix x = b * pinv(a, tol);
  out.residual = op_norm(x * a - b);
  out.solvable = range_contains(a.transpose(), b.transpose(), tol);
  if (out.solvable) out.x = std::move(x);
  return out;
}

double quotient_gain(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  if (a.cols() != b.cols()) throw ShapeError("quotient_gain: A and B differ in column count");
  if (!range_contains(a.transpose(), b.transpose(), tol)) {
    throw PreconditionError("quotient_gain: N(A) is not contained in N(B)");
  }
  return op_norm(b * pinv(a, tol));
}

}  // namespace opext
