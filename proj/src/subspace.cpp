#include "opext/subspace.hpp"

#include <algorithm>
#include <string>

namespace opext {

Subspace::Subspace(Index ambient) : basis_(Matrix::Zero(ambient, 0)) {}

Subspace::Subspace(Matrix basis, int) : basis_(std::move(basis)) {}

Subspace Subspace::from_orthonormal(Matrix basis) {
  require_finite(basis, "subspace basis");
  if (basis.cols() > basis.rows()) {
    throw PreconditionError("subspace basis has more columns than rows");
  }
  if (basis.cols() > 0) {
    const Matrix gram = basis.transpose() * basis;
    const double dev = (gram - Matrix::Identity(gram.rows(), gram.cols())).norm();
    if (dev > 1e-10) {
      throw PreconditionError("subspace basis is not orthonormal (deviation " +
                              std::to_string(dev) + ")");
    }
  }
  return Subspace(std::move(basis), 0);
}

Subspace Subspace::full(Index ambient) {
  return Subspace(Matrix::Identity(ambient, ambient), 0);
}

Matrix Subspace::projector() const { return basis_ * basis_.transpose(); }

double Subspace::distance(const Vector& v) const {
  if (v.size() != ambient()) throw ShapeError("Subspace::distance: dimension mismatch");
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

void require_same_ambient(const Subspace& m, const Subspace& n, const char* op) {
  if (m.ambient() != n.ambient()) {
    throw ShapeError(std::string(op) + ": ambient dimensions differ (" +
                     std::to_string(m.ambient()) + " vs " +
                     std::to_string(n.ambient()) + ")");
  }
}

Subspace span_of(const Matrix& m, const Tolerance& tol) {
  return Subspace::from_orthonormal(range_basis(m, tol));
}

Subspace complement(const Subspace& s) {
  const Index n = s.ambient();
  if (s.is_zero()) return Subspace::full(n);
  const Svd d = svd(s.basis());
  return Subspace::from_orthonormal(d.U.rightCols(n - s.dim()));
}

Subspace intersect(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "intersect");
  const Index a = m.ambient();
  if (m.is_zero() || n.is_zero()) return Subspace(a);
  const Matrix id = Matrix::Identity(a, a);
  const Matrix stacked = vstack(id - m.projector(), id - n.projector());
  return Subspace::from_orthonormal(null_basis(stacked, tol, 1.0));
}

Subspace sum(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "sum");
  if (m.is_zero()) return n;
  if (n.is_zero()) return m;
  return span_of(hstack(m.basis(), n.basis()), tol);
}

Subspace minus(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "minus");
  return intersect(m, complement(n), tol);
}

Vector principal_angles(const Subspace& m, const Subspace& n) {
  require_same_ambient(m, n, "principal_angles");
  if (m.is_zero() || n.is_zero()) {
    throw PreconditionError("principal_angles: zero subspace");
  }
  const Matrix cross = m.basis().transpose() * n.basis();
  Vector c = svd(cross).sigma;
  for (Index i = 0; i < c.size(); ++i) c(i) = std::clamp(c(i), 0.0, 1.0);
  return c;
}

bool subspace_eq(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "subspace_eq");
  if (m.dim() != n.dim()) return false;
  if (m.is_zero()) return true;
  const Vector c = principal_angles(m, n);
  return c.minCoeff() >= 1.0 - tol.residual_atol;
}

bool subspace_leq(const Subspace& inner, const Subspace& outer, const Tolerance& tol) {
  require_same_ambient(inner, outer, "subspace_leq");
  if (inner.is_zero()) return true;
  const Matrix resid = inner.basis() - outer.basis() * (outer.basis().transpose() * inner.basis());
  return op_norm(resid) <= tol.residual_atol;
}

}  // namespace opext
