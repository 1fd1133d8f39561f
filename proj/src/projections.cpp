#include "opext/projections.hpp"

namespace opext {

Matrix orth_proj(const Subspace& s) { return s.projector(); }

Subspace nullspace(const Matrix& m, const Tolerance& tol, double reference) {
  return Subspace::from_orthonormal(null_basis(m, tol, reference));
}

Matrix cm_projection(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "cm_projection");
  const Index a = m.ambient();
  const Matrix pnperp = Matrix::Identity(a, a) - n.projector();
  // Singular values are sines of angles, so the cutoff is absolute.
  return pinv(pnperp * m.projector(), tol, 1.0);
}

Matrix oblique_projection(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "oblique_projection");
  const Index a = m.ambient();
  if (m.dim() + n.dim() != a) {
    throw PreconditionError("oblique_projection: dimensions do not add up to the ambient space");
  }
  const Matrix frame = hstack(m.basis(), n.basis());
  if (rank_tol(frame, tol) != a) {
    throw PreconditionError("oblique_projection: M and N are not complementary");
  }
  // Coordinates in the (M, N) frame; keep the M part.
  Matrix keep = Matrix::Zero(a, a);
  keep.leftCols(m.dim()) = m.basis();
  return keep * frame.inverse();
}

}  // namespace opext
