#include "opext/halmos.hpp"

#include <cmath>
#include <string>

namespace opext {

HalmosDecomposition decompose(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "decompose");
  const Index h = m.ambient();
  const Subspace mp = complement(m);
  const Subspace np = complement(n);

  HalmosDecomposition d{intersect(m, n, tol), intersect(m, np, tol), intersect(mp, n, tol),
                        intersect(mp, np, tol), Subspace(h), Subspace(h), Matrix(0, 0),
                        Matrix(0, 0), 0.0};

  const Subspace m0_raw = minus(m, sum(d.corner_mn, d.corner_mnp, tol), tol);
  d.m1 = minus(mp, sum(d.corner_mpn, d.corner_mpnp, tol), tol);
  if (m0_raw.dim() != d.m1.dim()) {
    throw Error("decompose: generic parts of M and M^perp differ in dimension (" +
                std::to_string(m0_raw.dim()) + " vs " + std::to_string(d.m1.dim()) +
                ") at tolerance");
  }
  const Index k = m0_raw.dim();
  if (k == 0) return d;

  const Matrix pn = n.projector();
  const Matrix id = Matrix::Identity(h, h);
  // Right singular vectors of P_{N^perp} B_{M0} are principal vectors of
  // (M0, N); the singular values are the sines of the principal angles.
  const Svd f = svd((id - pn) * m0_raw.basis());
  const Matrix principal = m0_raw.basis() * f.V;
  d.m0 = Subspace::from_orthonormal(principal);
  d.s = f.sigma.head(k).asDiagonal();

  // Partner of m_i in M1: P_{M^perp} P_N m_i = cos * sin * w_i.
  Matrix w(h, k);
  const Matrix pmp = mp.projector();
  for (Index i = 0; i < k; ++i) {
    const double sn = f.sigma(i);
    const double cs = std::sqrt(std::max(0.0, 1.0 - sn * sn));
    w.col(i) = pmp * (pn * principal.col(i)) / (cs * sn);
  }
  d.r = d.m1.basis().transpose() * w;

  const Matrix frame = hstack(d.m0.basis(), d.m1.basis());
  d.reconstruction_residual = op_norm(frame.transpose() * pn * frame - halmos_block(d));
  return d;
}

Matrix halmos_block(const HalmosDecomposition& d) {
  const Index k = d.m0.dim();
  Matrix out = Matrix::Zero(2 * k, 2 * k);
  if (k == 0) return out;
  const Vector s = d.s.diagonal();
  const Vector c = (1.0 - s.array().square()).max(0.0).sqrt().matrix();
  const Matrix sc = (s.array() * c.array()).matrix().asDiagonal();
  const Matrix s2 = s.array().square().matrix().asDiagonal();
  out.topLeftCorner(k, k) = (1.0 - s.array().square()).matrix().asDiagonal();
  out.topRightCorner(k, k) = sc * d.r.transpose();
  out.bottomLeftCorner(k, k) = d.r * sc;
  out.bottomRightCorner(k, k) = d.r * s2 * d.r.transpose();
  return out;
}

ClosednessTest closedness_test(const HalmosDecomposition& d, const Tolerance& tol) {
  if (d.m0.is_zero()) return {true, 1.0};
  const double smallest = d.s.diagonal().minCoeff();
  return {smallest > tol.rank_rtol, smallest};
}

bool bounded_via_halmos(const Matrix& a, const Matrix& b, const HalmosDecomposition& d,
                        const Tolerance& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("bounded_via_halmos: A and B differ in shape");
  }
  if (a.cols() != d.m0.ambient()) {
    throw ShapeError("bounded_via_halmos: operators and decomposition live in different spaces");
  }
  if (d.m0.is_zero()) return true;
  const Matrix dm = (a - b) * d.m0.basis();
  return range_contains(d.s, dm.transpose(), tol);
}

}  // namespace opext
