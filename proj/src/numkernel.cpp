#include "opext/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opext {

void Tolerance::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
  if (!ok(rank_rtol) || !ok(residual_atol)) {
    throw PreconditionError("tolerances must lie strictly between 0 and 1");
  }
}

double Svd::threshold(double rtol) const {
  return sigma.size() == 0 ? 0.0 : rtol * sigma(0);
}

Index Svd::rank(double rtol) const {
  const double thr = threshold(rtol);
  Index r = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > thr) ++r;
  }
  return r;
}

namespace {

// Eigen's divide-and-conquer SVD occasionally returns non-orthogonal or
// inaccurate factors on clustered spectra (orthonormal columns, oblique
// projections). Every result is checked and Jacobi takes over on failure.
template <class Dec>
bool factors_ok(const Matrix& m, const Dec& dec) {
  const Matrix& u = dec.matrixU();
  const Matrix& v = dec.matrixV();
  const Vector& s = dec.singularValues();
  if (!u.allFinite() || !v.allFinite() || !s.allFinite()) return false;
  const double slack = 1e-12 * static_cast<double>(std::max<Index>(100, m.rows() + m.cols()));
  const Index k = s.size();
  if ((u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm() > slack) return false;
  if ((v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm() > slack) return false;
  const Matrix rec = u.leftCols(k) * s.asDiagonal() * v.leftCols(k).transpose();
  return (rec - m).norm() <= slack * std::max(1.0, m.norm());
}

}  // namespace

Svd svd(const Matrix& m) {
  Svd out;
  const Index rows = m.rows();
  const Index cols = m.cols();
  if (rows == 0 || cols == 0) {
    out.U = Matrix::Identity(rows, rows);
    out.V = Matrix::Identity(cols, cols);
    out.sigma = Vector(0);
    return out;
  }
  const unsigned opts = Eigen::ComputeFullU | Eigen::ComputeFullV;
  Eigen::BDCSVD<Matrix> dec(m, opts);
  if (factors_ok(m, dec)) {
    out.U = dec.matrixU();
    out.V = dec.matrixV();
    out.sigma = dec.singularValues();
  } else {
    Eigen::JacobiSVD<Matrix> jac(m, opts);
    out.U = jac.matrixU();
    out.V = jac.matrixV();
    out.sigma = jac.singularValues();
  }

  const Index k = out.sigma.size();
  for (Index j = 0; j < rows; ++j) {
    Index imax = 0;
    out.U.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.U(imax, j) < 0.0) {
      out.U.col(j) *= -1.0;
      if (j < k) out.V.col(j) *= -1.0;
    }
  }
  return out;
}

namespace {

Index rank_with_reference(const Svd& d, double rtol, double reference) {
  const double thr = std::max(d.threshold(rtol), rtol * reference);
  Index r = 0;
  for (Index i = 0; i < d.sigma.size(); ++i) {
    if (d.sigma(i) > thr) ++r;
  }
  return r;
}

}  // namespace

Matrix pinv(const Matrix& m, const Tolerance& tol, double reference) {
  const Svd d = svd(m);
  const Index r = rank_with_reference(d, tol.rank_rtol, reference);
  if (r == 0) return Matrix::Zero(m.cols(), m.rows());
  Vector inv = d.sigma.head(r).cwiseInverse();
  return d.V.leftCols(r) * inv.asDiagonal() * d.U.leftCols(r).transpose();
}

namespace {

Vector singular_values(const Matrix& m) {
  // Thin factors are kept only to validate the values.
  const unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  Eigen::BDCSVD<Matrix> dec(m, opts);
  if (factors_ok(m, dec)) return dec.singularValues();
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

}  // namespace

Index rank_tol(const Matrix& m, const Tolerance& tol) {
  if (m.size() == 0) return 0;
  const Vector s = singular_values(m);
  const double thr = tol.rank_rtol * s(0);
  return static_cast<Index>((s.array() > thr).count());
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

double smallest_nonzero_singular_value(const Matrix& m, const Tolerance& tol) {
  if (m.size() == 0) return 0.0;
  const Vector s = singular_values(m);
  const double thr = tol.rank_rtol * s(0);
  double out = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) out = s(i);
  }
  return out;
}

double PenroseResiduals::max() const {
  return std::max({mgm, gmg, mg_sym, gm_sym});
}

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& g) {
  if (g.rows() != m.cols() || g.cols() != m.rows()) {
    throw ShapeError("penrose_residuals: candidate inverse has the wrong shape");
  }
  PenroseResiduals r;
  const Matrix mg = m * g;
  const Matrix gm = g * m;
  r.mgm = op_norm(mg * m - m);
  r.gmg = op_norm(gm * g - g);
  r.mg_sym = op_norm(mg.transpose() - mg);
  r.gm_sym = op_norm(gm.transpose() - gm);
  return r;
}

bool range_contains(const Matrix& x, const Matrix& y, const Tolerance& tol) {
  if (x.rows() != y.rows()) {
    throw ShapeError("range_contains: row counts differ");
  }
  const double ny = op_norm(y);
  if (ny == 0.0) return true;
  const double nx = op_norm(x);
  if (nx == 0.0) return false;
  const Matrix joined = hstack(x, y * (nx / ny));
  return rank_tol(joined, tol) == rank_tol(x, tol);
}

Matrix range_basis(const Matrix& m, const Tolerance& tol) {
  const Svd d = svd(m);
  return d.U.leftCols(d.rank(tol.rank_rtol));
}

Matrix null_basis(const Matrix& m, const Tolerance& tol, double reference) {
  const Svd d = svd(m);
  const Index r = rank_with_reference(d, tol.rank_rtol, reference);
  return d.V.rightCols(m.cols() - r);
}

Matrix psd_sqrt(const Matrix& p, const Tolerance& tol) {
  if (p.rows() != p.cols()) throw ShapeError("psd_sqrt: matrix is not square");
  if (p.size() == 0) return p;
  const Matrix sym = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector lam = eig.eigenvalues();
  const double lmax = std::max(0.0, lam.maxCoeff());
  const double thr = tol.rank_rtol * lmax;
  for (Index i = 0; i < lam.size(); ++i) {
    lam(i) = lam(i) > thr ? std::sqrt(lam(i)) : 0.0;
  }
  const Matrix& q = eig.eigenvectors();
  return q * lam.asDiagonal() * q.transpose();
}

double min_eigenvalue_sym(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("min_eigenvalue_sym: matrix is not square");
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return op_norm(m - m.transpose());
}

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw PreconditionError(what + " contains NaN or infinite entries");
  }
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw ShapeError("vstack: column counts differ");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  if (left.rows() != right.rows()) throw ShapeError("hstack: row counts differ");
  Matrix out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

}  // namespace opext
