#include "opext/quotients.hpp"

#include <algorithm>
#include <cmath>

#include "opext/projections.hpp"

namespace opext {

QuotientOp::QuotientOp(Matrix a, Matrix b, Tolerance tol)
    : a_(std::move(a)), b_(std::move(b)), tol_(tol) {
  tol_.validate();
  require_finite(a_, "quotient A");
  require_finite(b_, "quotient B");
  if (a_.cols() != b_.cols()) {
    throw ShapeError("QuotientOp: A and B must have the same number of columns");
  }
  // N(A) in N(B)  <=>  R(B^T) in R(A^T).
  if (!range_contains(a_.transpose(), b_.transpose(), tol_)) {
    throw PreconditionError("QuotientOp: N(A) is not contained in N(B)");
  }
}

Subspace QuotientOp::domain(const Tolerance& tol) const { return span_of(a_, tol); }

Subspace QuotientOp::graph(const Tolerance& tol) const { return span_of(vstack(a_, b_), tol); }

QuotientApply q_apply(const QuotientOp& q, const Vector& x) {
  if (x.size() != q.domain_ambient()) {
    throw ShapeError("q_apply: vector does not live in the domain space");
  }
  const Matrix ap = pinv(q.a(), q.tol());
  const Vector u = ap * x;
  QuotientApply out;
  out.value = q.b() * u;
  out.membership_residual = (q.a() * u - x).norm();
  return out;
}

Matrix to_matrix(const QuotientOp& q) { return q.b() * pinv(q.a(), q.tol()); }

namespace {

void require_psd(const Matrix& p, const Tolerance& tol, const char* what) {
  if (p.rows() != p.cols()) throw ShapeError(std::string(what) + " is not square");
  const double scale = 1.0 + op_norm(p);
  if (asymmetry(p) > tol.residual_atol * scale) {
    throw PreconditionError(std::string(what) + " is not symmetric");
  }
  if (p.size() > 0 && min_eigenvalue_sym(p) < -tol.residual_atol * scale) {
    throw PreconditionError(std::string(what) + " is not positive semidefinite");
  }
}

}  // namespace

Matrix parallel_sum(const Matrix& p, const Matrix& q, const Tolerance& tol) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw ShapeError("parallel_sum: operands differ in shape");
  }
  require_psd(p, tol, "parallel_sum: first operand");
  require_psd(q, tol, "parallel_sum: second operand");
  const Matrix raw = q * pinv(p + q, tol) * p;
  // Round-off leaves eigenvalues near eps |P + Q| where the ranges only meet
  // at zero; drop them against the operands' scale, not the result's.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(0.5 * (raw + raw.transpose())));
  const double cut = tol.rank_rtol * std::max(op_norm(p), op_norm(q));
  Vector lam = eig.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) <= cut) lam(i) = 0.0;
  }
  const Matrix& v = eig.eigenvectors();
  return v * lam.asDiagonal() * v.transpose();
}

QuotientOp q_add(const QuotientOp& q1, const QuotientOp& q2) {
  if (q1.domain_ambient() != q2.domain_ambient() ||
      q1.codomain_ambient() != q2.codomain_ambient()) {
    throw ShapeError("q_add: quotients act between different spaces");
  }
  const Tolerance& tol = q1.tol();
  const Matrix s = parallel_sum(q1.a() * q1.a().transpose(), q2.a() * q2.a().transpose(), tol);
  Matrix rep = psd_sqrt(s, tol);
  Matrix act = (to_matrix(q1) + to_matrix(q2)) * rep;
  return QuotientOp(std::move(rep), std::move(act), tol);
}

QuotientOp q_join(const QuotientOp& q1, const QuotientOp& q2) {
  if (q1.domain_ambient() != q2.domain_ambient() ||
      q1.codomain_ambient() != q2.codomain_ambient()) {
    throw ShapeError("q_join: quotients act between different spaces");
  }
  return QuotientOp(hstack(q1.a(), q2.a()), hstack(q1.b(), q2.b()), q1.tol());
}

QuotientClass classify(const QuotientOp& q) {
  QuotientClass c;
  c.bounded = range_contains(q.a().transpose(), q.b().transpose(), q.tol());
  c.bounded_margin = op_norm(to_matrix(q));
  const Matrix stacked = vstack(q.a(), q.b());
  const double top = op_norm(stacked);
  c.closed_margin = top > 0.0 ? smallest_nonzero_singular_value(stacked, q.tol()) / top : 1.0;
  return c;
}

PreimageDecomposition preimage_decomposition(const Matrix& a, const Matrix& b,
                                             const Tolerance& tol) {
  // Validates N(A) in N(B).
  const QuotientOp q(a, b, tol);
  const Index k = b.rows();
  const Index f = a.cols();

  const Matrix bt = b.transpose();
  const Matrix perp = Matrix::Identity(f, f) - orth_proj(span_of(a.transpose(), tol));
  Subspace direct = k == 0 ? Subspace(0) : nullspace(perp * bt, tol, op_norm(b));

  const Matrix s = parallel_sum(a.transpose() * a, bt * b, tol);
  const Matrix gen = pinv(bt, tol) * psd_sqrt(s, tol);
  Subspace kernel_bt = k == 0 ? Subspace(0) : nullspace(bt, tol);
  Subspace via = sum(kernel_bt, span_of(gen, tol), tol);

  PreimageDecomposition out{direct, via, false};
  out.agree = subspace_eq(out.direct, out.via_parallel_sum, tol);
  return out;
}

double graph_isometry_residual(const QuotientOp& q) {
  const Tolerance& tol = q.tol();
  // D = (A^T A + B^T B)^{1/2} = V S V^T from the SVD [A; B] = U S V^T.
  const Svd st = svd(vstack(q.a(), q.b()));
  const Index r = st.rank(tol.rank_rtol);
  const Matrix vr = st.V.leftCols(r);
  const Matrix dp = vr * st.sigma.head(r).cwiseInverse().asDiagonal() * vr.transpose();
  const Matrix basis = range_basis(hstack(q.a().transpose(), q.b().transpose()), tol);
  double worst = 0.0;
  for (Index j = 0; j < basis.cols(); ++j) {
    const Vector x = basis.col(j);
    const Vector u = dp * x;
    const double lhs = (q.a() * u).squaredNorm() + (q.b() * u).squaredNorm();
    worst = std::max(worst, std::abs(lhs - x.squaredNorm()));
  }
  return worst;
}

}  // namespace opext
