#include "opext/paired.hpp"

#include <algorithm>
#include <cmath>

namespace opext {

namespace {

Eigen::Vector2d take(const Vector& x, Index n, Index i) {
  return {x(i), x(n + i)};
}

void put(Vector& x, Index n, Index i, const Eigen::Vector2d& v) {
  x(i) = v(0);
  x(n + i) = v(1);
}

Matrix apply_blocks_transposed(const std::vector<Block2>& blocks, Index n, const Matrix& v) {
  Matrix out(v.rows(), v.cols());
  for (Index c = 0; c < v.cols(); ++c) {
    Vector col = v.col(c);
    Vector res(2 * n);
    for (Index i = 0; i < n; ++i) put(res, n, i, blocks[i].transpose() * take(col, n, i));
    out.col(c) = res;
  }
  return out;
}

/// Thin SVD of u v^T: returns (left, sigma, right) with u v^T = left diag(sigma) right^T.
struct LowRankSvd {
  Matrix left;
  Vector sigma;
  Matrix right;
};

LowRankSvd low_rank_svd(const Matrix& u, const Matrix& v) {
  Eigen::HouseholderQR<Matrix> qu(u);
  Eigen::HouseholderQR<Matrix> qv(v);
  const Index r = u.cols();
  const Matrix qu_thin = qu.householderQ() * Matrix::Identity(u.rows(), r);
  const Matrix qv_thin = qv.householderQ() * Matrix::Identity(v.rows(), r);
  const Matrix ru = qu.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Matrix rv = qv.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Svd core = svd(ru * rv.transpose());
  return {qu_thin * core.U, core.sigma, qv_thin * core.V};
}

}  // namespace

PairedOp::PairedOp(Index n) : n_(n), u_(2 * n, 0), v_(2 * n, 0) {}

PairedOp PairedOp::from_blocks(std::vector<Block2> blocks) {
  PairedOp out(static_cast<Index>(blocks.size()));
  out.blocks_ = std::move(blocks);
  return out;
}

PairedOp PairedOp::low_rank(Matrix u, Matrix v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() % 2 != 0) {
    throw ShapeError("PairedOp::low_rank: factors must both be 2n x r");
  }
  PairedOp out(u.rows() / 2);
  out.u_ = std::move(u);
  out.v_ = std::move(v);
  return out;
}

Matrix PairedOp::to_dense() const {
  const Index n = n_;
  Matrix out = u_ * v_.transpose();
  if (out.size() == 0) out = Matrix::Zero(2 * n, 2 * n);
  for (Index i = 0; i < static_cast<Index>(blocks_.size()); ++i) {
    const Block2& b = blocks_[i];
    out(i, i) += b(0, 0);
    out(i, n + i) += b(0, 1);
    out(n + i, i) += b(1, 0);
    out(n + i, n + i) += b(1, 1);
  }
  return out;
}

Vector PairedOp::apply(const Vector& x) const {
  if (x.size() != 2 * n_) throw ShapeError("PairedOp::apply: dimension mismatch");
  Vector out = Vector::Zero(2 * n_);
  for (Index i = 0; i < static_cast<Index>(blocks_.size()); ++i) {
    put(out, n_, i, blocks_[i] * take(x, n_, i));
  }
  if (has_low_rank()) out += u_ * (v_.transpose() * x);
  return out;
}

PairedOp PairedOp::times_blocks(const PairedOp& other) const {
  if (other.n_ != n_) throw ShapeError("PairedOp::times_blocks: size mismatch");
  if (other.has_low_rank()) {
    throw PreconditionError("PairedOp::times_blocks: right factor must be block diagonal");
  }
  PairedOp out(n_);
  if (!other.has_blocks()) return out;
  if (has_blocks()) {
    out.blocks_.resize(n_);
    for (Index i = 0; i < n_; ++i) out.blocks_[i] = blocks_[i] * other.blocks_[i];
  }
  if (has_low_rank()) {
    out.u_ = u_;
    out.v_ = apply_blocks_transposed(other.blocks_, n_, v_);
  }
  return out;
}

PairedOp PairedOp::plus(const PairedOp& other) const {
  if (other.n_ != n_) throw ShapeError("PairedOp::plus: size mismatch");
  PairedOp out(n_);
  if (has_blocks() || other.has_blocks()) {
    out.blocks_.assign(n_, Block2::Zero());
    for (Index i = 0; i < n_; ++i) {
      if (has_blocks()) out.blocks_[i] += blocks_[i];
      if (other.has_blocks()) out.blocks_[i] += other.blocks_[i];
    }
  }
  out.u_ = hstack(u_, other.u_);
  out.v_ = hstack(v_, other.v_);
  return out;
}

PairedOp PairedOp::scaled(double s) const {
  PairedOp out = *this;
  for (Block2& b : out.blocks_) b *= s;
  out.u_ *= s;
  return out;
}

double PairedOp::op_norm(Index dense_limit) const {
  if (has_blocks() && has_low_rank()) {
    if (2 * n_ > dense_limit) {
      throw PreconditionError("PairedOp::op_norm: mixed operator too large to densify");
    }
    return opext::op_norm(to_dense());
  }
  if (has_low_rank()) {
    const LowRankSvd s = low_rank_svd(u_, v_);
    return s.sigma.size() == 0 ? 0.0 : s.sigma(0);
  }
  double best = 0.0;
  for (const Block2& b : blocks_) best = std::max(best, opext::op_norm(b));
  return best;
}

Vector PairedOp::pinv_apply(const Vector& z, const Tolerance& tol, Index dense_limit) const {
  if (z.size() != 2 * n_) throw ShapeError("PairedOp::pinv_apply: dimension mismatch");
  if (has_blocks() && has_low_rank()) {
    if (2 * n_ > dense_limit) {
      throw PreconditionError("PairedOp::pinv_apply: mixed operator too large to densify");
    }
    return pinv(to_dense(), tol) * z;
  }
  if (has_low_rank()) {
    const LowRankSvd s = low_rank_svd(u_, v_);
    const Index r = s.sigma.size();
    if (r == 0 || s.sigma(0) == 0.0) return Vector::Zero(2 * n_);
    const double thr = tol.rank_rtol * s.sigma(0);
    Vector coeff = s.left.transpose() * z;
    for (Index i = 0; i < r; ++i) coeff(i) = s.sigma(i) > thr ? coeff(i) / s.sigma(i) : 0.0;
    return s.right * coeff;
  }
  Vector out = Vector::Zero(2 * n_);
  if (!has_blocks()) return out;
  std::vector<Svd> parts;
  parts.reserve(blocks_.size());
  double top = 0.0;
  for (const Block2& b : blocks_) {
    parts.push_back(svd(b));
    top = std::max(top, parts.back().sigma(0));
  }
  const double thr = tol.rank_rtol * top;
  for (Index i = 0; i < n_; ++i) {
    const Svd& p = parts[i];
    const Eigen::Vector2d zi = take(z, n_, i);
    Eigen::Vector2d ui = Eigen::Vector2d::Zero();
    for (Index k = 0; k < 2; ++k) {
      if (p.sigma(k) > thr) ui += p.V.col(k) * (p.U.col(k).dot(zi) / p.sigma(k));
    }
    put(out, n_, i, ui);
  }
  return out;
}

Matrix PairedOp::low_rank_row_basis(const Tolerance& tol) const {
  if (has_blocks()) {
    throw PreconditionError("PairedOp::low_rank_row_basis: operator has a block part");
  }
  if (!has_low_rank()) return Matrix(2 * n_, 0);
  const LowRankSvd s = low_rank_svd(u_, v_);
  if (s.sigma.size() == 0 || s.sigma(0) == 0.0) return Matrix(2 * n_, 0);
  const double thr = tol.rank_rtol * s.sigma(0);
  Index r = 0;
  while (r < s.sigma.size() && s.sigma(r) > thr) ++r;
  return s.right.leftCols(r);
}

}  // namespace opext
