#pragma once

// Operators on H = K x K, K = R^n, that split into 2x2 blocks along the
// coordinate pairs ((e_i, 0), (0, e_i)) plus a low-rank correction. Every
// builtin truncation family lives in this class, which keeps the sweeps
// linear in n. Dense layout: (e_i, 0) is index i, (0, e_i) is index n + i.

#include <vector>

#include "opext/numkernel.hpp"

namespace opext {

using Block2 = Eigen::Matrix2d;

class PairedOp {
 public:
  /// Zero operator on R^{2n}.
  explicit PairedOp(Index n = 0);

  static PairedOp from_blocks(std::vector<Block2> blocks);
  /// u v^T with u, v of shape 2n x r.
  static PairedOp low_rank(Matrix u, Matrix v);

  Index n() const { return n_; }
  bool has_blocks() const { return !blocks_.empty(); }
  bool has_low_rank() const { return u_.cols() > 0; }
  const std::vector<Block2>& blocks() const { return blocks_; }
  const Matrix& u() const { return u_; }
  const Matrix& v() const { return v_; }

  Matrix to_dense() const;
  Vector apply(const Vector& x) const;

  /// this * other, where `other` must be purely block diagonal.
  PairedOp times_blocks(const PairedOp& other) const;
  PairedOp plus(const PairedOp& other) const;
  PairedOp scaled(double s) const;
  bool is_zero() const { return !has_blocks() && !has_low_rank(); }

  /// Largest singular value. Exact for pure block or pure low-rank
  /// operators; mixed operators are densified (PreconditionError above
  /// `dense_limit` in ambient dimension).
  double op_norm(Index dense_limit = 2048) const;

  /// Minimum-norm solution of (this) u = z, i.e. this^+ z, with the global
  /// rank cutoff rank_rtol * sigma_max.
  Vector pinv_apply(const Vector& z, const Tolerance& tol, Index dense_limit = 2048) const;

  /// Orthonormal basis of R(this^T) for a purely low-rank operator (2n x r).
  /// PreconditionError if a block part is present.
  Matrix low_rank_row_basis(const Tolerance& tol) const;

 private:
  Index n_ = 0;
  std::vector<Block2> blocks_;  // empty means no block part
  Matrix u_;
  Matrix v_;
};

}  // namespace opext
