#pragma once

// Quotient (semiclosed) operators B/A: the operator with domain R(A) that
// sends Ax to Bx. In finite dimensions B/A is realized by the matrix B A^+.

#include "opext/subspace.hpp"

namespace opext {

class QuotientOp {
 public:
  /// A : F -> H, B : F -> K. Throws ShapeError if the column counts differ
  /// and PreconditionError unless N(A) is contained in N(B), i.e.
  /// rank_tol([A; B]) == rank_tol(A).
  QuotientOp(Matrix a, Matrix b, Tolerance tol = {});

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Tolerance& tol() const { return tol_; }

  Index domain_ambient() const { return a_.rows(); }    // H
  Index codomain_ambient() const { return b_.rows(); }  // K
  Index parameter_dim() const { return a_.cols(); }     // F

  /// R(A) inside H.
  Subspace domain(const Tolerance& tol) const;
  /// Graph {(Ax, Bx)} as a subspace of H x K.
  Subspace graph(const Tolerance& tol) const;

 private:
  Matrix a_;
  Matrix b_;
  Tolerance tol_;
};

struct QuotientApply {
  Vector value;
  /// |A A^+ x - x|: how far x is from the domain R(A).
  double membership_residual = 0.0;
};

QuotientApply q_apply(const QuotientOp& q, const Vector& x);

/// B A^+.
Matrix to_matrix(const QuotientOp& q);

/// Parallel sum Q (P + Q)^+ P of two PSD matrices. Throws PreconditionError
/// if either input is asymmetric or has an eigenvalue below
/// -residual_atol * (1 + |.|).
Matrix parallel_sum(const Matrix& p, const Matrix& q, const Tolerance& tol = {});

/// T1 + T2 on D(T1) cap D(T2). The domain representer is the square root of
/// the parallel sum of A1 A1^T and A2 A2^T, whose range is R(A1) cap R(A2).
QuotientOp q_add(const QuotientOp& q1, const QuotientOp& q2);

/// The operator on D(T1) + D(T2) that agrees with T1 on D(T1) and with T2 on
/// D(T2): the quotient [B1 B2] / [A1 A2]. Its graph is the sum of the two
/// graphs. Throws PreconditionError if T1 and T2 disagree on the common
/// part of their domains.
QuotientOp q_join(const QuotientOp& q1, const QuotientOp& q2);

struct QuotientClass {
  bool bounded = false;
  /// Always true for matrices: every subspace of R^n is closed, so the
  /// closable/closed distinctions only show up along truncation families.
  bool closed = true;
  bool closable = true;
  /// |B A^+|, the gain whose blow-up along a family witnesses unboundedness.
  double bounded_margin = 0.0;
  /// Smallest nonzero singular value of [A; B] over the largest.
  double closed_margin = 0.0;
  const char* finite_dimension_note =
      "closed and closable hold trivially for matrices";
};

QuotientClass classify(const QuotientOp& q);

/// (B^T)^{-1}(R(A^T)) computed directly as the null space of
/// P_{R(A^T)^perp} B^T. The alternative form N(B^T) + R((B^T)^+ S^{1/2}),
/// with S the parallel sum of A^T A and B^T B, is evaluated alongside.
struct PreimageDecomposition {
  Subspace direct;
  Subspace via_parallel_sum;
  bool agree = false;
};

PreimageDecomposition preimage_decomposition(const Matrix& a, const Matrix& b,
                                             const Tolerance& tol = {});

/// max over an orthonormal basis x of R(A^T) + R(B^T) of
/// | |A D^+ x|^2 + |B D^+ x|^2 - |x|^2 |, D = (A^T A + B^T B)^{1/2}.
double graph_isometry_residual(const QuotientOp& q);

}  // namespace opext
