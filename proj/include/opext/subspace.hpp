#pragma once

#include "opext/numkernel.hpp"

namespace opext {

/// A subspace of R^ambient stored by an orthonormal basis (ambient x k).
/// k == 0 is the zero subspace.
class Subspace {
 public:
  /// Zero subspace of R^ambient.
  explicit Subspace(Index ambient = 0);

  /// Wraps a basis that is already orthonormal; throws PreconditionError if
  /// basis^T basis deviates from the identity by more than 1e-10.
  static Subspace from_orthonormal(Matrix basis);

  static Subspace full(Index ambient);

  Index ambient() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  const Matrix& basis() const { return basis_; }

  /// Orthogonal projection basis * basis^T.
  Matrix projector() const;

  /// Distance of v from the subspace, |v - P v|.
  double distance(const Vector& v) const;

 private:
  explicit Subspace(Matrix basis, int /*unchecked*/);
  Matrix basis_;
};

/// Column space of m.
Subspace span_of(const Matrix& m, const Tolerance& tol = {});

Subspace complement(const Subspace& s);

/// M cap N, extracted as the null space of [P_{M^perp}; P_{N^perp}].
Subspace intersect(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

Subspace sum(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

/// M cap N^perp.
Subspace minus(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

/// Cosines of the principal angles, nonincreasing, clamped to [0, 1], of
/// length min(dim M, dim N). Throws PreconditionError on a zero subspace.
Vector principal_angles(const Subspace& m, const Subspace& n);

/// Same dimension and every principal cosine >= 1 - residual_atol.
bool subspace_eq(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

/// Every basis vector of `inner` lies in `outer` to within residual_atol.
bool subspace_leq(const Subspace& inner, const Subspace& outer, const Tolerance& tol = {});

void require_same_ambient(const Subspace& m, const Subspace& n, const char* op);

}  // namespace opext
