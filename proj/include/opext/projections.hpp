#pragma once

#include "opext/subspace.hpp"

namespace opext {

/// P_S = basis * basis^T.
Matrix orth_proj(const Subspace& s);

/// Null space of m as a subspace of its domain (see null_basis for the
/// meaning of `reference`).
Subspace nullspace(const Matrix& m, const Tolerance& tol = {}, double reference = 0.0);

/// The projection (P_{N^perp} P_M)^+.
///
/// Its range is M minus (M cap N) and its kernel is N + (M + N)^perp. In
/// finite dimensions the unbounded projection onto M along N becomes this
/// everywhere-defined idempotent matrix; its norm grows like 1/sin of the
/// smallest nonzero angle between M and N.
Matrix cm_projection(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

/// Classical oblique projection onto M along N for a direct-sum decomposition
/// M + N = R^ambient with M cap N = {0}. Throws PreconditionError otherwise.
Matrix oblique_projection(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

}  // namespace opext
