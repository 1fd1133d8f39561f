#pragma once

// Star partial order: A <=* C iff A A^T = C A^T and A^T A = A^T C.

#include <optional>
#include <string_view>

#include "opext/numkernel.hpp"

namespace opext {

bool star_leq(const Matrix& a, const Matrix& c, const Tolerance& tol = {});

/// A A^T B = A B^T B and B A^T A = B B^T A: necessary for a star-supremum.
bool necessary_eq15(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

enum class SupremumReason {
  kExists,
  kIncompatibleOnIntersection,  // A, B (or A^T, B^T) disagree on the common row space
  kAdjointMismatch,             // C(A, B) != C(A^T, B^T)^T
  kPostcheckDefect,             // existence test passed but A or B is not <=* C
};

std::string_view to_string(SupremumReason r);

struct StarSupremum {
  bool exists = false;
  std::optional<Matrix> c;
  SupremumReason reason = SupremumReason::kExists;
  /// |C(A, B) - C(A^T, B^T)^T| when both sides are defined.
  double adjoint_gap = 0.0;
};

/// Builds C(A, B) as the canonical extension on N(A)^perp, N(B)^perp (zero
/// on N(A) cap N(B)) and checks it against the transpose of C(A^T, B^T).
StarSupremum star_supremum(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

/// For matrices R(A - B) is always closed, so necessary_eq15 alone decides
/// existence of the supremum.
bool closed_range_shortcut(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

}  // namespace opext
