#include "opext/starorder.hpp"

#include "opext/extension.hpp"

namespace opext {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": operands differ in shape");
  }
}

}  // namespace

bool star_leq(const Matrix& a, const Matrix& c, const Tolerance& tol) {
  require_same_shape(a, c, "star_leq");
  const double bound = tol.residual_atol * (1.0 + op_norm(a) * op_norm(c));
  const Matrix at = a.transpose();
  return op_norm(a * at - c * at) <= bound && op_norm(at * a - at * c) <= bound;
}

bool necessary_eq15(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  require_same_shape(a, b, "necessary_eq15");
  const double na = op_norm(a);
  const double nb = op_norm(b);
  const double bound = tol.residual_atol * (1.0 + na * na * nb + nb * nb * na);
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  return op_norm(a * at * b - a * bt * b) <= bound && op_norm(b * at * a - b * bt * a) <= bound;
}

std::string_view to_string(SupremumReason r) {
  switch (r) {
    case SupremumReason::kExists:
      return "exists";
    case SupremumReason::kIncompatibleOnIntersection:
      return "incompatible_on_intersection";
    case SupremumReason::kAdjointMismatch:
      return "adjoint_mismatch";
    case SupremumReason::kPostcheckDefect:
      return "postcheck_defect";
  }
  return "unknown";
}

StarSupremum star_supremum(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  require_same_shape(a, b, "star_supremum");
  StarSupremum out;

  // N(A)^perp = R(A^T).
  const ExtensionReport direct =
      build(a, b, span_of(a.transpose(), tol), span_of(b.transpose(), tol), tol);
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  const ExtensionReport adjoint = build(at, bt, span_of(a, tol), span_of(b, tol), tol);
  if (!direct.compatible || !adjoint.compatible) {
    out.reason = SupremumReason::kIncompatibleOnIntersection;
    return out;
  }

  const Matrix& c1 = *direct.c_canonical;
  const Matrix& c2 = *adjoint.c_canonical;
  out.adjoint_gap = op_norm(c1 - c2.transpose());
  if (out.adjoint_gap > tol.residual_atol * (1.0 + op_norm(a) + op_norm(b))) {
    out.reason = SupremumReason::kAdjointMismatch;
    return out;
  }
  if (!star_leq(a, c1, tol) || !star_leq(b, c1, tol)) {
    out.reason = SupremumReason::kPostcheckDefect;
    return out;
  }
  out.exists = true;
  out.c = c1;
  return out;
}

bool closed_range_shortcut(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  return necessary_eq15(a, b, tol);
}

}  // namespace opext
