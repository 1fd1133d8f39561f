#pragma once

// Two-projections canonical decomposition of a pair of subspaces (M, N):
//
//   H = (M cap N) + (M cap N^perp) + (M^perp cap N) + (M^perp cap N^perp) + M0 + M1
//
// with M0 = the generic part of M and M1 = the generic part of M^perp. On
// M0 + M1 the projection onto N has the block form
//
//   [ 1 - S^2           S sqrt(1 - S^2) R^T ]
//   [ R S sqrt(1 - S^2)  R S^2 R^T          ]
//
// where S = sin(theta) is diagonal in the principal-vector basis of M0 and R
// is orthogonal from M0 to M1.

#include "opext/subspace.hpp"

namespace opext {

struct HalmosDecomposition {
  Subspace corner_mn;    // M cap N
  Subspace corner_mnp;   // M cap N^perp
  Subspace corner_mpn;   // M^perp cap N
  Subspace corner_mpnp;  // M^perp cap N^perp
  Subspace m0;           // basis columns are principal vectors
  Subspace m1;
  Matrix r;              // dim M1 x dim M0
  Matrix s;              // dim M0 x dim M0, diagonal
  /// |P_N restricted to M0 + M1 - block formula|.
  double reconstruction_residual = 0.0;
};

/// Throws ShapeError on ambient mismatch and Error if the generic parts of
/// M and M^perp come out with different dimensions at tolerance.
HalmosDecomposition decompose(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

struct ClosednessTest {
  bool closed = true;
  /// Smallest eigenvalue of S, or 1 when M0 = {0}.
  double margin = 1.0;
};

ClosednessTest closedness_test(const HalmosDecomposition& d, const Tolerance& tol = {});

/// With D = (A - B) restricted to M0: R(D^T) in R(S). True when M0 = {0}.
bool bounded_via_halmos(const Matrix& a, const Matrix& b, const HalmosDecomposition& d,
                        const Tolerance& tol = {});

/// Block-formula image of P_N on M0 + M1 in the (M0, M1) bases.
Matrix halmos_block(const HalmosDecomposition& d);

}  // namespace opext
