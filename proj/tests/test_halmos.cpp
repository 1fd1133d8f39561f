#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opext/extension.hpp"
#include "opext/halmos.hpp"
#include "opext/projections.hpp"
#include "support.hpp"

using namespace opext;

namespace {

Subspace wrap(const Matrix& b) { return Subspace::from_orthonormal(b); }

Subspace line(double theta) {
  Matrix b(2, 1);
  b << std::cos(theta), std::sin(theta);
  return wrap(b);
}

Matrix six_projector_sum(const HalmosDecomposition& d) {
  return orth_proj(d.corner_mn) + orth_proj(d.corner_mnp) + orth_proj(d.corner_mpn) +
         orth_proj(d.corner_mpnp) + orth_proj(d.m0) + orth_proj(d.m1);
}

/// Random pair in R^12 with every corner one-dimensional and a 4 + 4
/// generic part.
support::PlantedPair six_piece_pair(support::Rng& rng) {
  const Matrix f = support::random_frame(rng, 12);
  const Matrix block = f.rightCols(8);
  const Matrix gm = support::gram_schmidt(Matrix(block * rng.gaussian(8, 4)));
  const Matrix gn = support::gram_schmidt(Matrix(block * rng.gaussian(8, 4)));
  support::PlantedPair p;
  p.ambient = 12;
  p.m.resize(12, 6);
  p.m << f.col(0), f.col(1), gm;
  p.n.resize(12, 6);
  p.n << f.col(0), f.col(2), gn;
  p.common = f.col(0);
  return p;
}

}  // namespace

TEST_CASE("M = N puts everything in the M cap N corner") {
  support::Rng rng(71);
  const Subspace m = wrap(support::gram_schmidt(rng.gaussian(6, 3)));
  const HalmosDecomposition d = decompose(m, m);
  CHECK(d.corner_mn.dim() == 3);
  CHECK(d.corner_mpnp.dim() == 3);
  CHECK(d.m0.is_zero());
  CHECK(d.m1.is_zero());
  const ClosednessTest c = closedness_test(d);
  CHECK(c.closed);
  CHECK(c.margin == 1.0);
}

TEST_CASE("two-line analytic case") {
  const double theta = 0.4;
  const HalmosDecomposition d = decompose(line(0), line(theta));
  CHECK(d.corner_mn.is_zero());
  CHECK(d.corner_mnp.is_zero());
  CHECK(d.corner_mpn.is_zero());
  CHECK(d.corner_mpnp.is_zero());
  REQUIRE(d.m0.dim() == 1);
  REQUIRE(d.m1.dim() == 1);
  CHECK(std::abs(std::abs(d.m0.basis()(0, 0)) - 1.0) <= 1e-14);
  CHECK(std::abs(std::abs(d.m1.basis()(1, 0)) - 1.0) <= 1e-14);
  CHECK(std::abs(d.s(0, 0) - std::sin(theta)) <= 1e-14);
  CHECK(std::abs(std::abs(d.r(0, 0)) - 1.0) <= 1e-14);
  CHECK(d.reconstruction_residual <= 1e-14);
  // P_N = [[cos^2, cos sin], [cos sin, sin^2]] against the block formula.
  Matrix pn(2, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  pn << c * c, c * s, c * s, s * s;
  Matrix f(2, 2);
  f << d.m0.basis(), d.m1.basis();
  CHECK((f.transpose() * pn * f - halmos_block(d)).norm() <= 1e-14);
  const ClosednessTest t = closedness_test(d);
  CHECK(t.closed);
  CHECK(std::abs(t.margin - std::sin(theta)) <= 1e-14);
}

TEST_CASE("orthogonal pair is closed with margin 1") {
  const HalmosDecomposition d = decompose(line(0), line(M_PI / 2));
  CHECK(d.m0.is_zero());
  CHECK(closedness_test(d).closed);
  CHECK(closedness_test(d).margin == 1.0);
  CHECK(bounded_via_halmos(Matrix::Identity(2, 2), Matrix::Zero(2, 2), d));
}

TEST_CASE("random pairs in R^12") {
  support::Rng rng(72);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = trial % 2 == 0 ? support::random_planted_pair(rng, 12) : six_piece_pair(rng);
    const HalmosDecomposition d = decompose(wrap(p.m), wrap(p.n));
    CHECK(d.reconstruction_residual <= 1e-8);
    CHECK(d.m0.dim() == d.m1.dim());
    CHECK((six_projector_sum(d) - Matrix::Identity(12, 12)).norm() <= 1e-8);
    if (d.m0.dim() > 0) {
      CHECK(d.s.diagonal().minCoeff() > 0.0);
      CHECK(d.s.diagonal().maxCoeff() < 1.0);
      CHECK((d.r.transpose() * d.r - Matrix::Identity(d.m0.dim(), d.m0.dim())).norm() <= 1e-8);
    }
    CHECK(subspace_eq(d.corner_mn, wrap(p.common)));
    // Six pieces mutually orthogonal.
    const std::vector<const Subspace*> parts{&d.corner_mn, &d.corner_mnp, &d.corner_mpn,
                                             &d.corner_mpnp, &d.m0, &d.m1};
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        CHECK((parts[i]->basis().transpose() * parts[j]->basis()).norm() <= 1e-8);
  }
}

TEST_CASE("six-piece pair has every corner") {
  support::Rng rng(73);
  const auto p = six_piece_pair(rng);
  const HalmosDecomposition d = decompose(wrap(p.m), wrap(p.n));
  CHECK(d.corner_mn.dim() == 1);
  CHECK(d.corner_mnp.dim() == 1);
  CHECK(d.corner_mpn.dim() == 1);
  CHECK(d.corner_mpnp.dim() == 1);
  CHECK(d.m0.dim() == 4);
  CHECK(d.m1.dim() == 4);
}

TEST_CASE("bounded_via_halmos matches the extension criterion") {
  support::Rng rng(74);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = support::random_planted_pair(rng, rng.integer(3, 12));
    Matrix a, b;
    support::compatible_ops(rng, p, 3, a, b);
    const Subspace m = wrap(p.m);
    const Subspace n = wrap(p.n);
    const HalmosDecomposition d = decompose(m, n);
    CHECK(bounded_via_halmos(a, b, d) == bounded_criterion(a, b, m, n).holds);
    CHECK(bounded_via_halmos(a, a, d));
  }
}
