#pragma once

// Test-side generators and reference computations. Nothing here calls into
// the library's rank or factorization code, so the checks built on it are
// independent of the implementation under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace support {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Index integer(Index lo, Index hi) {  // inclusive
    return std::uniform_int_distribution<Index>(lo, hi)(gen_);
  }
  Matrix gaussian(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }
  Vector gaussian(Index n) { return gaussian(n, 1).col(0); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Modified Gram-Schmidt with reorthogonalization. Columns are assumed
/// independent (true with probability one for Gaussian input).
inline Matrix gram_schmidt(const Matrix& m) {
  Matrix q = m;
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    }
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

/// Random orthonormal ambient x ambient frame.
inline Matrix random_frame(Rng& rng, Index ambient) {
  return gram_schmidt(rng.gaussian(ambient, ambient));
}

/// Largest singular value by power iteration on M^T M.
inline double power_norm(const Matrix& m, int iters = 3000) {
  if (m.size() == 0) return 0.0;
  Vector v = Vector::Ones(m.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) += 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    est = std::sqrt(nw);
  }
  return (m * v).norm() > est ? (m * v).norm() : est;
}

/// Orthogonal projector from an orthonormal basis.
inline Matrix proj(const Matrix& basis) { return basis * basis.transpose(); }

/// Random pair of subspaces with a planted common part. All bases are
/// orthonormalized copies of generic spanning sets; `common` is exactly the
/// intersection provided dim_m + dim_n - dim_common <= ambient.
struct PlantedPair {
  Index ambient = 0;
  Matrix m;       // orthonormal basis of M
  Matrix n;       // orthonormal basis of N
  Matrix common;  // orthonormal basis of M cap N
};

inline PlantedPair planted_pair(Rng& rng, Index ambient, Index dim_m, Index dim_n, Index dim_c) {
  const Matrix frame = random_frame(rng, ambient);
  PlantedPair p;
  p.ambient = ambient;
  p.common = frame.leftCols(dim_c);
  // Generic extra directions live in the complement of the common part.
  const Matrix rest = frame.rightCols(ambient - dim_c);
  Matrix sm(ambient, dim_m);
  sm.leftCols(dim_c) = p.common;
  sm.rightCols(dim_m - dim_c) = rest * rng.gaussian(ambient - dim_c, dim_m - dim_c);
  Matrix sn(ambient, dim_n);
  sn.leftCols(dim_c) = p.common;
  sn.rightCols(dim_n - dim_c) = rest * rng.gaussian(ambient - dim_c, dim_n - dim_c);
  p.m = gram_schmidt(sm);
  p.n = gram_schmidt(sn);
  return p;
}

/// Random planted pair with dimensions chosen so the intersection is exact.
inline PlantedPair random_planted_pair(Rng& rng, Index ambient) {
  for (;;) {
    const Index dm = rng.integer(1, ambient - 1);
    const Index dn = rng.integer(1, ambient - 1);
    const Index dc = rng.integer(0, std::min(dm, dn));
    if (dm + dn - dc <= ambient) return planted_pair(rng, ambient, dm, dn, dc);
  }
}

/// Orthonormal basis of the complement, from a Gram-Schmidt completion.
inline Matrix complement_basis(Rng& rng, const Matrix& basis) {
  const Index n = basis.rows();
  const Index k = basis.cols();
  Matrix g = rng.gaussian(n, n - k);
  g -= basis * (basis.transpose() * g);
  return gram_schmidt(g);
}

/// Compatible operators for a planted pair: B agrees with A on M cap N.
inline void compatible_ops(Rng& rng, const PlantedPair& p, Index rows, Matrix& a, Matrix& b) {
  a = rng.gaussian(rows, p.ambient);
  const Matrix pc = proj(p.common);
  b = a * pc + rng.gaussian(rows, p.ambient) * (Matrix::Identity(p.ambient, p.ambient) - pc);
}

/// Matrix with prescribed singular triplets: U diag(s) V^T from random frames.
struct Triplets {
  Matrix u;
  Vector s;
  Matrix v;
  Matrix assemble(const std::vector<Index>& keep) const {
    Matrix out = Matrix::Zero(u.rows(), v.rows());
    for (Index k : keep) out += s(k) * u.col(k) * v.col(k).transpose();
    return out;
  }
};

inline Triplets random_triplets(Rng& rng, Index rows, Index cols, Index rank) {
  Triplets t;
  t.u = random_frame(rng, rows).leftCols(rank);
  t.v = random_frame(rng, cols).leftCols(rank);
  t.s.resize(rank);
  for (Index k = 0; k < rank; ++k) t.s(k) = 1.0 + static_cast<double>(rank - k) + rng.uniform(0.0, 0.5);
  return t;
}

inline double harmonic_number(Index k) {
  double h = 0.0;
  for (Index i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

}  // namespace support
