#include "opext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "opext/projections.hpp"

namespace opext {

void require_extension_shapes(const Matrix& a, const Matrix& b, const Subspace& m,
                              const Subspace& n, const char* op) {
  require_same_ambient(m, n, op);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": A and B differ in shape");
  }
  if (a.cols() != m.ambient()) {
    throw ShapeError(std::string(op) + ": operators and subspaces live in different spaces");
  }
  require_finite(a, "A");
  require_finite(b, "B");
}

namespace {

/// A - B, or nullopt when it is zero up to residual_atol.
std::optional<Matrix> difference(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  Matrix d = a - b;
  const double scale = 1.0 + op_norm(a) + op_norm(b);
  if (op_norm(d) <= tol.residual_atol * scale) return std::nullopt;
  return d;
}

Subspace perp_sum(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  return sum(complement(m), complement(n), tol);
}

}  // namespace

Compatibility compatible(const Matrix& a, const Matrix& b, const Subspace& m,
                         const Subspace& n, const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "compatible");
  const Subspace common = intersect(m, n, tol);
  Compatibility out;
  if (common.is_zero()) {
    out.ok = true;
    return out;
  }
  const Matrix d = a - b;
  const Matrix img = d * common.basis();
  for (Index j = 0; j < img.cols(); ++j) {
    out.residual = std::max(out.residual, img.col(j).norm());
  }
  out.ok = out.residual <= tol.residual_atol * (1.0 + op_norm(d));
  return out;
}

CriterionResult bounded_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                                  const Subspace& n, const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "bounded_criterion");
  const auto d = difference(a, b, tol);
  if (!d) return {true, 1.0};

  const Matrix dt = d->transpose();
  const Subspace w = perp_sum(m, n, tol);
  CriterionResult out;
  out.holds = !w.is_zero() && range_contains(w.basis(), dt, tol);
  if (!out.holds) return out;

  const Matrix frame = hstack(complement(m).basis(), complement(n).basis());
  const Matrix coeffs = pinv(frame, tol) * range_basis(dt, tol);
  const double cost = op_norm(coeffs);
  out.margin = cost > 0.0 ? 1.0 / cost : 1.0;
  return out;
}

bool closable_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                        const Subspace& n, const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "closable_criterion");
  const auto d = difference(a, b, tol);
  if (!d) return true;
  const Subspace w = perp_sum(m, n, tol);
  const Index h = m.ambient();
  const Matrix escape = (Matrix::Identity(h, h) - w.projector()) * d->transpose();
  const Subspace preimage = nullspace(escape, tol, op_norm(*d));
  return preimage.dim() == a.rows();
}

bool closed_criterion(const Matrix& a, const Matrix& b, const Subspace& m,
                      const Subspace& n, const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "closed_criterion");
  const auto d = difference(a, b, tol);
  if (!d) return true;
  const Subspace w = perp_sum(m, n, tol);
  return subspace_eq(sum(span_of(d->transpose(), tol), w, tol), w, tol);
}

MetricSup metric_sup(const Matrix& a, const Matrix& b, const Subspace& m, const Subspace& n,
                     const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "metric_sup");
  if (m.is_zero()) throw PreconditionError("metric_sup: M is the zero subspace");
  if (!intersect(m, n, tol).is_zero()) {
    throw PreconditionError("metric_sup: M cap N != {0} at tolerance");
  }
  const Index h = m.ambient();
  // G_perp = B_M^T (I - P_N) B_M = F^T F with F = P_{N^perp} B_M; its
  // eigenpairs come from the SVD of F and whiten the pencil (G_D, G_perp).
  const Matrix f = (Matrix::Identity(h, h) - n.projector()) * m.basis();
  const Svd fs = svd(f);
  const Index k = m.dim();
  if (fs.sigma.size() < k || fs.sigma(k - 1) <= tol.rank_rtol) {
    throw PreconditionError("metric_sup: M cap N != {0} at tolerance");
  }
  const Matrix whiten = m.basis() * fs.V * fs.sigma.head(k).cwiseInverse().asDiagonal();
  const double top = op_norm((a - b) * whiten);
  MetricSup out;
  out.kappa13 = top * top;
  out.lower = out.kappa13;
  out.upper = 2.0 * out.kappa13;
  return out;
}

double metric_sup_monte_carlo(const Matrix& a, const Matrix& b, const Subspace& m,
                              const Subspace& n, std::size_t samples, std::uint64_t seed) {
  require_extension_shapes(a, b, m, n, "metric_sup_monte_carlo");
  if (m.is_zero()) throw PreconditionError("metric_sup_monte_carlo: M is the zero subspace");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix dm = (a - b) * m.basis();
  const Matrix nm = n.basis().transpose() * m.basis();
  Vector g(m.dim());
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
    const double len = g.norm();
    if (len == 0.0) continue;
    g /= len;
    const double denom = 1.0 - (nm * g).norm();
    if (denom <= 0.0) continue;
    best = std::max(best, (dm * g).squaredNorm() / denom);
  }
  return best;
}

ExtensionReport build(const Matrix& a, const Matrix& b, const Subspace& m, const Subspace& n,
                      const Tolerance& tol) {
  require_extension_shapes(a, b, m, n, "build");
  tol.validate();
  ExtensionReport rep;
  const Compatibility c = compatible(a, b, m, n, tol);
  rep.compatible = c.ok;
  rep.incompat_residual = c.residual;
  if (!c.ok) return rep;

  const Matrix q = cm_projection(m, n, tol);
  Matrix full = (a - b) * q + b;
  const Matrix p_sum = orth_proj(sum(m, n, tol));
  Matrix canonical = full * p_sum;

  for (Index j = 0; j < m.dim(); ++j) {
    const Vector x = m.basis().col(j);
    rep.agreement_m = std::max(rep.agreement_m, (full * x - a * x).norm());
  }
  for (Index j = 0; j < n.dim(); ++j) {
    const Vector y = n.basis().col(j);
    rep.agreement_n = std::max(rep.agreement_n, (full * y - b * y).norm());
  }
  rep.extension_norm = op_norm(canonical);
  rep.c_full = std::move(full);
  rep.c_canonical = std::move(canonical);

  const CriterionResult bc = bounded_criterion(a, b, m, n, tol);
  rep.bounded = bc.holds;
  rep.bounded_margin = bc.margin;
  rep.closable = closable_criterion(a, b, m, n, tol);
  rep.closed = closed_criterion(a, b, m, n, tol);
  rep.criteria_coincide = rep.bounded == rep.closable && rep.bounded == rep.closed;

  if (!m.is_zero() && intersect(m, n, tol).is_zero()) {
    try {
      rep.metric_sup = metric_sup(a, b, m, n, tol).kappa13;
    } catch (const PreconditionError&) {
      // An angle between the two rank cliffs: treated as an intersection.
    }
  }
  return rep;
}

}  // namespace opext
