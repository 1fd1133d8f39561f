#include "opext/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sstream>

#include "json.hpp"
#include "opext/extension.hpp"
#include "opext/halmos.hpp"
#include "opext/projections.hpp"

namespace opext {

namespace {

constexpr Index kDenseLimit = 4096;

Subspace first_factor(Index n) {
  Matrix basis = Matrix::Zero(2 * n, n);
  basis.topRows(n).setIdentity();
  return Subspace::from_orthonormal(std::move(basis));
}

Subspace second_factor(Index n) {
  Matrix basis = Matrix::Zero(2 * n, n);
  basis.bottomRows(n).setIdentity();
  return Subspace::from_orthonormal(std::move(basis));
}

Subspace weighted_graph(const Vector& w) {
  const Index n = w.size();
  Matrix basis = Matrix::Zero(2 * n, n);
  for (Index i = 0; i < n; ++i) {
    const double r = std::hypot(1.0, w(i));
    basis(i, i) = 1.0 / r;
    basis(n + i, i) = w(i) / r;
  }
  return Subspace::from_orthonormal(std::move(basis));
}

Vector harmonic(Index n) {
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = 1.0 / static_cast<double>(i + 1);
  return y;
}

Subspace line(double x0, double x1) {
  Matrix b(2, 1);
  const double r = std::hypot(x0, x1);
  b << x0 / r, x1 / r;
  return Subspace::from_orthonormal(std::move(b));
}

/// Per-plane data of the geometry M = K x {0}, N = graph of diag(w).
struct PlaneGeometry {
  std::vector<Block2> q;          // Corach-Maestripieri projection
  std::vector<Block2> frame_inv;  // [basis(M_i^perp) | basis(N_i^perp)]^+
  Vector sin_angle;               // |P_{N_i^perp} e_1|
  double frame_margin = 0.0;      // smallest singular value over all frames
  Index worst = 0;                // plane attaining frame_margin
  double gap = 1.0;               // halmos closedness margin
};

PlaneGeometry plane_geometry(const Vector& w, const Tolerance& tol) {
  const Index n = w.size();
  PlaneGeometry g;
  g.q.resize(n);
  g.frame_inv.resize(n);
  g.sin_angle.resize(n);
  g.frame_margin = std::numeric_limits<double>::infinity();
  const Subspace m = line(1.0, 0.0);
  for (Index i = 0; i < n; ++i) {
    if (w(i) == 0.0 || !std::isfinite(w(i))) {
      throw PreconditionError("paired geometry: weights must be finite and nonzero");
    }
    const Subspace ni = line(1.0, w(i));
    g.q[i] = cm_projection(m, ni, tol);
    const Matrix frame = hstack(complement(m).basis(), complement(ni).basis());
    g.frame_inv[i] = pinv(frame, tol);
    const Svd fs = svd(frame);
    if (fs.sigma(1) < g.frame_margin) {
      g.frame_margin = fs.sigma(1);
      g.worst = i;
    }
    g.sin_angle(i) = (Matrix::Identity(2, 2) - ni.projector()).col(0).norm();
    g.gap = std::min(g.gap, closedness_test(decompose(m, ni, tol), tol).margin);
  }
  return g;
}

struct PerN {
  double extension_norm = 0.0;
  double gap_margin = 1.0;
  std::optional<double> metric_sup;
  double bounded_margin = 1.0;
  double probe_norm = 0.0;
  double probe_residual = 0.0;
};

void check_probe(const Vector& z, Index ambient) {
  if (z.size() != ambient) {
    throw ShapeError("probe rule returned a vector of dimension " + std::to_string(z.size()) +
                     ", expected " + std::to_string(ambient));
  }
}

PerN evaluate_dense(const TruncationInstance& inst, const Vector& z, const Tolerance& tol) {
  check_probe(z, inst.m.ambient());
  const ExtensionReport rep = build(inst.a, inst.b, inst.m, inst.n, tol);
  if (!rep.compatible) {
    throw PreconditionError("instance is incompatible on M cap N (residual " +
                            std::to_string(rep.incompat_residual) + ")");
  }
  PerN out;
  out.extension_norm = rep.extension_norm;
  out.bounded_margin = rep.bounded_margin;
  out.metric_sup = rep.metric_sup;
  out.gap_margin = closedness_test(decompose(inst.m, inst.n, tol), tol).margin;
  const Matrix& c = *rep.c_canonical;
  const Vector u = pinv(c, tol) * z;
  out.probe_norm = u.norm();
  out.probe_residual = (c * u - z).norm();
  return out;
}

PairedOp difference(const PairedInstance& p) {
  return p.b.is_zero() ? p.a : p.a.plus(p.b.scaled(-1.0));
}

/// C = (A - B) Q + B. M + N is the whole space, so C is also canonical.
PairedOp paired_extension(const PairedInstance& p, const PlaneGeometry& g) {
  const PairedOp q = PairedOp::from_blocks(g.q);
  const PairedOp d = difference(p);
  PairedOp c = d.times_blocks(q);
  return p.b.is_zero() ? c : c.plus(p.b);
}

Matrix apply_frame_inv(const PlaneGeometry& g, Index n, const Matrix& r) {
  Matrix out(2 * n, r.cols());
  for (Index c = 0; c < r.cols(); ++c) {
    for (Index i = 0; i < n; ++i) {
      const Eigen::Vector2d v = g.frame_inv[i] * Eigen::Vector2d(r(i, c), r(n + i, c));
      out(i, c) = v(0);
      out(n + i, c) = v(1);
    }
  }
  return out;
}

double paired_bounded_margin(const PairedOp& d, double na, double nb, const PlaneGeometry& g,
                             const Tolerance& tol) {
  const Index n = d.n();
  const double nd = d.op_norm(kDenseLimit);
  if (nd <= tol.residual_atol * (1.0 + na + nb)) return 1.0;
  double cost = 0.0;
  if (d.has_low_rank()) {
    cost = op_norm(apply_frame_inv(g, n, d.low_rank_row_basis(tol)));
  } else {
    const double thr = tol.rank_rtol * nd;
    for (Index i = 0; i < n; ++i) {
      const Svd s = svd(d.blocks()[i].transpose());
      Index k = 0;
      while (k < 2 && s.sigma(k) > thr) ++k;
      if (k == 0) continue;
      cost = std::max(cost, op_norm(Matrix(g.frame_inv[i] * s.U.leftCols(k))));
    }
  }
  return cost > 0.0 ? 1.0 / cost : 1.0;
}

std::optional<double> paired_metric_sup(const PairedOp& d, const PlaneGeometry& g,
                                        const Tolerance& tol) {
  const Index n = d.n();
  if (n == 0 || g.sin_angle.minCoeff() <= tol.rank_rtol) return std::nullopt;
  double top = 0.0;
  if (d.has_low_rank()) {
    // D W = u (W^T v)^T with W e_i = (e_i, 0) / sin_i.
    Matrix x(n, d.v().cols());
    for (Index i = 0; i < n; ++i) x.row(i) = d.v().row(i) / g.sin_angle(i);
    Eigen::HouseholderQR<Matrix> qr(d.u());
    const Index r = d.u().cols();
    const Matrix ru = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    top = op_norm(Matrix(ru * x.transpose()));
  } else {
    for (Index i = 0; i < n; ++i) {
      top = std::max(top, d.blocks()[i].col(0).norm() / g.sin_angle(i));
    }
  }
  return top * top;
}

PerN evaluate_paired(const PairedInstance& p, const Vector& z, const Tolerance& tol) {
  const Index n = p.n();
  check_probe(z, 2 * n);
  const PairedOp d = difference(p);
  if (d.has_blocks() && d.has_low_rank()) return evaluate_dense(p.to_dense(), z, tol);

  const PlaneGeometry g = plane_geometry(p.weights, tol);
  const PairedOp c = paired_extension(p, g);
  PerN out;
  out.extension_norm = c.op_norm(kDenseLimit);
  out.gap_margin = g.gap;
  out.bounded_margin =
      paired_bounded_margin(d, p.a.op_norm(kDenseLimit), p.b.op_norm(kDenseLimit), g, tol);
  out.metric_sup = paired_metric_sup(d, g, tol);
  const Vector u = c.pinv_apply(z, tol, kDenseLimit);
  out.probe_norm = u.norm();
  out.probe_residual = (c.apply(u) - z).norm();
  return out;
}

std::string at_n(const TruncationFamily& f, Index n, const char* what) {
  return "family " + f.name + " failed at n = " + std::to_string(n) + ": " + what;
}

// Rethrow with the size attached, keeping the library error kind.
template <class Fn>
auto with_context(const TruncationFamily& f, Index n, Fn&& fn) {
  try {
    return fn();
  } catch (const ShapeError& e) {
    throw ShapeError(at_n(f, n, e.what()));
  } catch (const PreconditionError& e) {
    throw PreconditionError(at_n(f, n, e.what()));
  } catch (const std::exception& e) {
    throw Error(at_n(f, n, e.what()));
  }
}

PerN evaluate(const TruncationFamily& f, Index n, const Vector& z, const RunOptions& opts) {
  return with_context(f, n, [&] {
    if (f.paired && !opts.force_dense) return evaluate_paired(f.paired(n), z, opts.tol);
    return evaluate_dense(f.generate(n), z, opts.tol);
  });
}

void require_sizes(const std::vector<Index>& ns, const char* op) {
  if (ns.empty()) throw PreconditionError(std::string(op) + ": ns is empty");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1) throw PreconditionError(std::string(op) + ": sizes must be positive");
    if (k > 0 && ns[k] <= ns[k - 1]) {
      throw PreconditionError(std::string(op) + ": ns must be strictly increasing");
    }
  }
}

std::vector<PerN> sweep(const TruncationFamily& f, const std::vector<Index>& ns,
                        const ProbeRule& rule, const RunOptions& opts) {
  auto one = [&](Index n) {
    const Vector z = with_context(f, n, [&] { return rule(n); });
    return evaluate(f, n, z, opts);
  };
  std::vector<PerN> out;
  out.reserve(ns.size());
  if (!opts.parallel || ns.size() == 1) {
    for (Index n : ns) out.push_back(one(n));
    return out;
  }
  std::vector<std::future<PerN>> jobs;
  jobs.reserve(ns.size());
  for (Index n : ns) jobs.push_back(std::async(std::launch::async, one, n));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TruncationInstance PairedInstance::to_dense() const {
  return {a.to_dense(), b.to_dense(), first_factor(n()), weighted_graph(weights)};
}

TruncationFamily family_example31(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw PreconditionError("family_example31: alpha must be a finite number >= 0");
  }
  TruncationFamily f;
  f.name = "example31(" + fmt(alpha) + ")";
  f.paired = [alpha](Index n) {
    PairedInstance p;
    p.weights = harmonic(n);
    std::vector<Block2> blocks(n, Block2::Zero());
    for (Index i = 0; i < n; ++i) blocks[i](0, 0) = std::pow(static_cast<double>(i + 1), -alpha);
    p.a = PairedOp::from_blocks(std::move(blocks));
    p.b = PairedOp(n);
    return p;
  };
  f.generate = [paired = f.paired](Index n) { return paired(n).to_dense(); };
  f.default_probe = probe_e1();
  return f;
}

TruncationFamily family_rank_one() {
  TruncationFamily f;
  f.name = "rank_one";
  f.paired = [](Index n) {
    PairedInstance p;
    p.weights = harmonic(n);
    Matrix y = Matrix::Zero(2 * n, 1);
    y.col(0).head(n) = harmonic(n).normalized();
    p.a = PairedOp::low_rank(y, y);
    p.b = PairedOp(n);
    return p;
  };
  f.generate = [paired = f.paired](Index n) { return paired(n).to_dense(); };
  f.default_probe = probe_harmonic();
  return f;
}

TruncationFamily family_orthogonal_pair() {
  TruncationFamily f;
  f.name = "orthogonal_pair";
  f.generate = [](Index n) {
    TruncationInstance t;
    t.m = first_factor(n);
    t.n = second_factor(n);
    t.a = t.m.projector();
    t.b = Matrix::Zero(2 * n, 2 * n);
    return t;
  };
  f.default_probe = probe_e1();
  return f;
}

double perp_sum_frame_margin(const Subspace& m, const Subspace& n, const Tolerance& tol) {
  require_same_ambient(m, n, "perp_sum_frame_margin");
  const Matrix frame = hstack(complement(m).basis(), complement(n).basis());
  return smallest_nonzero_singular_value(frame, tol);
}

namespace {

struct Direction {
  double sign = 1.0;
  Vector y;  // unit, length 2n
};

Direction seeded_direction(std::uint64_t seed, Index n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Direction d;
  d.sign = (rng() & 1U) ? -1.0 : 1.0;
  d.y.resize(2 * n);
  for (Index i = 0; i < 2 * n; ++i) d.y(i) = normal(rng);
  d.y.normalize();
  return d;
}

}  // namespace

TruncationFamily family_adversarial(const TruncationFamily& base, std::uint64_t direction_seed) {
  if (!base.generate) throw PreconditionError("family_adversarial: base has no generator");
  const TruncationInstance small = base.generate(4);
  const TruncationInstance large = base.generate(16);
  const double m4 = perp_sum_frame_margin(small.m, small.n);
  const double m16 = perp_sum_frame_margin(large.m, large.n);
  if (!(m16 < 0.9 * m4)) {
    throw PreconditionError("family_adversarial: base geometry has a closed sum (frame margin " +
                            fmt(m4) + " at n = 4, " + fmt(m16) + " at n = 16)");
  }

  TruncationFamily f;
  f.name = "adversarial(" + base.name + ", seed " + std::to_string(direction_seed) + ")";
  f.default_probe = probe_e1();
  f.generate = [gen = base.generate, direction_seed](Index n) {
    TruncationInstance t = gen(n);
    const Tolerance tol;
    const Matrix frame = hstack(complement(t.m).basis(), complement(t.n).basis());
    const Svd fs = svd(frame);
    const Index k = fs.rank(tol.rank_rtol);
    if (k == 0) throw PreconditionError("family_adversarial: M^perp + N^perp is zero");
    const Direction dir = seeded_direction(direction_seed, n);
    if (dir.y.size() != t.m.ambient()) {
      throw ShapeError("family_adversarial: base ambient dimension is not 2n");
    }
    const Vector x = dir.sign * fs.U.col(k - 1);
    const Vector pm = t.m.projector() * x;
    const Vector pmn = orth_proj(intersect(t.m, t.n, tol)) * x;
    t.a = dir.y * pm.transpose();
    t.b = dir.y * pmn.transpose();
    return t;
  };
  if (base.paired) {
    f.paired = [paired = base.paired, direction_seed](Index n) {
      PairedInstance p = paired(n);
      const PlaneGeometry g = plane_geometry(p.weights, Tolerance{});
      const Index i = g.worst;
      const Subspace ni = line(1.0, p.weights(i));
      const Matrix frame = hstack(complement(line(1.0, 0.0)).basis(), complement(ni).basis());
      const Svd fs = svd(frame);
      const Direction dir = seeded_direction(direction_seed, n);
      Matrix pm = Matrix::Zero(2 * n, 1);
      pm(i, 0) = dir.sign * fs.U(0, 1);  // P_M keeps the first-factor coordinate
      Matrix y = dir.y;
      p.a = PairedOp::low_rank(y, pm);
      p.b = PairedOp(n);  // M cap N = {0}
      return p;
    };
  }
  return f;
}

const char* to_string(Trend t) {
  return t == Trend::kBounded ? "BOUNDED_TREND" : "UNBOUNDED_TREND";
}

const char* to_string(ProbeFlag p) {
  return p == ProbeFlag::kVanishing ? "PROBE_VANISHING" : "PROBE_BOUNDED_AWAY";
}

double loglog_slope(const std::vector<Index>& ns, const std::vector<double>& values) {
  if (ns.size() != values.size()) throw ShapeError("loglog_slope: length mismatch");
  if (ns.size() < 2) return 0.0;
  const std::size_t k = ns.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(values[i] > 0.0)) return 0.0;
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = static_cast<double>(k) * sxx - sx * sx;
  return den > 0.0 ? (static_cast<double>(k) * sxy - sx * sy) / den : 0.0;
}

Trend classify_growth(const std::vector<Index>& ns, const std::vector<double>& norms,
                      const Thresholds& th) {
  const double slope = loglog_slope(ns, norms);
  if (!(slope > th.slope)) return Trend::kBounded;
  for (std::size_t k = (norms.size() - 1) / 2; k + 1 < norms.size(); ++k) {
    if (!(norms[k + 1] > norms[k])) return Trend::kBounded;
  }
  return Trend::kUnbounded;
}

ProbeFlag classify_probe(const std::vector<ProbePoint>& points, const Thresholds& th) {
  if (points.empty()) return ProbeFlag::kBoundedAway;
  for (const ProbePoint& p : points) {
    if (!(p.residual <= th.probe_residual)) return ProbeFlag::kBoundedAway;
  }
  const double first = points.front().min_preimage_norm;
  const double last = points.back().min_preimage_norm;
  return first > 0.0 && last < th.probe_ratio * first ? ProbeFlag::kVanishing
                                                       : ProbeFlag::kBoundedAway;
}

ProbeRule probe_e1() {
  return [](Index n) {
    Vector z = Vector::Zero(2 * n);
    z(0) = 1.0;
    return z;
  };
}

ProbeRule probe_harmonic() {
  return [](Index n) {
    Vector z = Vector::Zero(2 * n);
    z.head(n) = harmonic(n).normalized();
    return z;
  };
}

ProbeRule probe_zero() {
  return [](Index n) { return Vector::Zero(2 * n).eval(); };
}

GrowthReport run(const TruncationFamily& f, const std::vector<Index>& ns, const RunOptions& opts) {
  require_sizes(ns, "run");
  opts.tol.validate();
  const ProbeRule rule = f.default_probe ? f.default_probe : probe_e1();
  const std::vector<PerN> per = sweep(f, ns, rule, opts);

  GrowthReport r;
  r.family = f.name;
  r.ns = ns;
  r.thresholds = opts.thresholds;
  std::vector<ProbePoint> points;
  for (const PerN& p : per) {
    r.extension_norms.push_back(p.extension_norm);
    r.gap_margins.push_back(p.gap_margin);
    r.metric_sups.push_back(p.metric_sup);
    r.bounded_margins.push_back(p.bounded_margin);
    r.probe_norms.push_back(p.probe_norm);
    r.probe_residuals.push_back(p.probe_residual);
    points.push_back({p.probe_norm, p.probe_residual});
  }
  r.slope = loglog_slope(ns, r.extension_norms);
  r.classification = classify_growth(ns, r.extension_norms, opts.thresholds);
  r.probe_flag = classify_probe(points, opts.thresholds);
  return r;
}

ProbeResult closability_probe(const TruncationFamily& f, const ProbeRule& z,
                              const std::vector<Index>& ns, const RunOptions& opts) {
  require_sizes(ns, "closability_probe");
  opts.tol.validate();
  ProbeResult out;
  for (const PerN& p : sweep(f, ns, z, opts)) {
    out.points.push_back({p.probe_norm, p.probe_residual});
  }
  out.flag = classify_probe(out.points, opts.thresholds);
  return out;
}

Witness rank_one_witness(Index n, Index k, const Tolerance& tol) {
  if (k < 1 || k > n) throw PreconditionError("rank_one_witness: need 1 <= k <= n");
  const PairedInstance p = family_rank_one().paired(n);
  const PairedOp c = paired_extension(p, plane_geometry(p.weights, tol));
  double h = 0.0;
  for (Index i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  const double s = 1.0 / h;
  Witness w;
  w.u = Vector::Zero(2 * n);
  // s (x, 0) + s (-x, -T_1 x): the first-factor parts cancel.
  for (Index i = 0; i < k; ++i) w.u(n + i) = -s / static_cast<double>(i + 1);
  w.image = c.apply(w.u);
  w.u_norm = w.u.norm();
  w.image_norm = w.image.norm();
  return w;
}

std::string to_csv(const GrowthReport& r) {
  std::ostringstream os;
  os << "n,extension_norm,gap_margin,metric_sup,probe_norm,probe_residual\n";
  for (std::size_t k = 0; k < r.ns.size(); ++k) {
    os << r.ns[k] << ',' << fmt(r.extension_norms[k]) << ',' << fmt(r.gap_margins[k]) << ','
       << (r.metric_sups[k] ? fmt(*r.metric_sups[k]) : std::string()) << ','
       << fmt(r.probe_norms[k]) << ',' << fmt(r.probe_residuals[k]) << '\n';
  }
  return os.str();
}

std::string summary_json(const GrowthReport& r) {
  nlohmann::ordered_json j;
  j["family"] = r.family;
  j["ns"] = r.ns;
  j["slope"] = r.slope;
  j["slope_note"] = "empirical least-squares fit over the listed sizes, not a proven rate";
  j["classification"] = to_string(r.classification);
  j["probe_flag"] = to_string(r.probe_flag);
  j["thresholds"] = {{"slope", r.thresholds.slope},
                     {"probe_ratio", r.thresholds.probe_ratio},
                     {"probe_residual", r.thresholds.probe_residual}};
  j["extension_norms"] = r.extension_norms;
  j["bounded_margins"] = r.bounded_margins;
  return j.dump(2) + "\n";
}

}  // namespace opext
