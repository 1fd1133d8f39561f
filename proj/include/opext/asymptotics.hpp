#pragma once

// Truncation families: deterministic sequences n -> (A_n, B_n, M_n, N_n) that
// approximate an infinite-dimensional configuration, and the harness that
// turns per-n diagnostics into growth trends.
//
// The builtin families use the coordinate truncation of l^2 x l^2 to
// span{e_1..e_n} in each factor, with M_n = K_n x {0} and N_n the graph of
// diag(w_1..w_n). Such instances are "paired": every object splits along the
// planes span{(e_i, 0), (0, e_i)} up to a low-rank term, and the harness
// evaluates them in O(n). Custom families only provide the dense generator.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opext/paired.hpp"
#include "opext/subspace.hpp"

namespace opext {

struct TruncationInstance {
  Matrix a;
  Matrix b;
  Subspace m;
  Subspace n;
};

/// Structured form of a paired instance. M = K x {0}, N = graph of
/// diag(weights); all weights must be nonzero (so M cap N = {0}).
struct PairedInstance {
  Vector weights;
  PairedOp a;
  PairedOp b;

  Index n() const { return weights.size(); }
  TruncationInstance to_dense() const;
};

using ProbeRule = std::function<Vector(Index n)>;

struct TruncationFamily {
  std::string name;
  std::function<TruncationInstance(Index n)> generate;
  /// Present for the builtin paired families.
  std::function<PairedInstance(Index n)> paired;
  /// Probe target used by run(); absent means (e_1, 0).
  ProbeRule default_probe;
};

/// M = K x {0}, N = graph of T_1, A(x, y) = (T_alpha x, 0), B = 0, with
/// T_alpha = diag(i^-alpha). Throws PreconditionError for alpha < 0.
TruncationFamily family_example31(double alpha);

/// Same geometry; A = orthogonal projection onto span{(y_n, 0)} with
/// y_n = (1, 1/2, .., 1/n), B = 0. Default probe: (y_n, 0) / |y_n|.
TruncationFamily family_rank_one();

/// M = K x {0}, N = {0} x K: a closed-sum geometry (used as a negative
/// control).
TruncationFamily family_orthogonal_pair();

/// A = T^T P_M and B = T^T P_{M cap N} with T the rank-one map y -> x_n,
/// where x_n is the worst-represented unit direction of M^perp + N^perp (the
/// left singular vector of [basis(M^perp) | basis(N^perp)] for its smallest
/// singular value) and y is a seeded Gaussian vector. Throws
/// PreconditionError if the base geometry does not degrade with n (the
/// smallest frame singular value at n = 16 is not below 0.9 times that at
/// n = 4).
TruncationFamily family_adversarial(const TruncationFamily& base, std::uint64_t direction_seed);

/// Smallest singular value of the frame [basis(M^perp) | basis(N^perp)].
double perp_sum_frame_margin(const Subspace& m, const Subspace& n, const Tolerance& tol = {});

enum class Trend { kBounded, kUnbounded };
enum class ProbeFlag { kVanishing, kBoundedAway };

const char* to_string(Trend t);
const char* to_string(ProbeFlag p);

struct Thresholds {
  double slope = 0.2;
  double probe_ratio = 0.1;
  double probe_residual = 0.1;
};

struct GrowthReport {
  std::string family;
  std::vector<Index> ns;
  std::vector<double> extension_norms;
  std::vector<double> gap_margins;
  std::vector<std::optional<double>> metric_sups;
  std::vector<double> bounded_margins;
  std::vector<double> probe_norms;
  std::vector<double> probe_residuals;
  double slope = 0.0;
  Trend classification = Trend::kBounded;
  ProbeFlag probe_flag = ProbeFlag::kBoundedAway;
  Thresholds thresholds;
};

struct RunOptions {
  Tolerance tol;
  Thresholds thresholds;
  /// Use the dense route even when the family has a paired form.
  bool force_dense = false;
  /// Evaluate sizes concurrently; the report is assembled in order of n.
  bool parallel = true;
};

/// Throws PreconditionError if ns is empty or not strictly increasing and
/// Error naming the offending n if generation fails.
GrowthReport run(const TruncationFamily& f, const std::vector<Index>& ns,
                 const RunOptions& opts = {});

struct ProbePoint {
  double min_preimage_norm = 0.0;
  double residual = 0.0;
};

struct ProbeResult {
  std::vector<ProbePoint> points;
  ProbeFlag flag = ProbeFlag::kBoundedAway;
};

/// u_n = C_n^+ z_n for the canonical extension C_n. Throws ShapeError if the
/// rule returns a vector of the wrong dimension.
ProbeResult closability_probe(const TruncationFamily& f, const ProbeRule& z,
                              const std::vector<Index>& ns, const RunOptions& opts = {});

/// Probe rule (e_1, 0).
ProbeRule probe_e1();
/// Probe rule (y_n, 0) / |y_n| with y_n = (1, 1/2, .., 1/n).
ProbeRule probe_harmonic();
/// The zero vector.
ProbeRule probe_zero();

ProbeFlag classify_probe(const std::vector<ProbePoint>& points, const Thresholds& th);

/// Least-squares slope of log(values) against log(ns).
double loglog_slope(const std::vector<Index>& ns, const std::vector<double>& values);

Trend classify_growth(const std::vector<Index>& ns, const std::vector<double>& norms,
                      const Thresholds& th);

/// Hand-built witness for the rank-one family at truncation n:
/// u_k = s_k (x_k, 0) + s_k (-x_k, -T_1 x_k) with x_k the first k ones and
/// s_k = 1 / H_k.
struct Witness {
  Vector u;
  Vector image;  // C_n u_k
  double u_norm = 0.0;
  double image_norm = 0.0;
};

Witness rank_one_witness(Index n, Index k, const Tolerance& tol = {});

/// CSV with header n,extension_norm,gap_margin,metric_sup,probe_norm,probe_residual.
std::string to_csv(const GrowthReport& r);

/// JSON summary: family, ns, slope, classification, probe_flag, thresholds.
std::string summary_json(const GrowthReport& r);

}  // namespace opext
