#include "opext/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "opext/asymptotics.hpp"
#include "opext/douglas.hpp"
#include "opext/extension.hpp"
#include "opext/halmos.hpp"
#include "opext/starorder.hpp"

namespace opext::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

double env_double(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !std::isfinite(v)) {
    throw ParseError(std::string(name) + ": not a finite number: " + raw);
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns of the returned matrix are the listed vectors.
Matrix spanning_from_json(const json& j, const std::string& what, Index ambient_hint) {
  if (!j.is_object() || !j.contains("spanning")) {
    throw ParseError(what + ": expected an object with member \"spanning\"");
  }
  const json& list = j.at("spanning");
  if (!list.is_array()) throw ParseError(what + ".spanning: expected an array of vectors");
  if (list.empty()) {
    if (ambient_hint < 0) throw ParseError(what + ": empty spanning set with unknown ambient");
    return Matrix(ambient_hint, 0);
  }
  const Matrix rows = matrix_from_json(list, what + ".spanning");
  return rows.transpose();
}

ojson vector_json(const Vector& v) {
  ojson a = ojson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

const Matrix& need(const std::optional<Matrix>& m, const char* name) {
  if (!m) throw ParseError(std::string("problem file lacks \"") + name + "\"");
  return *m;
}

const Subspace& need(const std::optional<Subspace>& s, const char* name) {
  if (!s) throw ParseError(std::string("problem file lacks \"") + name + "\"");
  return *s;
}

struct Options {
  std::string problem;
  bool no_matrices = false;
  std::string expect;
  std::string family;
  double alpha = 0.0;
  std::vector<long long> ns;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::string z = "e1";
  std::string csv_path;
  std::string json_path;
  bool dense = false;
  bool serial = false;
  Thresholds thresholds;
};

void emit(std::ostream& out, const ojson& j) { out << j.dump(2) << '\n'; }

int cmd_extend(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  const ExtensionReport r =
      build(need(p.a, "A"), need(p.b, "B"), need(p.m, "M"), need(p.n, "N"), p.tol);
  ojson j;
  j["compatible"] = r.compatible;
  j["incompat_residual"] = r.incompat_residual;
  if (r.compatible) {
    if (!o.no_matrices) {
      j["c_full"] = matrix_to_json(*r.c_full);
      j["c_canonical"] = matrix_to_json(*r.c_canonical);
    }
    j["bounded"] = r.bounded;
    j["bounded_margin"] = r.bounded_margin;
    j["closable"] = r.closable;
    j["closed"] = r.closed;
    j["criteria_coincide"] = r.criteria_coincide;
    j["extension_norm"] = r.extension_norm;
    j["metric_sup"] = optional_json(r.metric_sup);
    j["agreement_m"] = r.agreement_m;
    j["agreement_n"] = r.agreement_n;
  }
  emit(out, j);
  return r.compatible ? kOk : kIncompatible;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  const Matrix& a = need(p.a, "A");
  const Matrix& b = need(p.b, "B");
  const Subspace& m = need(p.m, "M");
  const Subspace& n = need(p.n, "N");
  require_extension_shapes(a, b, m, n, "check");
  const Compatibility c = compatible(a, b, m, n, p.tol);
  ojson j;
  j["compatible"] = c.ok;
  j["incompat_residual"] = c.residual;
  if (!c.ok) {
    emit(out, j);
    return kIncompatible;
  }
  const CriterionResult bc = bounded_criterion(a, b, m, n, p.tol);
  const HalmosDecomposition h = decompose(m, n, p.tol);
  const Index dim = m.ambient();
  const Matrix pm = m.projector();
  const Matrix pnp = Matrix::Identity(dim, dim) - n.projector();
  const DouglasSolution ds = douglas_solve(pm * pnp, pm * (a - b).transpose(), p.tol);
  j["bounded"] = bc.holds;
  j["bounded_margin"] = bc.margin;
  j["closable"] = closable_criterion(a, b, m, n, p.tol);
  j["closed"] = closed_criterion(a, b, m, n, p.tol);
  j["bounded_via_halmos"] = bounded_via_halmos(a, b, h, p.tol);
  j["bounded_via_douglas"] = ds.solvable;
  j["sum_closed"] = closedness_test(h, p.tol).closed;
  j["gap_margin"] = closedness_test(h, p.tol).margin;
  emit(out, j);
  if (!o.expect.empty()) {
    const bool want = o.expect == "bounded";
    if (want != bc.holds) {
      err << "expected " << o.expect << ", criterion says "
          << (bc.holds ? "bounded" : "unbounded") << '\n';
      return kExpectationMismatch;
    }
  }
  return kOk;
}

int cmd_metric(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  const Matrix& a = need(p.a, "A");
  const Matrix& b = need(p.b, "B");
  const Subspace& m = need(p.m, "M");
  const Subspace& n = need(p.n, "N");
  const MetricSup s = metric_sup(a, b, m, n, p.tol);
  ojson j;
  j["kappa13"] = s.kappa13;
  j["lower"] = s.lower;
  j["upper"] = s.upper;
  if (o.samples > 0) {
    j["monte_carlo"] = metric_sup_monte_carlo(a, b, m, n, o.samples, o.seed);
    j["samples"] = o.samples;
    j["seed"] = o.seed;
  }
  emit(out, j);
  return kOk;
}

int cmd_halmos(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  const HalmosDecomposition h = decompose(need(p.m, "M"), need(p.n, "N"), p.tol);
  const ClosednessTest ct = closedness_test(h, p.tol);
  ojson j;
  j["dims"] = {{"m_cap_n", h.corner_mn.dim()},
               {"m_cap_n_perp", h.corner_mnp.dim()},
               {"m_perp_cap_n", h.corner_mpn.dim()},
               {"m_perp_cap_n_perp", h.corner_mpnp.dim()},
               {"m0", h.m0.dim()},
               {"m1", h.m1.dim()}};
  j["s_spectrum"] = vector_json(h.s.diagonal());
  j["reconstruction_residual"] = h.reconstruction_residual;
  j["closed"] = ct.closed;
  j["gap_margin"] = ct.margin;
  emit(out, j);
  return kOk;
}

int cmd_douglas(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  ojson j;
  if (p.s || p.t) {
    const DouglasSolution d = douglas_solve(need(p.s, "S"), need(p.t, "T"), p.tol);
    j["equation"] = "T = S X";
    j["solvable"] = d.solvable;
    j["x"] = d.x ? matrix_to_json(*d.x) : ojson(nullptr);
    j["lambda"] = optional_json(d.lambda);
    j["residual"] = d.residual;
    j["certificate_min_eig"] = d.certificate_min_eig;
    j["certified"] = d.certified;
  } else {
    const DualSolution d = dual_solve(need(p.a, "A"), need(p.b, "B"), p.tol);
    j["equation"] = "B = X A";
    j["solvable"] = d.solvable;
    j["x"] = d.x ? matrix_to_json(*d.x) : ojson(nullptr);
    j["residual"] = d.residual;
  }
  emit(out, j);
  return kOk;
}

int cmd_star_sup(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.problem), default_tolerance());
  const Matrix& a = need(p.a, "A");
  const Matrix& b = need(p.b, "B");
  const StarSupremum s = star_supremum(a, b, p.tol);
  ojson j;
  j["exists"] = s.exists;
  j["reason"] = std::string(to_string(s.reason));
  j["adjoint_gap"] = s.adjoint_gap;
  j["necessary_condition"] = necessary_eq15(a, b, p.tol);
  j["c"] = s.c ? matrix_to_json(*s.c) : ojson(nullptr);
  emit(out, j);
  return kOk;
}

TruncationFamily family_from(const Options& o) {
  if (o.family == "example31") return family_example31(o.alpha);
  if (o.family == "rank-one") return family_rank_one();
  if (o.family == "orthogonal-pair") return family_orthogonal_pair();
  if (o.family == "adversarial") return family_adversarial(family_example31(o.alpha), o.seed);
  throw ParseError("unknown family: " + o.family);
}

std::vector<Index> sizes(const Options& o) {
  std::vector<Index> ns;
  for (long long n : o.ns) ns.push_back(static_cast<Index>(n));
  return ns;
}

RunOptions run_options(const Options& o) {
  RunOptions r;
  r.tol = default_tolerance();
  r.thresholds = o.thresholds;
  r.force_dense = o.dense;
  r.parallel = !o.serial;
  return r;
}

/// CSV to --csv or stdout; JSON to --json or stdout after a blank line.
void emit_pair(const Options& o, const std::string& csv, const std::string& summary,
               std::ostream& out) {
  if (o.csv_path.empty()) {
    out << csv;
  } else {
    write_file(o.csv_path, csv);
  }
  if (o.json_path.empty()) {
    if (o.csv_path.empty()) out << '\n';
    out << summary;
  } else {
    write_file(o.json_path, summary);
  }
}

int cmd_family_run(const Options& o, std::ostream& out) {
  const GrowthReport r = run(family_from(o), sizes(o), run_options(o));
  emit_pair(o, to_csv(r), summary_json(r), out);
  return kOk;
}

int cmd_probe(const Options& o, std::ostream& out) {
  ProbeRule z;
  if (o.z == "e1") {
    z = probe_e1();
  } else if (o.z == "harmonic") {
    z = probe_harmonic();
  } else if (o.z == "zero") {
    z = probe_zero();
  } else {
    throw ParseError("unknown probe rule: " + o.z);
  }
  const TruncationFamily f = family_from(o);
  const std::vector<Index> ns = sizes(o);
  const ProbeResult r = closability_probe(f, z, ns, run_options(o));
  std::ostringstream csv;
  csv << "n,min_preimage_norm,residual\n";
  for (std::size_t k = 0; k < ns.size(); ++k) {
    csv << ns[k] << ',' << fmt(r.points[k].min_preimage_norm) << ','
        << fmt(r.points[k].residual) << '\n';
  }
  ojson j;
  j["family"] = f.name;
  j["z"] = o.z;
  j["flag"] = to_string(r.flag);
  j["thresholds"] = {{"probe_ratio", o.thresholds.probe_ratio},
                     {"probe_residual", o.thresholds.probe_residual}};
  emit_pair(o, csv.str(), j.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

Tolerance default_tolerance() {
  Tolerance t;
  t.rank_rtol = env_double("OPEXT_TOL_RTOL", t.rank_rtol);
  t.residual_atol = env_double("OPEXT_TOL_ATOL", t.residual_atol);
  try {
    t.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("environment tolerance: ") + e.what());
  }
  return t;
}

ojson matrix_to_json(const Matrix& m) {
  ojson rows = ojson::array();
  for (Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j.front().is_array()) throw ParseError(what + ": expected an array of rows");
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ParseError(what + ": ragged row " + std::to_string(i));
    }
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ParseError(what + ": non-numeric entry");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ParseError(what + ": non-finite entry");
      m(i, c) = x;
    }
  }
  return m;
}

Problem parse_problem(const std::string& text, const Tolerance& defaults) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem file must be a JSON object");

  Problem p;
  p.tol = defaults;
  if (doc.contains("tol")) {
    const json& t = doc.at("tol");
    if (!t.is_object()) throw ParseError("tol: expected an object");
    for (const char* key : {"rank_rtol", "residual_atol"}) {
      if (!t.contains(key)) continue;
      if (!t.at(key).is_number()) throw ParseError(std::string("tol.") + key + ": not a number");
      const double v = t.at(key).get<double>();
      (std::string(key) == "rank_rtol" ? p.tol.rank_rtol : p.tol.residual_atol) = v;
    }
    try {
      p.tol.validate();
    } catch (const Error& e) {
      throw ParseError(std::string("tol: ") + e.what());
    }
  }
  for (const auto& [key, slot] : {std::pair{"A", &p.a}, std::pair{"B", &p.b},
                                  std::pair{"S", &p.s}, std::pair{"T", &p.t}}) {
    if (doc.contains(key)) *slot = matrix_from_json(doc.at(key), key);
  }
  if (p.a && p.b && (p.a->rows() != p.b->rows() || p.a->cols() != p.b->cols())) {
    throw ParseError("A and B differ in shape");
  }
  if (p.s && p.t && p.s->rows() != p.t->rows()) {
    throw ParseError("S and T differ in row count");
  }

  Index ambient = p.a ? p.a->cols() : (p.b ? p.b->cols() : -1);
  std::optional<Matrix> m_span;
  std::optional<Matrix> n_span;
  if (doc.contains("M")) m_span = spanning_from_json(doc.at("M"), "M", ambient);
  if (m_span && ambient < 0) ambient = m_span->rows();
  if (doc.contains("N")) n_span = spanning_from_json(doc.at("N"), "N", ambient);
  if (n_span && ambient < 0) ambient = n_span->rows();
  for (const auto& [name, span, slot] :
       {std::tuple{"M", &m_span, &p.m}, std::tuple{"N", &n_span, &p.n}}) {
    if (!*span) continue;
    if ((*span)->rows() != ambient) {
      throw ParseError(std::string(name) + ": vectors have dimension " +
                       std::to_string((*span)->rows()) + ", expected " + std::to_string(ambient));
    }
    *slot = span_of(**span, p.tol);
  }
  return p;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"opext: extensions of operators defined on two subspaces"};
  app.require_subcommand(1);
  Options o;

  auto problem_cmd = [&](const char* name, const char* help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("problem", o.problem, "problem JSON file")->required();
    return c;
  };
  CLI::App* extend = problem_cmd("extend", "build the canonical extension");
  extend->add_flag("--no-matrices", o.no_matrices, "omit C matrices from the report");
  CLI::App* check = problem_cmd("check", "evaluate the boundedness criteria");
  check->add_option("--expect", o.expect, "expected verdict")
      ->check(CLI::IsMember({"bounded", "unbounded"}));
  CLI::App* metric = problem_cmd("metric", "metric supremum and its sandwich");
  metric->add_option("--samples", o.samples, "Monte-Carlo samples (0 to skip)");
  metric->add_option("--seed", o.seed, "random seed");
  CLI::App* halmos = problem_cmd("halmos", "two-subspace decomposition");
  CLI::App* douglas = problem_cmd("douglas", "solve T = S X, or B = X A");
  CLI::App* star = problem_cmd("star-sup", "star-order supremum of A and B");

  auto family_cmd = [&](const char* name, const char* help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("--family", o.family, "example31 | rank-one | adversarial | orthogonal-pair")
        ->required();
    c->add_option("--alpha", o.alpha, "exponent of example31 (base of adversarial)");
    c->add_option("--ns", o.ns, "comma-separated sizes")->required()->delimiter(',');
    c->add_option("--seed", o.seed, "direction seed for adversarial");
    c->add_option("--csv", o.csv_path, "write the CSV table here");
    c->add_option("--json", o.json_path, "write the JSON summary here");
    c->add_option("--probe-ratio", o.thresholds.probe_ratio, "probe decay threshold");
    c->add_option("--probe-residual", o.thresholds.probe_residual, "probe residual cap");
    c->add_flag("--dense", o.dense, "use dense evaluation");
    c->add_flag("--serial", o.serial, "evaluate sizes one at a time");
    return c;
  };
  CLI::App* family_run = family_cmd("family-run", "sweep a truncation family");
  family_run->add_option("--slope-threshold", o.thresholds.slope, "growth slope threshold");
  CLI::App* probe = family_cmd("probe", "closability probe along a family");
  probe->add_option("--z", o.z, "e1 | harmonic | zero");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (extend->parsed()) return cmd_extend(o, out);
    if (check->parsed()) return cmd_check(o, out, err);
    if (metric->parsed()) return cmd_metric(o, out);
    if (halmos->parsed()) return cmd_halmos(o, out);
    if (douglas->parsed()) return cmd_douglas(o, out);
    if (star->parsed()) return cmd_star_sup(o, out);
    if (family_run->parsed()) return cmd_family_run(o, out);
    if (probe->parsed()) return cmd_probe(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }
  return kParseError;
}

}  // namespace opext::cli
