#pragma once

// Command-line front end. run_command is the whole program minus process
// plumbing so tests can drive it with in-memory streams.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "opext/subspace.hpp"

namespace opext::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kIncompatible = 2,
  kExpectationMismatch = 3,
};

struct ParseError : Error {
  using Error::Error;
};

/// Problem file: optional "A", "B", "S", "T" (row-major nested arrays),
/// "M", "N" ({"spanning": [v1, v2, ...]}, each v a vector of the ambient
/// dimension) and "tol" ({"rank_rtol", "residual_atol"}).
struct Problem {
  std::optional<Matrix> a;
  std::optional<Matrix> b;
  std::optional<Matrix> s;
  std::optional<Matrix> t;
  std::optional<Subspace> m;
  std::optional<Subspace> n;
  Tolerance tol;
};

/// Library defaults overridden by OPEXT_TOL_RTOL / OPEXT_TOL_ATOL.
Tolerance default_tolerance();

/// Throws ParseError on malformed JSON, non-finite or non-numeric entries,
/// ragged rows and inconsistent dimensions.
Problem parse_problem(const std::string& text, const Tolerance& defaults);

nlohmann::ordered_json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

/// argv without the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opext::cli
