#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kk/basegeo.hpp"
#include "kk/bundle.hpp"
#include "kk/liealg.hpp"

namespace kk::io {

using nlohmann::json;

struct RunOptions {
  double tol = 1e-10;
  double fd_step = 1e-3;
  basegeo::DerivativeMode mode = basegeo::DerivativeMode::Analytic;
  int trials = 500;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct PathInput {
  bundle::PathSpec path;
  int steps = 100;
  // Set when v is constant, so the exact lift exp(T(v)) is available.
  std::optional<Eigen::VectorXd> constant_v;
};

/// A problem file with everything resolved. Sections are optional; each
/// command checks for the ones it needs.
struct ProblemSpec {
  json config;  // the input document after defaults were filled in
  std::optional<liealg::LieAlgebraSpec> algebra;
  std::optional<basegeo::CoframeField> coframe;
  std::optional<basegeo::GaugeField> gauge;
  std::vector<std::vector<double>> points;
  std::optional<bundle::MatrixRep> rep;
  std::vector<PathInput> paths;
  std::optional<int> identities_dim;
  RunOptions options;
};

/// Algebra section: either {"builtin": "abelian"|"su2"|"u1_su2", "n", "r"?,
/// "h_b"?, "h_k"?} or {"n", "r", "c": [[A,B,C,value],...], "h_b", "h_k"}
/// with zero-based indices. Missing metric blocks default to the identity.
liealg::LieAlgebraSpec parse_algebra(const json& j);

ProblemSpec parse_problem(const json& j);
// Throws IoError when the file cannot be read or is not JSON.
ProblemSpec load_problem(const std::string& path);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const char* what);

// 16 hex digits of FNV-1a over the compact dump of `config`.
std::string config_digest(const json& config);

/// Command output. `body` holds everything except the run-specific
/// "runtime" block (jobs, wall time), which normalize() strips.
struct RunReport {
  std::string command;
  json body;
  int exit_code = 0;
  double wall_time = 0.0;
  int jobs = 1;

  json to_json() const;
};

json normalize(json report);

}  // namespace kk::io
