#include "kk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kk/error.hpp"
#include "kk/fieldexpr.hpp"

namespace kk::io {

namespace {

Eigen::MatrixXd identity_or(const json& j, const char* key, int size) {
  if (!j.contains(key)) return Eigen::MatrixXd::Identity(size, size);
  Eigen::MatrixXd m = matrix_from_json(j.at(key), key);
  if (m.rows() != size || m.cols() != size) {
    throw DimensionError(std::string(key) + " must be " + std::to_string(size) + "x" + std::to_string(size));
  }
  return m;
}

std::vector<std::vector<std::string>> string_grid(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInputError(std::string(what) + " must be an array of rows");
  std::vector<std::vector<std::string>> out;
  for (const auto& row : j) {
    if (!row.is_array()) throw InvalidInputError(std::string(what) + " rows must be arrays");
    std::vector<std::string> r;
    for (const auto& e : row) {
      if (e.is_string()) {
        r.push_back(e.get<std::string>());
      } else if (e.is_number()) {
        r.push_back(e.dump());
      } else {
        throw InvalidInputError(std::string(what) + " entries must be strings or numbers");
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> number_row(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInputError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw InvalidInputError(std::string(what) + " must contain numbers only");
    const double v = e.get<double>();
    if (!std::isfinite(v)) throw InvalidInputError(std::string(what) + " must be finite");
    out.push_back(v);
  }
  return out;
}

RunOptions parse_options(const json& j) {
  RunOptions o;
  if (!j.is_object()) return o;
  o.tol = j.value("tol", o.tol);
  o.fd_step = j.value("fd_step", o.fd_step);
  o.trials = j.value("trials", o.trials);
  o.seed = j.value("seed", o.seed);
  o.jobs = j.value("jobs", o.jobs);
  const std::string mode = j.value("derivatives", std::string("analytic"));
  if (mode == "analytic") {
    o.mode = basegeo::DerivativeMode::Analytic;
  } else if (mode == "fd") {
    o.mode = basegeo::DerivativeMode::FiniteDifference;
  } else {
    throw InvalidInputError("options.derivatives must be \"analytic\" or \"fd\"");
  }
  return o;
}

Eigen::MatrixXd parse_g0(const json& j, int dim) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "identity")) return Eigen::MatrixXd::Identity(dim, dim);
  if (j.is_string()) throw InvalidInputError("g0 must be \"identity\" or a matrix");
  Eigen::MatrixXd g = matrix_from_json(j, "g0");
  if (g.rows() != dim || g.cols() != dim) throw DimensionError("g0 must be " + std::to_string(dim) + "x" + std::to_string(dim));
  return g;
}

PathInput parse_path(const json& j, const bundle::MatrixRep& rep, const fieldexpr::ParamMap& params) {
  PathInput p;
  const int r = rep.rank();
  const Eigen::MatrixXd g0 = parse_g0(j.value("g0", json()), rep.dim());
  p.steps = j.value("steps", 100);
  if (!j.contains("v")) throw InvalidInputError("path needs a \"v\" entry");
  const json& v = j.at("v");
  if (!v.is_array() || v.empty()) throw InvalidInputError("path v must be a non-empty array");
  const bool sampled = v.front().is_array() && !v.front().empty() && v.front().front().is_number();
  if (sampled) {
    std::vector<std::pair<double, Eigen::VectorXd>> samples;
    for (const auto& row : v) {
      const auto nums = number_row(row, "path sample");
      if (static_cast<int>(nums.size()) != r + 1) {
        throw DimensionError("path samples need t plus " + std::to_string(r) + " components");
      }
      samples.emplace_back(nums[0], Eigen::Map<const Eigen::VectorXd>(nums.data() + 1, r));
    }
    const std::string interp = j.value("interpolation", std::string("linear"));
    if (interp != "linear" && interp != "hold") throw InvalidInputError("interpolation must be \"linear\" or \"hold\"");
    if (samples.size() == 1) p.constant_v = samples.front().second;
    p.path = bundle::PathSpec::sampled(std::move(samples),
                                       interp == "hold" ? bundle::Interpolation::Hold : bundle::Interpolation::Linear, g0);
    return p;
  }
  std::vector<std::string> exprs;
  for (const auto& row : v) {
    if (row.is_string()) {
      exprs.push_back(row.get<std::string>());
    } else if (row.is_array() && row.size() == 1 && row.front().is_string()) {
      exprs.push_back(row.front().get<std::string>());
    } else {
      throw InvalidInputError("analytic path v must list one expression in t per component");
    }
  }
  if (static_cast<int>(exprs.size()) != r) {
    throw DimensionError("path v has " + std::to_string(exprs.size()) + " components, rep has " + std::to_string(r));
  }
  fieldexpr::ParseOptions opts;
  opts.num_vars = 1;
  opts.aliases = {"t"};
  bool constant = true;
  Eigen::VectorXd c(r);
  for (int i = 0; i < r; ++i) {
    const auto e = fieldexpr::bind(fieldexpr::parse(exprs[i], opts), params);
    if (!e.is_constant()) {
      constant = false;
      break;
    }
    const double zero[1] = {0.0};
    c(i) = fieldexpr::evaluate(e, zero);
  }
  if (constant) p.constant_v = c;
  p.path = bundle::PathSpec::analytic(exprs, g0, params);
  return p;
}

}  // namespace

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InvalidInputError(std::string(what) + " must be a non-empty array of rows");
  const auto rows = static_cast<int>(j.size());
  const auto first = number_row(j.front(), what);
  Eigen::MatrixXd m(rows, static_cast<int>(first.size()));
  for (int i = 0; i < rows; ++i) {
    const auto row = number_row(j[i], what);
    if (row.size() != first.size()) throw DimensionError(std::string(what) + " rows differ in length");
    for (std::size_t k = 0; k < row.size(); ++k) m(i, static_cast<int>(k)) = row[k];
  }
  return m;
}

liealg::LieAlgebraSpec parse_algebra(const json& j) {
  if (!j.is_object()) throw InvalidInputError("algebra must be an object");
  if (j.contains("builtin")) {
    const std::string name = j.at("builtin").get<std::string>();
    const int n = j.at("n").get<int>();
    liealg::Builtin which;
    int r = 0;
    if (name == "abelian") {
      which = liealg::Builtin::Abelian;
      r = j.at("r").get<int>();
    } else if (name == "su2") {
      which = liealg::Builtin::Su2;
      r = 3;
    } else if (name == "u1_su2") {
      which = liealg::Builtin::U1Su2;
      r = 4;
    } else {
      throw InvalidInputError("unknown builtin algebra '" + name + "'");
    }
    return liealg::builtin_algebra(which, n, r, identity_or(j, "h_b", n), identity_or(j, "h_k", r));
  }
  const int n = j.at("n").get<int>();
  const int r = j.at("r").get<int>();
  if (n < 0 || r < 0) throw InvalidInputError("algebra n and r must be nonnegative");
  const int N = n + r;
  Tensor3 c({N, N, N}, 0.0);
  for (const auto& t : j.value("c", json::array())) {
    if (!t.is_array() || t.size() != 4) throw InvalidInputError("structure constants are [A, B, C, value] triplets");
    const int a = t[0].get<int>(), b = t[1].get<int>(), cc = t[2].get<int>();
    if (a < 0 || a >= N || b < 0 || b >= N || cc < 0 || cc >= N) {
      throw InvalidInputError("structure constant index out of range in entry " + t.dump());
    }
    c(a, b, cc) = t[3].get<double>();
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
  h.topLeftCorner(n, n) = identity_or(j, "h_b", n);
  h.bottomRightCorner(r, r) = identity_or(j, "h_k", r);
  std::vector<std::string> names;
  if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
  return liealg::LieAlgebraSpec(n, r, std::move(c), std::move(h), std::move(names));
}

ProblemSpec parse_problem(const json& j) {
  if (!j.is_object()) throw InvalidInputError("problem file must hold a JSON object");
  ProblemSpec p;
  p.options = parse_options(j.value("options", json::object()));
  p.config = j;
  json resolved = {{"tol", p.options.tol},
                   {"fd_step", p.options.fd_step},
                   {"trials", p.options.trials},
                   {"seed", p.options.seed},
                   {"derivatives", p.options.mode == basegeo::DerivativeMode::Analytic ? "analytic" : "fd"}};
  p.config["options"] = resolved;

  if (j.contains("algebra")) p.algebra = parse_algebra(j.at("algebra"));

  fieldexpr::ParamMap params;
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
  }

  if (j.contains("coframe")) {
    const auto grid = string_grid(j.at("coframe"), "coframe");
    const int n = static_cast<int>(grid.size());
    std::vector<std::string> aliases;
    if (j.contains("chart")) {
      const auto& chart = j.at("chart");
      if (chart.contains("n") && chart.at("n").get<int>() != n) {
        throw DimensionError("chart.n differs from the number of coframe rows");
      }
      if (chart.contains("names")) {
        aliases = chart.at("names").get<std::vector<std::string>>();
        if (static_cast<int>(aliases.size()) != n) throw DimensionError("chart.names needs one name per coordinate");
      }
    }
    if (n < 2) throw InvalidInputError("chart dimension must be at least 2");
    const Eigen::MatrixXd b = p.algebra ? p.algebra->b() : Eigen::MatrixXd::Identity(n, n);
    if (b.rows() != n) {
      throw DimensionError("algebra s-block has size " + std::to_string(b.rows()) + " but the coframe has " +
                           std::to_string(n) + " rows");
    }
    p.coframe = basegeo::CoframeField::parse(grid, b, params, aliases);
    const int r = p.algebra ? p.algebra->r() : 0;
    if (j.contains("gauge")) {
      p.gauge = basegeo::GaugeField::parse(string_grid(j.at("gauge"), "gauge"), n, params, aliases);
    } else {
      p.gauge = basegeo::GaugeField::zero(r, n);
    }

    if (j.contains("points")) {
      for (const auto& row : j.at("points")) p.points.push_back(number_row(row, "point"));
    } else if (j.contains("lattice")) {
      const auto& l = j.at("lattice");
      basegeo::Lattice lat{number_row(l.at("min"), "lattice.min"), number_row(l.at("max"), "lattice.max"),
                           l.at("steps").get<std::vector<int>>()};
      p.points = basegeo::expand_lattice(lat);
    }
    for (const auto& pt : p.points) {
      if (static_cast<int>(pt.size()) != n) throw DimensionError("every point needs " + std::to_string(n) + " coordinates");
    }
  }

  if (j.contains("rep")) {
    if (!p.algebra) throw InvalidInputError("a rep needs an algebra section");
    p.rep = bundle::builtin_rep(bundle::parse_rep_name(j.at("rep").get<std::string>()), *p.algebra);
    if (j.contains("paths")) {
      for (const auto& pj : j.at("paths")) p.paths.push_back(parse_path(pj, *p.rep, params));
    } else if (j.contains("v")) {
      p.paths.push_back(parse_path(j, *p.rep, params));
    }
  }

  if (j.contains("identities")) p.identities_dim = j.at("identities").at("N").get<int>();
  return p;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("input file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_problem(j);
}

std::string config_digest(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json RunReport::to_json() const {
  json out = body;
  out["command"] = command;
  out["exit_code"] = exit_code;
  out["runtime"] = {{"jobs", jobs}, {"wall_time", wall_time}};
  return out;
}

json normalize(json report) {
  report.erase("runtime");
  return report;
}

}  // namespace kk::io
