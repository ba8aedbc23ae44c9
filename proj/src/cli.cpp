#include "kk/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "kk/error.hpp"
#include "kk/exterior.hpp"
#include "kk/kkcurv.hpp"
#include "kk/sweep.hpp"

namespace kk::cli {

namespace {

using io::json;
using io::RunReport;

json header(const io::ProblemSpec& p) { return {{"config", p.config}, {"config_digest", io::config_digest(p.config)}}; }

const liealg::LieAlgebraSpec& need_algebra(const io::ProblemSpec& p) {
  if (!p.algebra) throw InvalidInputError("problem has no algebra section");
  return *p.algebra;
}

void need_fields(const io::ProblemSpec& p) {
  need_algebra(p);
  if (!p.coframe) throw InvalidInputError("problem has no coframe section");
  if (p.points.empty()) throw InvalidInputError("problem has no evaluation points");
}

json check_json(const liealg::InvariantCheck& c) {
  return {{"name", c.name},
          {"passed", c.passed},
          {"max_violation", c.max_violation},
          {"offending", c.offending},
          {"message", c.message}};
}

json signature_json(const liealg::Signature& s) {
  return {{"positive", s.positive}, {"negative", s.negative}, {"zero", s.zero}, {"kind", liealg::to_string(s.kind)}};
}

json validation_json(const liealg::ValidationReport& v) {
  json checks = json::array();
  for (const auto& c : v.checks) checks.push_back(check_json(c));
  return {{"ok", v.ok()},
          {"checks", checks},
          {"unimodular", v.unimodular},
          {"unimodular_violation", v.unimodular_violation},
          {"b_signature", signature_json(v.b_signature)},
          {"k_signature", signature_json(v.k_signature)}};
}

basegeo::GeometryOptions geometry_options(const io::RunOptions& o) {
  basegeo::GeometryOptions g;
  g.mode = o.mode;
  g.fd_step = o.fd_step;
  return g;
}

// Hard invariants of the algebra gate every geometric command.
std::optional<RunReport> reject_invalid_algebra(const std::string& command, const io::ProblemSpec& p) {
  const auto v = liealg::validate_spec(need_algebra(p), p.options.tol);
  if (v.ok()) return std::nullopt;
  RunReport rep;
  rep.command = command;
  rep.body = header(p);
  rep.body["status"] = "invalid_algebra";
  rep.body["validation"] = validation_json(v);
  rep.exit_code = kExitViolation;
  return rep;
}

std::string status_name(sweep::PointStatus s) {
  switch (s) {
    case sweep::PointStatus::Ok:
      return "ok";
    case sweep::PointStatus::InvariantViolation:
      return "invariant_violation";
    case sweep::PointStatus::NumericFailure:
      return "numeric_failure";
  }
  return "ok";
}

json point_json(const sweep::PointResult& r) {
  json j = {{"x", r.point}, {"status", status_name(r.status)}};
  if (r.status != sweep::PointStatus::Ok) {
    j["error"] = r.error;
    return j;
  }
  j["Ric"] = {{"ad", io::to_json(r.closed.ric_ad)},
              {"a_delta", io::to_json(r.closed.ric_a_delta)},
              {"alpha_delta", io::to_json(r.closed.ric_alpha_delta)}};
  j["R"] = r.closed.scalar;
  j["Ein"] = {{"ad", io::to_json(r.closed.ein_ad)}, {"a_delta", io::to_json(r.closed.ein_a_delta)}};
  j["eym"] = {{"einstein_norm", r.eym.einstein_norm},
              {"ym_norm", r.eym.ym_norm},
              {"einstein_block", io::to_json(r.eym.einstein_block)},
              {"ym_block", io::to_json(r.eym.ym_block)}};
  j["direct"] = {{"R", r.direct_scalar}, {"Ric", io::to_json(r.direct_ricci)}};
  j["cross_check"] = {{"ric_ad", r.cross.ric_ad},
                      {"ric_a_delta", r.cross.ric_a_delta},
                      {"ric_alpha_delta", r.cross.ric_alpha_delta},
                      {"R", r.cross.scalar},
                      {"ein_ad", r.cross.ein_ad},
                      {"max", r.cross.max()}};
  j["connection"] = {{"metricity", r.metricity}, {"torsion", r.torsion}};
  return j;
}

std::string csv_number(const json& v) { return v.is_null() ? "" : v.dump(); }

}  // namespace

RunReport cmd_validate(const io::ProblemSpec& p) {
  const auto v = liealg::validate_spec(need_algebra(p), p.options.tol);
  RunReport rep;
  rep.command = "validate";
  rep.body = header(p);
  rep.body["validation"] = validation_json(v);
  rep.body["cosmological_constant"] = json();
  if (p.algebra->r() > 0 && v.ok()) rep.body["cosmological_constant"] = liealg::cosmological_constant(*p.algebra);
  rep.body["status"] = v.ok() ? "ok" : "violation";
  rep.exit_code = v.ok() ? kExitOk : kExitViolation;
  return rep;
}

RunReport cmd_identities(int frame_dim, int trials, std::uint64_t seed) {
  if (frame_dim < 3 || frame_dim > 8) {
    throw InvalidInputError("identities need 3 <= N <= 8, got N = " + std::to_string(frame_dim));
  }
  if (trials < 1) throw InvalidInputError("trials must be positive");
  const auto r = exterior::check_identities(frame_dim, trials, seed);
  RunReport rep;
  rep.command = "identities";
  const json config = {{"N", frame_dim}, {"trials", trials}, {"seed", seed}};
  rep.body = {{"config", config}, {"config_digest", io::config_digest(config)}};
  json ids = json::array();
  for (const auto& id : r.identities) {
    ids.push_back({{"name", id.name}, {"checks", id.checks}, {"max_residual", id.max_residual}});
  }
  rep.body["exhaustive"] = r.exhaustive;
  rep.body["identities"] = ids;
  rep.body["max_residual"] = r.max_residual();
  rep.body["status"] = r.passed() ? "ok" : "violation";
  rep.exit_code = r.passed() ? kExitOk : kExitViolation;
  return rep;
}

RunReport cmd_curvature(const io::ProblemSpec& p) {
  need_fields(p);
  if (auto bad = reject_invalid_algebra("curvature", p)) return *bad;
  sweep::SweepOptions so;
  so.geometry = geometry_options(p.options);
  const auto results = p.options.jobs <= 1
                           ? sweep::sweep_serial(*p.algebra, *p.coframe, *p.gauge, p.points, so)
                           : sweep::sweep_parallel(*p.algebra, *p.coframe, *p.gauge, p.points, so, p.options.jobs);
  const auto s = sweep::summarize(results);
  RunReport rep;
  rep.command = "curvature";
  rep.body = header(p);
  json points = json::array();
  int worst = kExitOk;
  for (const auto& r : results) {
    points.push_back(point_json(r));
    if (r.status == sweep::PointStatus::NumericFailure) worst = kExitNumeric;
    if (r.status == sweep::PointStatus::InvariantViolation && worst == kExitOk) worst = kExitViolation;
  }
  rep.body["points"] = points;
  rep.body["summary"] = {{"points", s.points},
                         {"failures", s.failures},
                         {"max_einstein_norm", s.max_einstein_norm},
                         {"max_ym_norm", s.max_ym_norm},
                         {"max_cross_check", s.max_cross_check},
                         {"max_metricity", s.max_metricity},
                         {"max_torsion", s.max_torsion},
                         {"sum_R", s.sum_scalar}};
  if (p.algebra->r() > 0) rep.body["summary"]["cosmological_constant"] = liealg::cosmological_constant(*p.algebra);
  rep.body["status"] = worst == kExitOk ? "ok" : "point_failures";
  rep.exit_code = worst;
  return rep;
}

RunReport cmd_lift(const io::ProblemSpec& p) {
  if (!p.rep) throw InvalidInputError("problem has no rep section");
  if (p.paths.empty()) throw InvalidInputError("problem has no paths");
  if (auto bad = reject_invalid_algebra("lift", p)) return *bad;
  RunReport rep;
  rep.command = "lift";
  rep.body = header(p);
  json paths = json::array();
  for (const auto& in : p.paths) {
    const auto lifted = bundle::lift_path(*p.rep, in.path, in.steps);
    json elems = json::array();
    for (const auto& g : lifted.elements) elems.push_back(io::to_json(g));
    const auto& last = lifted.elements.back();
    const auto back = bundle::lift_path(*p.rep, bundle::PathSpec::reversed(in.path, last), in.steps);
    json pj = {{"steps", in.steps},
               {"elements", elems},
               {"final", io::to_json(last)},
               {"max_drift", lifted.max_drift},
               {"max_drift_before_projection", lifted.max_drift_before_projection},
               {"return_error", (back.elements.back() - in.path.g0).cwiseAbs().maxCoeff()}};
    constexpr int kBaseSteps = 8;
    pj["convergence"] = {{"steps", {kBaseSteps, 2 * kBaseSteps, 4 * kBaseSteps}},
                         {"order", bundle::richardson_order(*p.rep, in.path, kBaseSteps)}};
    if (in.constant_v) {
      const Eigen::MatrixXd exact = in.path.g0 * bundle::exp_generator(*p.rep, *in.constant_v);
      pj["oracle_error"] = (last - exact).cwiseAbs().maxCoeff();
    }
    paths.push_back(std::move(pj));
  }
  rep.body["paths"] = paths;
  rep.body["status"] = "ok";
  return rep;
}

RunReport cmd_gauge_check(const io::ProblemSpec& p, int elements) {
  need_fields(p);
  if (!p.rep) throw InvalidInputError("problem has no rep section");
  if (auto bad = reject_invalid_algebra("gauge-check", p)) return *bad;
  constexpr double kDeextraTol = 1e-6, kGaugeTol = 1e-5, kAdjointTol = 1e-8;
  const auto& spec = *p.algebra;
  std::mt19937_64 rng(p.options.seed);
  std::vector<Eigen::MatrixXd> group;
  group.push_back(Eigen::MatrixXd::Identity(p.rep->dim(), p.rep->dim()));
  for (int i = 1; i < elements; ++i) group.push_back(bundle::random_element(*p.rep, rng));

  const auto opts = geometry_options(p.options);
  double max_de = 0.0, max_gc = 0.0, max_adj = 0.0;
  json rows = json::array();
  for (const auto& x : p.points) {
    const auto geom = basegeo::compute_geometry(spec, *p.coframe, *p.gauge, x, opts);
    for (std::size_t k = 0; k < group.size(); ++k) {
      const auto& g = group[k];
      const auto s = bundle::adjoint_of(*p.rep, spec, g);
      const double adj = (s.transpose() * spec.h() * s - spec.h()).cwiseAbs().maxCoeff();
      const double de = bundle::verify_deextra(geom, *p.rep, spec, g);
      const double gc = bundle::verify_gauge_covariance(geom, *p.rep, spec, g);
      max_de = std::max(max_de, de);
      max_gc = std::max(max_gc, gc);
      max_adj = std::max(max_adj, adj);
      rows.push_back({{"x", x}, {"element", k}, {"deextra", de}, {"gauge_covariance", gc}, {"adjoint_metric", adj}});
    }
  }
  const bool ok = max_de <= kDeextraTol && max_gc <= kGaugeTol && max_adj <= kAdjointTol;
  RunReport rep;
  rep.command = "gauge-check";
  rep.body = header(p);
  rep.body["checks"] = rows;
  rep.body["summary"] = {{"max_deextra", max_de},
                         {"max_gauge_covariance", max_gc},
                         {"max_adjoint_metric", max_adj},
                         {"tolerances", {{"deextra", kDeextraTol}, {"gauge_covariance", kGaugeTol}, {"adjoint_metric", kAdjointTol}}}};
  rep.body["status"] = ok ? "ok" : "violation";
  rep.exit_code = ok ? kExitOk : kExitViolation;
  return rep;
}

std::string to_csv(const RunReport& r) {
  std::ostringstream os;
  const json& b = r.body;
  if (r.command == "curvature" && b.contains("points")) {
    const int n = b["points"].empty() ? 0 : static_cast<int>(b["points"][0]["x"].size());
    for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
    os << "status,R,einstein_norm,ym_norm,cross_check_max\n";
    for (const auto& p : b["points"]) {
      for (const auto& v : p["x"]) os << v.dump() << ",";
      os << p["status"].get<std::string>();
      if (p["status"] == "ok") {
        os << "," << csv_number(p["R"]) << "," << csv_number(p["eym"]["einstein_norm"]) << ","
           << csv_number(p["eym"]["ym_norm"]) << "," << csv_number(p["cross_check"]["max"]);
      } else {
        os << ",,,,";
      }
      os << "\n";
    }
  } else if (r.command == "validate" || (b.contains("validation") && !b.contains("points"))) {
    os << "check,passed,max_violation\n";
    for (const auto& c : b["validation"]["checks"]) {
      os << c["name"].get<std::string>() << "," << (c["passed"].get<bool>() ? "true" : "false") << ","
         << csv_number(c["max_violation"]) << "\n";
    }
  } else if (r.command == "identities") {
    os << "identity,checks,max_residual\n";
    for (const auto& c : b["identities"]) {
      os << c["name"].get<std::string>() << "," << c["checks"].dump() << "," << csv_number(c["max_residual"]) << "\n";
    }
  } else if (r.command == "lift") {
    os << "path,steps,max_drift,return_error,order,oracle_error\n";
    int i = 0;
    for (const auto& p : b["paths"]) {
      os << i++ << "," << p["steps"].dump() << "," << csv_number(p["max_drift"]) << "," << csv_number(p["return_error"])
         << "," << csv_number(p["convergence"]["order"]) << "," << csv_number(p.value("oracle_error", json())) << "\n";
    }
  } else if (r.command == "gauge-check") {
    os << "point,element,deextra,gauge_covariance,adjoint_metric\n";
    for (const auto& c : b["checks"]) {
      std::string x;
      for (const auto& v : c["x"]) x += (x.empty() ? "" : " ") + v.dump();
      os << x << "," << c["element"].dump() << "," << csv_number(c["deextra"]) << ","
         << csv_number(c["gauge_covariance"]) << "," << csv_number(c["adjoint_metric"]) << "\n";
    }
  }
  return os.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const io::IoError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const InvalidInputError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const io::json::exception*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const DegenerateMetricError*>(&e) || dynamic_cast<const DegenerateCoframeError*>(&e) ||
      dynamic_cast<const OffManifoldError*>(&e)) {
    return kExitViolation;
  }
  return kExitNumeric;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kkred: curvature, gauge and lifting checks for split Lie algebra bundles"};
  app.require_subcommand(1);

  std::string input, out_path, format = "json";
  std::optional<double> tol, fd_step;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int frame_dim = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the report here instead of stdout");
    sub->add_option("--tol", tol, "Validation tolerance");
    sub->add_option("--fd-step", fd_step, "Finite-difference step; switches derivatives to finite differences");
    sub->add_option("--trials", trials, "Random trials or group elements");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--jobs", jobs, "Worker threads for point sweeps")->envname("KK_JOBS")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* validate = app.add_subcommand("validate", "Check the algebra hypotheses");
  auto* identities = app.add_subcommand("identities", "Run the exterior-algebra identity suite");
  auto* curvature = app.add_subcommand("curvature", "Curvature and EYM residual sweep");
  auto* lift = app.add_subcommand("lift", "Lift vertical paths into the group");
  auto* gauge = app.add_subcommand("gauge-check", "Check the coframe identity and gauge covariance");
  for (auto* sub : {validate, curvature, lift, gauge}) {
    sub->add_option("--input", input, "Problem JSON file")->required();
    add_common(sub);
  }
  identities->add_option("N", frame_dim, "Frame dimension N (3..8)");
  identities->add_option("--input", input, "Problem JSON with identities.N");
  add_common(identities);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    io::ProblemSpec problem;
    const bool have_input = !input.empty();
    if (have_input) problem = io::load_problem(input);
    auto& o = problem.options;
    if (tol) o.tol = *tol;
    if (fd_step) {
      if (!(*fd_step > 0.0)) throw InvalidInputError("--fd-step must be positive");
      o.fd_step = *fd_step;
      o.mode = basegeo::DerivativeMode::FiniteDifference;
    }
    if (trials) o.trials = *trials;
    if (seed) o.seed = *seed;
    if (have_input && problem.config.contains("options")) {
      auto& c = problem.config["options"];
      c["tol"] = o.tol;
      c["fd_step"] = o.fd_step;
      c["trials"] = o.trials;
      c["seed"] = o.seed;
      c["derivatives"] = o.mode == basegeo::DerivativeMode::Analytic ? "analytic" : "fd";
    }
    o.jobs = jobs;

    if (*validate) {
      report = cmd_validate(problem);
    } else if (*identities) {
      int dim = frame_dim;
      if (dim == 0 && problem.identities_dim) dim = *problem.identities_dim;
      if (dim == 0) throw InvalidInputError("identities needs N (positional or identities.N in --input)");
      report = cmd_identities(dim, o.trials, o.seed);
    } else if (*curvature) {
      report = cmd_curvature(problem);
    } else if (*lift) {
      report = cmd_lift(problem);
    } else {
      report = cmd_gauge_check(problem, trials ? *trials : kGaugeCheckElements);
    }
    report.jobs = jobs;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string text = format == "csv" ? to_csv(report) : report.to_json().dump(2) + "\n";
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path);
      if (!f) throw io::IoError("cannot write output file '" + out_path + "'");
      f << text;
    }
    if (report.exit_code != kExitOk) err << "kkred: " << report.command << ": " << report.body.value("status", "") << "\n";
    return report.exit_code;
  } catch (const std::exception& e) {
    err << "kkred: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace kk::cli
