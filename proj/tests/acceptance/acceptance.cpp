// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "oracles.hpp"
#include "parser_corpus.hpp"

#include "kk/bundle.hpp"
#include "kk/cli.hpp"
#include "kk/error.hpp"
#include "kk/exterior.hpp"
#include "kk/fieldexpr.hpp"
#include "kk/io.hpp"
#include "kk/kkcurv.hpp"
#include "kk/liealg.hpp"

using namespace kk;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

MatrixXd eye(int n) { return MatrixXd::Identity(n, n); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Outcome identity_suite() {
  Outcome o;
  double worst = 0.0;
  for (int N = 3; N <= 8; ++N) {
    auto rep = exterior::check_identities(N, 500, 2024);
    worst = std::max(worst, rep.max_residual());
    if (rep.exhaustive != (N <= 5)) o.pass = false;
    for (const auto& id : rep.identities) {
      if (N > 5 && id.checks < 500) o.pass = false;
    }
  }
  o.pass = o.pass && worst <= 1e-12;
  o.detail = "max residual " + sci(worst) + " over N=3..8";
  return o;
}

double jacobi_oracle(const Tensor3& c, int A, int B, int C, int E) {
  const int N = c.extent(0);
  auto term = [&](int x, int y, int z) {
    double s = 0.0;
    for (int D = 0; D < N; ++D) s += c(D, y, z) * c(E, D, x);
    return s;
  };
  return term(A, B, C) + term(B, C, A) + term(C, A, B);
}

Outcome hypothesis_validation() {
  Outcome o;
  int specs = 0;
  for (int n = 0; n <= 5; ++n) {
    for (auto which : {liealg::Builtin::Su2, liealg::Builtin::U1Su2}) {
      const int r = which == liealg::Builtin::Su2 ? 3 : 4;
      auto spec = liealg::builtin_algebra(which, n, r, eye(n), eye(r));
      if (!liealg::validate_spec(spec, 1e-12).ok()) o.pass = false;
      ++specs;
    }
  }
  // Jacobi violation: every reported tuple must be a genuine violation and
  // the first must be a worst one.
  Tensor3 c({3, 3, 3});
  c(1, 0, 1) = 1;
  c(1, 1, 0) = -1;
  c(0, 1, 2) = 1;
  c(0, 2, 1) = -1;
  auto bad = liealg::validate_spec(liealg::LieAlgebraSpec(0, 3, c, eye(3)), 1e-12);
  const auto& j = bad.check("jacobi");
  double worst = 0.0;
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B)
      for (int C = 0; C < 3; ++C)
        for (int E = 0; E < 3; ++E) worst = std::max(worst, std::abs(jacobi_oracle(c, A, B, C, E)));
  if (j.passed || j.offending.empty()) o.pass = false;
  for (const auto& t : j.offending) {
    if (std::abs(jacobi_oracle(c, t[0], t[1], t[2], t[3])) <= 1e-12) o.pass = false;
  }
  if (!j.offending.empty()) {
    const auto& f = j.offending.front();
    if (std::abs(std::abs(jacobi_oracle(c, f[0], f[1], f[2], f[3])) - worst) > 1e-15) o.pass = false;
  }
  // Antisymmetry mutation at a known slot.
  auto su2 = liealg::builtin_algebra(liealg::Builtin::Su2, 2, 3, eye(2), eye(3));
  Tensor3 m = su2.structure_constants();
  m(4, 2, 3) = 0.5;
  const auto mutated = liealg::validate_spec(liealg::LieAlgebraSpec(2, 3, m, su2.h()), 1e-12);
  const auto& anti = mutated.check("antisymmetry");
  if (anti.passed || anti.offending.empty() || anti.offending.front()[0] != 4) o.pass = false;
  std::string where = "-";
  if (!j.offending.empty()) {
    const auto& f = j.offending.front();
    where = "(" + std::to_string(f[0] + 1) + "," + std::to_string(f[1] + 1) + "," + std::to_string(f[2] + 1) + "," +
            std::to_string(f[3] + 1) + ")";
  }
  o.detail = std::to_string(specs) + " builtin specs valid, jacobi violation flagged at " + where;
  return o;
}

Outcome cosmological_constant() {
  Outcome o;
  // Brute force over the Levi-Civita symbol, independent of the stored constants.
  auto brute = [](double lambda) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int g = 0; g < 3; ++g)
          for (int e = 0; e < 3; ++e) {
            const double kinv = g == e ? 1.0 / lambda : 0.0;
            s += oracle::levi_civita_symbol({a, b, g}, 3) * oracle::levi_civita_symbol({b, a, e}, 3) * kinv;
          }
    return -s / 8.0;
  };
  auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, 3, 3, eye(3), eye(3));
  const double base = liealg::cosmological_constant(spec);
  double err = std::abs(base - brute(1.0));
  if (std::abs(base - 0.75) > 1e-14) o.pass = false;
  for (double lam : {0.5, 2.0, 10.0}) {
    const double v = liealg::cosmological_constant(liealg::builtin_algebra(liealg::Builtin::Su2, 3, 3, eye(3), lam * eye(3)));
    err = std::max(err, std::abs(v - brute(lam)));
    if (std::abs(v - base / lam) > 1e-14) o.pass = false;
  }
  o.pass = o.pass && err <= 1e-14;
  o.detail = "Lambda = " + std::to_string(base) + ", oracle error " + sci(err);
  return o;
}

Outcome levi_civita_contract() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + i % 3;
    auto spec = liealg::builtin_algebra(liealg::Builtin::Abelian, n, 1, eye(n), eye(1));
    auto cf = basegeo::CoframeField::parse(testutil::random_coframe(rng, n), eye(n));
    auto geom = basegeo::compute_geometry(spec, cf, basegeo::GaugeField::zero(1, n), testutil::random_point(rng, n));
    worst = std::max({worst, basegeo::metricity_residual(geom), basegeo::torsion_residual(geom)});
  }
  auto sphere = basegeo::CoframeField::parse({{"1", "0"}, {"0", "sin(x1)"}}, eye(2));
  double rerr = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x{0.15 + 0.14 * i, -3.0 + 0.3 * i};
    rerr = std::max(rerr, std::abs(basegeo::base_curvature(sphere, x).scalar - 2.0));
  }
  o.pass = worst <= 1e-10 && rerr <= 1e-8;
  o.detail = "residual " + sci(worst) + ", sphere |R-2| " + sci(rerr);
  return o;
}

Outcome central_cross_check() {
  Outcome o;
  std::mt19937_64 rng(505);
  double worst_a = 0.0, worst_fd = 0.0;
  for (int i = 0; i < 25; ++i) {
    const int n = 2 + i % 3;
    const bool nonabelian = i % 2 == 0;
    const int r = nonabelian ? 3 : 1;
    auto spec = liealg::builtin_algebra(nonabelian ? liealg::Builtin::Su2 : liealg::Builtin::Abelian, n, r, eye(n),
                                        (1.0 + i % 3) * eye(r));
    auto cf = basegeo::CoframeField::parse(testutil::random_coframe(rng, n), eye(n));
    auto gf = basegeo::GaugeField::parse(testutil::random_gauge(rng, r, n), n);
    auto x = testutil::random_point(rng, n);
    for (auto mode : {basegeo::DerivativeMode::Analytic, basegeo::DerivativeMode::FiniteDifference}) {
      basegeo::GeometryOptions opts;
      opts.mode = mode;
      auto geom = basegeo::compute_geometry(spec, cf, gf, x, opts);
      auto direct = kkcurv::curvature_direct(kkcurv::assemble_omega(geom, spec));
      const double d = kkcurv::cross_check(direct, kkcurv::ricci_closed_form(geom, spec)).max();
      double& worst = mode == basegeo::DerivativeMode::Analytic ? worst_a : worst_fd;
      worst = std::max(worst, d);
    }
  }
  o.pass = worst_a <= 1e-6 && worst_fd <= 1e-3;
  o.detail = "analytic " + sci(worst_a) + ", fd " + sci(worst_fd);
  return o;
}

Outcome eym_sanity() {
  Outcome o;
  auto flat = basegeo::CoframeField::parse({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}, eye(3));
  const std::vector<double> x{0.2, -0.1, 0.3};
  auto ab = liealg::builtin_algebra(liealg::Builtin::Abelian, 3, 2, eye(3), eye(2));
  auto e1 = kkcurv::eym_residuals(basegeo::compute_geometry(ab, flat, basegeo::GaugeField::zero(2, 3), x), ab);
  auto su2 = liealg::builtin_algebra(liealg::Builtin::Su2, 3, 3, eye(3), eye(3));
  auto e2 = kkcurv::eym_residuals(basegeo::compute_geometry(su2, flat, basegeo::GaugeField::zero(3, 3), x), su2);
  const double lambda = liealg::cosmological_constant(su2);
  // Only the fiber curvature is present: R = 2Λ, Ein^a_d = −Λ δ^a_d.
  const double pattern = (e2.einstein_block + lambda * eye(3)).cwiseAbs().maxCoeff();
  o.pass = e1.einstein_norm <= 1e-12 && e1.ym_norm <= 1e-12 && pattern <= 1e-10 && e2.ym_norm <= 1e-12;
  o.detail = "abelian " + sci(std::max(e1.einstein_norm, e1.ym_norm)) + ", su2 |Ein + Lambda*delta| " + sci(pattern);
  return o;
}

Outcome gauge_covariance() {
  Outcome o;
  std::mt19937_64 rng(707);
  double worst = 0.0, deextra = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int n = 2 + i % 3;
    auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, n, 3, eye(n), (1.0 + i) * eye(3));
    auto rep = bundle::builtin_rep(bundle::BuiltinRep::Su2AsSo3, spec);
    auto cf = basegeo::CoframeField::parse(testutil::random_coframe(rng, n), eye(n));
    auto gf = basegeo::GaugeField::parse(testutil::random_gauge(rng, 3, n), n);
    auto geom = basegeo::compute_geometry(spec, cf, gf, testutil::random_point(rng, n));
    for (int k = 0; k < 4; ++k) {
      MatrixXd g = bundle::random_element(rep, rng);
      worst = std::max(worst, bundle::verify_gauge_covariance(geom, rep, spec, g));
      deextra = std::max(deextra, bundle::verify_deextra(geom, rep, spec, g));
    }
  }
  auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, 3, 3, eye(3), 2.0 * eye(3));
  auto rep = bundle::builtin_rep(bundle::BuiltinRep::Su2AsSo3, spec);
  double adj = 0.0;
  for (int i = 0; i < 100; ++i) {
    MatrixXd S = bundle::adjoint_of(rep, spec, bundle::random_element(rep, rng));
    adj = std::max(adj, (S.transpose() * spec.h() * S - spec.h()).cwiseAbs().maxCoeff());
  }
  o.pass = worst <= 1e-5 && adj <= 1e-8 && deextra <= 1e-6;
  o.detail = "|Omega - S Phi S^-1| " + sci(worst) + ", |S^T h S - h| " + sci(adj);
  return o;
}

Outcome path_lifting() {
  Outcome o;
  auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, 1, 3, eye(1), eye(3));
  auto rep = bundle::builtin_rep(bundle::BuiltinRep::Su2AsSo3, spec);
  std::mt19937_64 rng(808);
  std::normal_distribution<double> nd;
  double oracle_err = 0.0, ret = 0.0, min_order = 1e9;
  for (int i = 0; i < 5; ++i) {
    VectorXd xi(3);
    for (int k = 0; k < 3; ++k) xi(k) = 1.5 * nd(rng);
    MatrixXd g0 = bundle::random_element(rep, rng);
    auto lift = bundle::lift_path(rep, bundle::PathSpec::constant(xi, g0), 1000);
    MatrixXd s = MatrixXd::Zero(3, 3);
    for (int k = 0; k < 3; ++k) s += xi(k) * rep.generators[k];
    oracle_err = std::max(oracle_err, (lift.elements.back() - g0 * oracle::expm(s)).cwiseAbs().maxCoeff());
  }
  const std::vector<std::vector<std::string>> paths{{"cos(3*t)", "t^2 - 1", "sin(2*t) + 0.5"},
                                                    {"1 + t", "exp(-t)", "0.3*sin(5*t)"}};
  for (const auto& p : paths) {
    auto path = bundle::PathSpec::analytic(p, eye(3));
    min_order = std::min(min_order, bundle::richardson_order(rep, path, 20));
    auto forward = bundle::lift_path(rep, path, 1000);
    auto back = bundle::lift_path(rep, bundle::PathSpec::reversed(path, forward.elements.back()), 1000);
    ret = std::max(ret, (back.elements.back() - eye(3)).cwiseAbs().maxCoeff());
  }
  o.pass = oracle_err <= 1e-8 && min_order >= 3.8 && ret <= 1e-6;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", min_order);
  o.detail = "exp error " + sci(oracle_err) + ", order " + buf + ", return " + sci(ret);
  return o;
}

Outcome parser_corpus() {
  Outcome o;
  const fieldexpr::ParseOptions opts{3, {}, true};
  const fieldexpr::ParamMap params(corpus::kCorpusParams.begin(), corpus::kCorpusParams.end());
  int mismatches = 0;
  double dworst = 0.0;
  for (const auto& c : corpus::kCases) {
    try {
      auto e = fieldexpr::parse(c.text, opts);
      if (c.offset >= 0 || fieldexpr::to_sexpr(e) != c.sexpr) {
        ++mismatches;
        continue;
      }
      auto bound = fieldexpr::bind(e, params);
      for (int i = 0; i < 3; ++i) {
        auto at = [&](double d) {
          auto p = corpus::kCorpusPoint;
          p[i] += d;
          return fieldexpr::evaluate(bound, p);
        };
        const double h = 1e-4;
        const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        const double exact = fieldexpr::evaluate(fieldexpr::diff(bound, i), corpus::kCorpusPoint);
        dworst = std::max(dworst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
      }
    } catch (const ParseError& err) {
      if (static_cast<int>(err.offset()) != c.offset) ++mismatches;
    }
  }
  o.pass = corpus::kCases.size() == 100 && mismatches == 0 && dworst <= 1e-6;
  o.detail = std::to_string(corpus::kCases.size()) + " cases, " + std::to_string(mismatches) +
             " mismatches, derivative error " + sci(dworst);
  return o;
}

Outcome determinism() {
  Outcome o;
  auto run = [](const std::string& jobs) {
    std::vector<std::string> args{"kkred", "curvature", "--input", KK_DATA_DIR "/su2_curved.json", "--jobs", jobs};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::make_pair(code, out.str());
  };
  auto [c1, r1] = run("1");
  auto [c8, r8] = run("8");
  const bool same = c1 == 0 && c8 == 0 && io::normalize(io::json::parse(r1)).dump() == io::normalize(io::json::parse(r8)).dump();
  o.pass = same;
  o.detail = same ? "normalized reports identical" : "reports differ";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "identity suite", 10.0, identity_suite},
      {2, "hypothesis validation", 1.0, hypothesis_validation},
      {3, "cosmological constant", 1.0, cosmological_constant},
      {4, "Levi-Civita contract", 30.0, levi_civita_contract},
      {5, "central cross-check", 120.0, central_cross_check},
      {6, "EYM residual sanity", 5.0, eym_sanity},
      {7, "gauge covariance", 30.0, gauge_covariance},
      {8, "path lifting", 10.0, path_lifting},
      {9, "parser corpus", 5.0, parser_corpus},
      {10, "determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = out.pass && secs < c.budget_s;
    failures += !pass;
    std::printf("%s [%d] %s: %s (%.3f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str(), secs);
  }
  return failures ? 1 : 0;
}
