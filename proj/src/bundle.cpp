#include "kk/bundle.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "kk/error.hpp"
#include "kk/kkcurv.hpp"

namespace kk::bundle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double cst(const liealg::LieAlgebraSpec& spec, int al, int be, int ga) {
  const int off = spec.n();
  return spec.c(off + al, off + be, off + ga);
}

void check_rep(const MatrixRep& rep, const liealg::LieAlgebraSpec& spec) {
  if (rep.rank() != spec.r()) {
    throw DimensionError("representation has " + std::to_string(rep.rank()) + " generators, algebra has r = " +
                         std::to_string(spec.r()));
  }
}

MatrixXd so3_generator(int alpha) {
  // (T_α)_jk = −ε_αjk
  MatrixXd t = MatrixXd::Zero(3, 3);
  const int j = (alpha + 1) % 3, k = (alpha + 2) % 3;
  t(j, k) = -1.0;
  t(k, j) = 1.0;
  return t;
}

// f'(0) for s ↦ f(g·exp(s T)), 4th-order central differences.
template <class F>
MatrixXd fiber_derivative(const MatrixXd& g, const MatrixXd& t, F&& f) {
  const double h = kFiberStep;
  auto at = [&](double s) { return f(MatrixXd(g * (s * t).exp())); };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

MatrixXd polar(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// e^C(X) for the coordinate basis X = (∂_0..∂_{n-1}, V_0..V_{r-1}) of U × G.
MatrixXd coframe_on_basis(const basegeo::GeometryAtPoint& geom, const MatrixXd& s_g) {
  const int n = geom.n, r = geom.r, N = n + r;
  MatrixXd m = MatrixXd::Zero(N, N);
  m.topLeftCorner(n, n) = geom.e;
  m.bottomLeftCorner(r, n) = geom.a_coord;
  m.bottomRightCorner(r, r) = s_g;
  return m;
}

}  // namespace

BuiltinRep parse_rep_name(const std::string& name) {
  if (name == "su2_as_so3") return BuiltinRep::Su2AsSo3;
  if (name == "u1_as_so2") return BuiltinRep::U1AsSo2;
  if (name == "product") return BuiltinRep::Product;
  throw InvalidInputError("unknown representation '" + name + "'");
}

MatrixRep builtin_rep(BuiltinRep which, const liealg::LieAlgebraSpec& spec) {
  MatrixRep rep;
  switch (which) {
    case BuiltinRep::Su2AsSo3:
      rep.name = "su2_as_so3";
      for (int a = 0; a < 3; ++a) rep.generators.push_back(so3_generator(a));
      break;
    case BuiltinRep::U1AsSo2: {
      rep.name = "u1_as_so2";
      MatrixXd t(2, 2);
      t << 0, -1, 1, 0;
      rep.generators.push_back(t);
      break;
    }
    case BuiltinRep::Product: {
      rep.name = "product";
      MatrixXd t = MatrixXd::Zero(5, 5);
      t(0, 1) = -1;
      t(1, 0) = 1;
      rep.generators.push_back(t);
      for (int a = 0; a < 3; ++a) {
        MatrixXd s = MatrixXd::Zero(5, 5);
        s.bottomRightCorner(3, 3) = so3_generator(a);
        rep.generators.push_back(s);
      }
      break;
    }
  }
  if (rep.rank() != spec.r()) {
    throw InvalidInputError("representation " + rep.name + " has rank " + std::to_string(rep.rank()) +
                            " but the algebra has r = " + std::to_string(spec.r()));
  }
  const double res = closure_residual(rep, spec);
  if (res > 1e-10) {
    throw InvalidInputError("representation " + rep.name + " does not close on the algebra (residual " +
                            std::to_string(res) + ")");
  }
  return rep;
}

double closure_residual(const MatrixRep& rep, const liealg::LieAlgebraSpec& spec) {
  check_rep(rep, spec);
  const int r = rep.rank();
  double m = 0.0;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      MatrixXd lhs = rep.generators[a] * rep.generators[b] - rep.generators[b] * rep.generators[a];
      for (int c = 0; c < r; ++c) lhs -= cst(spec, c, a, b) * rep.generators[c];
      m = std::max(m, lhs.cwiseAbs().maxCoeff());
    }
  }
  return m;
}

MatrixXd generator_sum(const MatrixRep& rep, const VectorXd& xi) {
  if (xi.size() != rep.rank()) throw DimensionError("coefficient vector length differs from the rep rank");
  MatrixXd m = MatrixXd::Zero(rep.dim(), rep.dim());
  for (int a = 0; a < rep.rank(); ++a) m += xi(a) * rep.generators[a];
  return m;
}

MatrixXd exp_generator(const MatrixRep& rep, const VectorXd& xi) { return generator_sum(rep, xi).exp(); }

double manifold_drift(const MatrixXd& g) {
  return (g.transpose() * g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

void require_on_manifold(const MatrixXd& g, double tol) {
  if (g.rows() != g.cols()) throw DimensionError("group element must be square");
  const double d = manifold_drift(g);
  if (!(d <= tol)) throw OffManifoldError("group element is off the group manifold (|gᵀg − I| = " + std::to_string(d) + ")");
}

MatrixXd random_element(const MatrixRep& rep, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  VectorXd xi(rep.rank());
  for (int a = 0; a < rep.rank(); ++a) xi(a) = dist(rng);
  return exp_generator(rep, xi);
}

MatrixXd adjoint_g_block(const MatrixRep& rep, const MatrixXd& g) {
  require_on_manifold(g);
  if (g.rows() != rep.dim()) throw DimensionError("group element size differs from the rep dimension");
  const int r = rep.rank();
  const MatrixXd ginv = g.transpose();
  MatrixXd gram(r, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) gram(a, b) = (rep.generators[a].transpose() * rep.generators[b]).trace();
  }
  const auto solver = gram.ldlt();
  MatrixXd s(r, r);
  for (int b = 0; b < r; ++b) {
    const MatrixXd x = g * rep.generators[b] * ginv;
    VectorXd rhs(r);
    for (int a = 0; a < r; ++a) rhs(a) = (rep.generators[a].transpose() * x).trace();
    s.col(b) = solver.solve(rhs);
  }
  return s;
}

MatrixXd adjoint_of(const MatrixRep& rep, const liealg::LieAlgebraSpec& spec, const MatrixXd& g) {
  check_rep(rep, spec);
  const int n = spec.n(), r = spec.r();
  MatrixXd s = MatrixXd::Identity(n + r, n + r);
  s.bottomRightCorner(r, r) = adjoint_g_block(rep, g);
  return s;
}

double verify_deextra(const basegeo::GeometryAtPoint& geom, const MatrixRep& rep, const liealg::LieAlgebraSpec& spec,
                      const MatrixXd& g) {
  check_rep(rep, spec);
  if (spec.n() != geom.n || spec.r() != geom.r) throw DimensionError("geometry and algebra block sizes differ");
  const int n = geom.n, r = geom.r, N = n + r;
  const MatrixXd s = adjoint_g_block(rep, g);
  const MatrixXd m = coframe_on_basis(geom, s);
  const MatrixXd minv = m.inverse();
  auto S = [&](const MatrixXd& h) { return adjoint_g_block(rep, h); };
  std::vector<MatrixXd> vs;  // V_β S
  for (int be = 0; be < r; ++be) vs.push_back(fiber_derivative(g, rep.generators[be], S));

  double worst = 0.0;
  for (int al = 0; al < r; ++al) {
    MatrixXd res = MatrixXd::Zero(N, N);  // on basis pairs (X, Y)
    for (int x = 0; x < N; ++x) {
      for (int y = 0; y < N; ++y) {
        double de = 0.0;
        if (x < n && y < n) {
          de = geom.da_coord(al, y, x) - geom.da_coord(al, x, y);
        } else if (x >= n && y >= n) {
          const int be = x - n, ga = y - n;
          de = vs[be](al, ga) - vs[ga](al, be);
          for (int dl = 0; dl < r; ++dl) de -= cst(spec, dl, be, ga) * s(al, dl);
        }
        double ee = 0.0, ae = 0.0;
        for (int be = 0; be < r; ++be) {
          for (int ga = 0; ga < r; ++ga) {
            const double c = cst(spec, al, be, ga);
            if (c == 0.0) continue;
            ee += c * m(n + be, x) * m(n + ga, y);
            const double ax = x < n ? geom.a_coord(be, x) : 0.0;
            const double ay = y < n ? geom.a_coord(be, y) : 0.0;
            ae += c * (ax * m(n + ga, y) - ay * m(n + ga, x));
          }
        }
        double f = 0.0;
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < n; ++c) f += geom.F(al, b, c) * m(b, x) * m(c, y);
        }
        res(x, y) = de - ee + ae - f;
      }
    }
    const MatrixXd frame = minv.transpose() * res * minv;
    worst = std::max(worst, frame.cwiseAbs().maxCoeff());
  }
  return worst;
}

double verify_gauge_covariance(const basegeo::GeometryAtPoint& geom, const MatrixRep& rep,
                               const liealg::LieAlgebraSpec& spec, const MatrixXd& g,
                               const GaugeCheckOptions& options) {
  check_rep(rep, spec);
  const int n = geom.n, r = geom.r, N = n + r;
  const auto conn = kkcurv::assemble_omega(geom, spec);
  const auto curv = kkcurv::curvature_direct(conn);

  auto omega_on = [&](const MatrixXd& m, int y) {
    MatrixXd w = MatrixXd::Zero(N, N);
    for (int C = 0; C < N; ++C) {
      const double ey = m(C, y);
      if (ey == 0.0) continue;
      for (int A = 0; A < N; ++A) {
        for (int B = 0; B < N; ++B) w(A, B) += conn.omega(A, B, C) * ey;
      }
    }
    return w;
  };
  auto full_s = [&](const MatrixXd& h) { return adjoint_of(rep, spec, h); };
  // φ(Y) at (x, h).
  auto phi = [&](const MatrixXd& h, int y) -> MatrixXd {
    const MatrixXd sf = full_s(h);
    const MatrixXd sinv = sf.inverse();
    const MatrixXd m = coframe_on_basis(geom, sf.bottomRightCorner(r, r));
    MatrixXd out = sinv * omega_on(m, y) * sf;
    if (y >= n) out += sinv * fiber_derivative(h, rep.generators[y - n], full_s);
    return out;
  };
  // ∂_μ of ω(Y): coefficients and coframe entries vary with x, S does not.
  auto d_omega_x = [&](int mu, int y) -> MatrixXd {
    const MatrixXd s = adjoint_g_block(rep, g);
    const MatrixXd m = coframe_on_basis(geom, s);
    MatrixXd dm = MatrixXd::Zero(N, N);
    if (y < n) {
      for (int a = 0; a < n; ++a) dm(a, y) = geom.de(a, y, mu);
      for (int al = 0; al < r; ++al) dm(n + al, y) = geom.da_coord(al, y, mu);
    }
    MatrixXd w = MatrixXd::Zero(N, N);
    for (int C = 0; C < N; ++C) {
      for (int A = 0; A < N; ++A) {
        for (int B = 0; B < N; ++B) {
          double dc = 0.0;
          for (int d = 0; d < n; ++d) dc += geom.e(d, mu) * conn.domega(A, B, C, d);
          w(A, B) += dc * m(C, y) + conn.omega(A, B, C) * dm(C, y);
        }
      }
    }
    return w;
  };

  const MatrixXd sf = full_s(g);
  const MatrixXd sinv = sf.inverse();
  const MatrixXd m = coframe_on_basis(geom, sf.bottomRightCorner(r, r));
  std::vector<MatrixXd> phis;
  for (int y = 0; y < N; ++y) phis.push_back(phi(g, y));
  auto x_derivative = [&](int x, int y) -> MatrixXd {
    if (x < n) return sinv * d_omega_x(x, y) * sf;
    return fiber_derivative(g, rep.generators[x - n], [&](const MatrixXd& h) { return phi(h, y); });
  };

  const int limit = options.horizontal_only ? n : N;
  double worst = 0.0;
  for (int x = 0; x < limit; ++x) {
    for (int y = x + 1; y < limit; ++y) {
      MatrixXd big_phi = x_derivative(x, y) - x_derivative(y, x) + phis[x] * phis[y] - phis[y] * phis[x];
      if (x >= n && y >= n) {
        for (int dl = 0; dl < r; ++dl) {
          const double c = cst(spec, dl, x - n, y - n);
          if (c != 0.0) big_phi -= c * phis[n + dl];
        }
      }
      MatrixXd omega_xy = MatrixXd::Zero(N, N);
      for (int C = 0; C < N; ++C) {
        for (int D = 0; D < N; ++D) {
          const double w = m(C, x) * m(D, y);
          if (w == 0.0) continue;
          for (int A = 0; A < N; ++A) {
            for (int B = 0; B < N; ++B) omega_xy(A, B) += curv.riemann(A, B, C, D) * w;
          }
        }
      }
      worst = std::max(worst, (omega_xy - sf * big_phi * sinv).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

PathSpec PathSpec::constant(const VectorXd& xi, MatrixXd g0) {
  return {[xi](double, bool) { return xi; }, std::move(g0)};
}

PathSpec PathSpec::analytic(const std::vector<std::string>& exprs, MatrixXd g0, const fieldexpr::ParamMap& params) {
  fieldexpr::ParseOptions opts;
  opts.num_vars = 1;
  opts.aliases = {"t"};
  std::vector<fieldexpr::Expr> parsed;
  for (const auto& e : exprs) parsed.push_back(fieldexpr::bind(fieldexpr::parse(e, opts), params));
  return {[parsed](double t, bool) {
            VectorXd v(parsed.size());
            const double pt[1] = {t};
            for (std::size_t i = 0; i < parsed.size(); ++i) v(i) = fieldexpr::evaluate(parsed[i], pt);
            return v;
          },
          std::move(g0)};
}

PathSpec PathSpec::sampled(std::vector<std::pair<double, VectorXd>> samples, Interpolation interp, MatrixXd g0) {
  if (samples.empty()) throw InvalidInputError("sampled path needs at least one sample");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first)) throw InvalidInputError("sample times must increase strictly");
    if (samples[i].second.size() != samples[0].second.size()) throw DimensionError("sample vectors differ in length");
  }
  return {[samples = std::move(samples), interp](double t, bool left) -> VectorXd {
            // First sample with time > t (or ≥ t for the left limit).
            auto it = left ? std::lower_bound(samples.begin(), samples.end(), t,
                                              [](const auto& s, double v) { return s.first < v; })
                           : std::upper_bound(samples.begin(), samples.end(), t,
                                              [](double v, const auto& s) { return v < s.first; });
            if (it == samples.begin()) return samples.front().second;
            if (it == samples.end()) return samples.back().second;
            const auto& lo = *(it - 1);
            if (interp == Interpolation::Hold) return lo.second;
            const double w = (t - lo.first) / (it->first - lo.first);
            return ((1.0 - w) * lo.second + w * it->second).eval();
          },
          std::move(g0)};
}

PathSpec PathSpec::reversed(const PathSpec& path, MatrixXd start) {
  return {[v = path.velocity](double t, bool left) -> VectorXd { return -v(1.0 - t, !left); }, std::move(start)};
}

LiftResult lift_path(const MatrixRep& rep, const PathSpec& path, int steps) {
  if (steps < 1) throw InvalidInputError("lift needs at least one step");
  if (path.g0.rows() != rep.dim() || path.g0.cols() != rep.dim()) {
    throw DimensionError("initial element size differs from the rep dimension");
  }
  require_on_manifold(path.g0);
  const double h = 1.0 / steps;
  LiftResult out;
  out.elements.reserve(steps + 1);
  out.elements.push_back(path.g0);
  MatrixXd g = path.g0;
  auto rhs = [&](double t, bool left, const MatrixXd& x) { return MatrixXd(x * generator_sum(rep, path.velocity(t, left))); };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const MatrixXd k1 = rhs(t, false, g);
    const MatrixXd k2 = rhs(t + 0.5 * h, false, g + 0.5 * h * k1);
    const MatrixXd k3 = rhs(t + 0.5 * h, false, g + 0.5 * h * k2);
    const MatrixXd k4 = rhs(t + h, true, g + h * k3);
    g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.max_drift_before_projection = std::max(out.max_drift_before_projection, manifold_drift(g));
    g = polar(g);
    const double drift = manifold_drift(g);
    if (!(drift <= 1e-6)) {
      throw IntegratorError("lift drifted off the group manifold at step " + std::to_string(i + 1));
    }
    out.max_drift = std::max(out.max_drift, drift);
    out.elements.push_back(g);
  }
  return out;
}

double richardson_order(const MatrixRep& rep, const PathSpec& path, int steps) {
  const MatrixXd a = lift_path(rep, path, steps).elements.back();
  const MatrixXd b = lift_path(rep, path, 2 * steps).elements.back();
  const MatrixXd c = lift_path(rep, path, 4 * steps).elements.back();
  const double e1 = (a - b).norm(), e2 = (b - c).norm();
  if (e2 == 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(e1 / e2);
}

}  // namespace kk::bundle
