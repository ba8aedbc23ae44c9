#include "kk/kkcurv.hpp"

#include <algorithm>
#include <cmath>

#include "kk/error.hpp"

namespace kk::kkcurv {

namespace {

using basegeo::GeometryAtPoint;

// F_δ^{ac} = k_δδ' F^δ'_{a'c'} b^{a'a} b^{c'c}, and likewise for e_d(F).
struct RaisedF {
  Tensor3 up;   // (δ, a, c)
  Tensor4 dup;  // (δ, a, c, d)
};

RaisedF raise_f(const GeometryAtPoint& g) {
  const int n = g.n, r = g.r;
  RaisedF out{Tensor3({r, n, n}, 0.0), Tensor4({r, n, n, n}, 0.0)};
  for (int de = 0; de < r; ++de) {
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) {
        for (int dp = 0; dp < r; ++dp) {
          if (g.k(de, dp) == 0.0) continue;
          for (int ap = 0; ap < n; ++ap) {
            if (g.b_inv(ap, a) == 0.0) continue;
            for (int cp = 0; cp < n; ++cp) {
              const double w = g.k(de, dp) * g.b_inv(ap, a) * g.b_inv(cp, c);
              if (w == 0.0) continue;
              out.up(de, a, c) += w * g.F(dp, ap, cp);
              for (int d = 0; d < n; ++d) out.dup(de, a, c, d) += w * g.dF(dp, ap, cp, d);
            }
          }
        }
      }
    }
  }
  return out;
}

double cst(const liealg::LieAlgebraSpec& spec, int al, int be, int ga) {
  const int off = spec.n();
  return spec.c(off + al, off + be, off + ga);
}

// Σ c^α_βγ c^β_δε k^γε
double cck(const liealg::LieAlgebraSpec& spec, const Eigen::MatrixXd& k_inv, int al, int de) {
  const int r = spec.r();
  double s = 0.0;
  for (int be = 0; be < r; ++be) {
    for (int ga = 0; ga < r; ++ga) {
      const double c1 = cst(spec, al, be, ga);
      if (c1 == 0.0) continue;
      for (int ep = 0; ep < r; ++ep) s += c1 * cst(spec, be, de, ep) * k_inv(ga, ep);
    }
  }
  return s;
}

double frobenius(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.norm(); }

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

KKConnection assemble_omega(const GeometryAtPoint& g, const liealg::LieAlgebraSpec& spec) {
  const int n = g.n, r = g.r, N = n + r;
  if (spec.n() != n || spec.r() != r) throw DimensionError("geometry and algebra block sizes differ");
  KKConnection conn;
  conn.n = n;
  conn.r = r;
  conn.omega = Tensor3({N, N, N}, 0.0);
  conn.domega = Tensor4({N, N, N, n}, 0.0);
  conn.structure = Tensor3({N, N, N}, 0.0);
  conn.h = spec.h();
  conn.h_inv = spec.h_inv();

  auto& w = conn.omega;
  auto& dw = conn.domega;

  // ω^a_c = γ^a_c − ½ F_γ^a_c e^γ, F_γ^a_c = k_γγ' F^γ'_{a'c} b^{a'a}
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      for (int d = 0; d < n; ++d) {
        w(a, c, d) = g.gamma(a, c, d);
        for (int e = 0; e < n; ++e) dw(a, c, d, e) = g.dgamma(a, c, d, e);
      }
      for (int ga = 0; ga < r; ++ga) {
        double v = 0.0;
        std::vector<double> dv(n, 0.0);
        for (int gp = 0; gp < r; ++gp) {
          for (int ap = 0; ap < n; ++ap) {
            const double s = g.k(ga, gp) * g.b_inv(ap, a);
            if (s == 0.0) continue;
            v += s * g.F(gp, ap, c);
            for (int e = 0; e < n; ++e) dv[e] += s * g.dF(gp, ap, c, e);
          }
        }
        w(a, c, n + ga) = -0.5 * v;
        for (int e = 0; e < n; ++e) dw(a, c, n + ga, e) = -0.5 * dv[e];
      }
    }
  }
  // ω^a_γ = ½ F_{γb}^a e^b, F_{γb}^a = k_γγ' F^γ'_{bc'} b^{c'a}
  for (int a = 0; a < n; ++a) {
    for (int ga = 0; ga < r; ++ga) {
      for (int b = 0; b < n; ++b) {
        double v = 0.0;
        std::vector<double> dv(n, 0.0);
        for (int gp = 0; gp < r; ++gp) {
          for (int cp = 0; cp < n; ++cp) {
            const double s = g.k(ga, gp) * g.b_inv(cp, a);
            if (s == 0.0) continue;
            v += s * g.F(gp, b, cp);
            for (int e = 0; e < n; ++e) dv[e] += s * g.dF(gp, b, cp, e);
          }
        }
        w(a, n + ga, b) = 0.5 * v;
        for (int e = 0; e < n; ++e) dw(a, n + ga, b, e) = 0.5 * dv[e];
      }
    }
  }
  // ω^α_c = −½ F^α_bc e^b
  for (int al = 0; al < r; ++al) {
    for (int c = 0; c < n; ++c) {
      for (int b = 0; b < n; ++b) {
        w(n + al, c, b) = -0.5 * g.F(al, b, c);
        for (int e = 0; e < n; ++e) dw(n + al, c, b, e) = -0.5 * g.dF(al, b, c, e);
      }
    }
  }
  // ω^α_γ = −½ c^α_βγ (e^β − 2A^β)
  for (int al = 0; al < r; ++al) {
    for (int ga = 0; ga < r; ++ga) {
      for (int be = 0; be < r; ++be) {
        const double c = cst(spec, al, be, ga);
        if (c == 0.0) continue;
        w(n + al, n + ga, n + be) = -0.5 * c;
        for (int b = 0; b < n; ++b) {
          w(n + al, n + ga, b) += c * g.a_frame(be, b);
          for (int e = 0; e < n; ++e) dw(n + al, n + ga, b, e) += c * g.da_frame(be, b, e);
        }
      }
    }
  }

  // Structure functions: de^a from the anholonomy, de^α = ½[e∧e] − [A∧e] + F.
  auto& D = conn.structure;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) D(a, b, c) = g.anholonomy(a, b, c);
    }
  }
  for (int al = 0; al < r; ++al) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) D(n + al, b, c) = g.F(al, b, c);
    }
    for (int be = 0; be < r; ++be) {
      for (int ga = 0; ga < r; ++ga) {
        const double c = cst(spec, al, be, ga);
        if (c == 0.0) continue;
        D(n + al, n + be, n + ga) = c;
        for (int b = 0; b < n; ++b) {
          D(n + al, b, n + ga) -= c * g.a_frame(be, b);
          D(n + al, n + ga, b) += c * g.a_frame(be, b);
        }
      }
    }
  }
  return conn;
}

double metricity_residual(const KKConnection& conn) {
  const int N = conn.dim();
  double m = 0.0;
  for (int C = 0; C < N; ++C) {
    Eigen::MatrixXd w(N, N);
    for (int A = 0; A < N; ++A) {
      for (int B = 0; B < N; ++B) w(A, B) = conn.omega(A, B, C);
    }
    const Eigen::MatrixXd up = w * conn.h_inv;
    m = std::max(m, (up + up.transpose()).cwiseAbs().maxCoeff());
  }
  return m;
}

double torsion_residual(const KKConnection& conn) {
  const int N = conn.dim();
  double m = 0.0;
  for (int A = 0; A < N; ++A) {
    for (int C = 0; C < N; ++C) {
      for (int D = 0; D < N; ++D) {
        m = std::max(m, std::abs(conn.structure(A, C, D) + conn.omega(A, D, C) - conn.omega(A, C, D)));
      }
    }
  }
  return m;
}

KKCurvature curvature_direct(const KKConnection& conn) {
  const int N = conn.dim(), n = conn.n;
  const auto& w = conn.omega;
  KKCurvature out;
  out.riemann = Tensor4({N, N, N, N}, 0.0);
  for (int A = 0; A < N; ++A) {
    for (int B = 0; B < N; ++B) {
      for (int C = 0; C < N; ++C) {
        for (int D = C + 1; D < N; ++D) {
          double s = 0.0;
          if (C < n) s += conn.domega(A, B, D, C);
          if (D < n) s -= conn.domega(A, B, C, D);
          for (int E = 0; E < N; ++E) {
            s += w(A, B, E) * conn.structure(E, C, D);
            s += w(A, E, C) * w(E, B, D) - w(A, E, D) * w(E, B, C);
          }
          out.riemann(A, B, C, D) = s;
          out.riemann(A, B, D, C) = -s;
        }
      }
    }
  }
  out.ricci = Eigen::MatrixXd::Zero(N, N);
  for (int A = 0; A < N; ++A) {
    for (int C = 0; C < N; ++C) {
      double s = 0.0;
      for (int Bp = 0; Bp < N; ++Bp) {
        for (int B = 0; B < N; ++B) {
          if (conn.h_inv(Bp, B) != 0.0) s += out.riemann(A, Bp, C, B) * conn.h_inv(Bp, B);
        }
      }
      out.ricci(A, C) = s;
    }
  }
  out.scalar = out.ricci.trace();
  out.einstein = out.ricci - 0.5 * out.scalar * Eigen::MatrixXd::Identity(N, N);
  return out;
}

double curvature_antisymmetry_residual(const KKCurvature& curv, const KKConnection& conn) {
  const int N = conn.dim();
  double m = 0.0;
  for (int C = 0; C < N; ++C) {
    for (int D = 0; D < N; ++D) {
      Eigen::MatrixXd o(N, N);
      for (int A = 0; A < N; ++A) {
        for (int B = 0; B < N; ++B) o(A, B) = curv.riemann(A, B, C, D);
      }
      const Eigen::MatrixXd up = o * conn.h_inv;
      m = std::max(m, (up + up.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return m;
}

ClosedFormRicci ricci_closed_form(const GeometryAtPoint& g, const liealg::LieAlgebraSpec& spec) {
  const int n = g.n, r = g.r;
  if (spec.n() != n || spec.r() != r) throw DimensionError("geometry and algebra block sizes differ");
  const auto base = basegeo::base_curvature(g);
  const RaisedF f = raise_f(g);

  // F_β^{ac} F^β_{dc}
  Eigen::MatrixXd ff = Eigen::MatrixXd::Zero(n, n);
  double ffs = 0.0;  // F_α^{bc} F^α_bc
  for (int be = 0; be < r; ++be) {
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) {
        ffs += f.up(be, a, c) * g.F(be, a, c);
        for (int d = 0; d < n; ++d) ff(a, d) += f.up(be, a, c) * g.F(be, d, c);
      }
    }
  }
  double cck_trace = 0.0;  // c^α_βγ c^β_αδ k^γδ
  for (int al = 0; al < r; ++al) cck_trace += cck(spec, g.k_inv, al, al);

  ClosedFormRicci out;
  out.ric_ad = base.ricci - 0.5 * ff;

  out.ric_a_delta = Eigen::MatrixXd::Zero(n, r);
  for (int a = 0; a < n; ++a) {
    for (int de = 0; de < r; ++de) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += f.dup(de, a, c, c);
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          s += g.gamma(a, b, c) * f.up(de, b, c);
          s += g.gamma(c, b, c) * f.up(de, a, b);
        }
      }
      for (int ga = 0; ga < r; ++ga) {
        for (int al = 0; al < r; ++al) {
          const double c0 = cst(spec, ga, al, de);
          if (c0 == 0.0) continue;
          for (int c = 0; c < n; ++c) s -= c0 * g.a_frame(al, c) * f.up(ga, a, c);
        }
      }
      out.ric_a_delta(a, de) = 0.5 * s;
    }
  }

  out.ric_alpha_delta = Eigen::MatrixXd::Zero(r, r);
  for (int al = 0; al < r; ++al) {
    for (int de = 0; de < r; ++de) {
      double s = 0.0;
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) s += f.up(de, b, c) * g.F(al, b, c);
      }
      out.ric_alpha_delta(al, de) = 0.25 * s - 0.25 * cck(spec, g.k_inv, al, de);
    }
  }

  out.scalar = base.scalar - 0.25 * ffs - 0.25 * cck_trace;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  out.ein_ad = base.einstein - 0.5 * (ff - 0.25 * ffs * id) + 0.125 * cck_trace * id;
  out.ein_a_delta = out.ric_a_delta;
  return out;
}

double CrossCheck::max() const { return std::max({ric_ad, ric_a_delta, ric_alpha_delta, scalar, ein_ad}); }

CrossCheck cross_check(const KKCurvature& direct, const ClosedFormRicci& closed) {
  const int n = static_cast<int>(closed.ric_ad.rows());
  const int r = static_cast<int>(closed.ric_alpha_delta.rows());
  CrossCheck cc;
  cc.ric_ad = max_abs_diff(direct.ricci.topLeftCorner(n, n), closed.ric_ad);
  cc.ric_a_delta = max_abs_diff(direct.ricci.topRightCorner(n, r), closed.ric_a_delta);
  cc.ric_alpha_delta = max_abs_diff(direct.ricci.bottomRightCorner(r, r), closed.ric_alpha_delta);
  cc.scalar = std::abs(direct.scalar - closed.scalar);
  cc.ein_ad = max_abs_diff(direct.einstein.topLeftCorner(n, n), closed.ein_ad);
  return cc;
}

EYMResidual eym_residuals(const GeometryAtPoint& g, const liealg::LieAlgebraSpec& spec) {
  const ClosedFormRicci cf = ricci_closed_form(g, spec);
  EYMResidual out;
  out.einstein_block = cf.ein_ad;
  out.ym_block = 2.0 * cf.ric_a_delta.transpose();
  out.einstein_norm = frobenius(out.einstein_block);
  out.ym_norm = frobenius(out.ym_block);
  return out;
}

}  // namespace kk::kkcurv
