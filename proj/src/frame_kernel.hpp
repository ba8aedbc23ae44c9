#pragma once

// Pointwise frame quantities as functions of the coframe and gauge jets.
// Templated on the scalar so that one code path gives values (double) and
// exact coordinate gradients (Dual).

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kk/dual.hpp"
#include "kk/error.hpp"
#include "kk/liealg.hpp"

namespace kk::basegeo::detail {

template <class T>
struct FrameQuantities {
  int n = 0;
  int r = 0;
  std::vector<T> w;        // (mu, a) = (e⁻¹)^mu_a
  std::vector<T> c;        // (a, b, c) anholonomy
  std::vector<T> gamma;    // (a, b, c)
  std::vector<T> a_frame;  // (alpha, b)
  std::vector<T> f;        // (alpha, b, c)

  T& W(int mu, int a) { return w[mu * n + a]; }
  T& C(int a, int b, int cc) { return c[(a * n + b) * n + cc]; }
  T& G(int a, int b, int cc) { return gamma[(a * n + b) * n + cc]; }
  T& Af(int al, int b) { return a_frame[al * n + b]; }
  T& Fs(int al, int b, int cc) { return f[(al * n + b) * n + cc]; }
};

// Gauss-Jordan inverse with partial pivoting on the value part.
template <class T>
std::vector<T> invert(int n, std::vector<T> m) {
  std::vector<T> inv(n * n, T(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = T(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(value_of(m[row * n + col])) > std::abs(value_of(m[piv * n + col]))) piv = row;
    }
    if (value_of(m[piv * n + col]) == 0.0) throw DegenerateCoframeError("singular coframe matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(m[piv * n + j], m[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    }
    const T p = m[col * n + col];
    for (int j = 0; j < n; ++j) {
      m[col * n + j] /= p;
      inv[col * n + j] /= p;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const T f = m[row * n + col];
      if (value_of(f) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m[row * n + j] -= f * m[col * n + j];
        inv[row * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

/// Inputs: e (a, mu), de (a, mu, nu) = ∂_nu e^a_mu, A (alpha, mu),
/// dA (alpha, mu, nu) = ∂_nu A^α_mu, all flattened row-major.
template <class T>
FrameQuantities<T> frame_quantities(int n, int r, const std::vector<T>& e, const std::vector<T>& de,
                                    const std::vector<T>& A, const std::vector<T>& dA,
                                    const liealg::LieAlgebraSpec& spec, const Eigen::MatrixXd& b,
                                    const Eigen::MatrixXd& b_inv) {
  FrameQuantities<T> q;
  q.n = n;
  q.r = r;
  const std::vector<T> einv = invert(n, e);  // (a, mu) layout inverse → (mu, a)
  q.w = einv;

  auto DE = [&](int a, int mu, int nu) -> const T& { return de[(a * n + mu) * n + nu]; };
  auto DA = [&](int al, int mu, int nu) -> const T& { return dA[(al * n + mu) * n + nu]; };

  // Anholonomy: C^a_bc = (∂_nu e^a_mu − ∂_mu e^a_nu) W^nu_b W^mu_c.
  q.c.assign(n * n * n, T(0.0));
  std::vector<T> curl(n * n);
  for (int a = 0; a < n; ++a) {
    for (int nu = 0; nu < n; ++nu) {
      for (int mu = 0; mu < n; ++mu) curl[nu * n + mu] = DE(a, mu, nu) - DE(a, nu, mu);
    }
    for (int bb = 0; bb < n; ++bb) {
      for (int cc = 0; cc < n; ++cc) {
        T s(0.0);
        for (int nu = 0; nu < n; ++nu) {
          for (int mu = 0; mu < n; ++mu) s += curl[nu * n + mu] * q.W(nu, bb) * q.W(mu, cc);
        }
        q.C(a, bb, cc) = s;
      }
    }
  }

  // Lowered anholonomy and γ_abc = ½ (C_abc + C_bca − C_cab).
  std::vector<T> low(n * n * n, T(0.0));
  for (int a = 0; a < n; ++a) {
    for (int ap = 0; ap < n; ++ap) {
      if (b(a, ap) == 0.0) continue;
      for (int i = 0; i < n * n; ++i) low[a * n * n + i] += b(a, ap) * q.c[ap * n * n + i];
    }
  }
  auto L = [&](int a, int bb, int cc) -> const T& { return low[(a * n + bb) * n + cc]; };
  std::vector<T> glow(n * n * n);
  for (int a = 0; a < n; ++a) {
    for (int bb = 0; bb < n; ++bb) {
      for (int cc = 0; cc < n; ++cc) glow[(a * n + bb) * n + cc] = 0.5 * (L(a, bb, cc) + L(bb, cc, a) - L(cc, a, bb));
    }
  }
  q.gamma.assign(n * n * n, T(0.0));
  for (int a = 0; a < n; ++a) {
    for (int ap = 0; ap < n; ++ap) {
      if (b_inv(a, ap) == 0.0) continue;
      for (int i = 0; i < n * n; ++i) q.gamma[a * n * n + i] += b_inv(a, ap) * glow[ap * n * n + i];
    }
  }

  // Gauge potential and curvature in the frame.
  const int off = spec.n();
  q.a_frame.assign(r * n, T(0.0));
  q.f.assign(r * n * n, T(0.0));
  for (int al = 0; al < r; ++al) {
    for (int bb = 0; bb < n; ++bb) {
      T s(0.0);
      for (int mu = 0; mu < n; ++mu) s += A[al * n + mu] * q.W(mu, bb);
      q.Af(al, bb) = s;
    }
  }
  std::vector<T> fc(n * n);
  for (int al = 0; al < r; ++al) {
    // F^α_{nu mu} = ∂_nu A_mu − ∂_mu A_nu + c^α_βγ A^β_nu A^γ_mu
    for (int nu = 0; nu < n; ++nu) {
      for (int mu = 0; mu < n; ++mu) {
        T s = DA(al, mu, nu) - DA(al, nu, mu);
        for (int be = 0; be < r; ++be) {
          for (int ga = 0; ga < r; ++ga) {
            const double cab = spec.c(off + al, off + be, off + ga);
            if (cab != 0.0) s += cab * A[be * n + nu] * A[ga * n + mu];
          }
        }
        fc[nu * n + mu] = s;
      }
    }
    for (int bb = 0; bb < n; ++bb) {
      for (int cc = 0; cc < n; ++cc) {
        T s(0.0);
        for (int nu = 0; nu < n; ++nu) {
          for (int mu = 0; mu < n; ++mu) s += fc[nu * n + mu] * q.W(nu, bb) * q.W(mu, cc);
        }
        q.Fs(al, bb, cc) = s;
      }
    }
  }
  return q;
}

}  // namespace kk::basegeo::detail
