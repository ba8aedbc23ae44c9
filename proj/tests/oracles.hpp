#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the frame-based code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MetricFn = std::function<MatrixXd(const VectorXd&)>;

// Sign of a permutation given as a sequence of distinct integers.
inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

// Levi-Civita symbol over a full index list of length N.
inline int levi_civita_symbol(const std::vector<int>& idx, int N) {
  if (static_cast<int>(idx.size()) != N) return 0;
  std::vector<int> seen(N, 0);
  for (int i : idx) {
    if (i < 0 || i >= N || seen[i]++) return 0;
  }
  return permutation_sign(idx);
}

// 4th-order central derivative of a vector/matrix valued function along `dir`.
template <class F>
auto central(F&& f, const VectorXd& x, int dir, double h) {
  VectorXd xp2 = x, xp1 = x, xm1 = x, xm2 = x;
  xp2(dir) += 2 * h;
  xp1(dir) += h;
  xm1(dir) -= h;
  xm2(dir) -= 2 * h;
  return ((-f(xp2) + 8.0 * f(xp1) - 8.0 * f(xm1) + f(xm2)) / (12.0 * h)).eval();
}

// Christoffel symbols Γ^k_ij of a coordinate metric, flattened (k*D + i)*D + j.
inline VectorXd christoffel(const MetricFn& g, const VectorXd& x, double h) {
  const int D = static_cast<int>(x.size());
  const MatrixXd gi = g(x).inverse();
  std::vector<MatrixXd> dg;
  for (int l = 0; l < D; ++l) dg.push_back(central(g, x, l, h));
  VectorXd out = VectorXd::Zero(D * D * D);
  for (int k = 0; k < D; ++k) {
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int l = 0; l < D; ++l) s += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out((k * D + i) * D + j) = 0.5 * s;
      }
    }
  }
  return out;
}

// Scalar curvature of a coordinate metric from Γ and finite differences of Γ.
inline double scalar_curvature(const MetricFn& g, const VectorXd& x, double h_inner = 1e-3, double h_outer = 1e-3) {
  const int D = static_cast<int>(x.size());
  auto gam = [&](const VectorXd& y) { return christoffel(g, y, h_inner); };
  const VectorXd G = gam(x);
  std::vector<VectorXd> dG;
  for (int m = 0; m < D; ++m) dG.push_back(central(gam, x, m, h_outer));
  auto at = [&](const VectorXd& v, int k, int i, int j) { return v((k * D + i) * D + j); };
  // Ric_sn = ∂_r Γ^r_ns − ∂_n Γ^r_rs + Γ^r_rl Γ^l_ns − Γ^r_nl Γ^l_rs
  MatrixXd ric = MatrixXd::Zero(D, D);
  for (int s = 0; s < D; ++s) {
    for (int n = 0; n < D; ++n) {
      double v = 0.0;
      for (int r = 0; r < D; ++r) {
        v += at(dG[r], r, n, s) - at(dG[n], r, r, s);
        for (int l = 0; l < D; ++l) v += at(G, r, r, l) * at(G, l, n, s) - at(G, r, n, l) * at(G, l, r, s);
      }
      ric(s, n) = v;
    }
  }
  return (g(x).inverse() * ric).trace();
}

// exp of a square matrix by scaling and squaring with a long Taylor series.
inline MatrixXd expm(const MatrixXd& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2;
    ++squarings;
  }
  const MatrixXd s = a / std::pow(2.0, squarings);
  MatrixXd term = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * s / k;
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Least-squares coordinates of m in the span of the generators.
inline VectorXd coordinates(const std::vector<MatrixXd>& gens, const MatrixXd& m) {
  const int r = static_cast<int>(gens.size());
  MatrixXd a(m.size(), r);
  for (int k = 0; k < r; ++k) a.col(k) = Eigen::Map<const VectorXd>(gens[k].data(), gens[k].size());
  return a.colPivHouseholderQr().solve(Eigen::Map<const VectorXd>(m.data(), m.size()));
}

/// Total-space metric on U × G in coordinates (x, y), g(y) = g_ref exp(Σ y^β T_β):
/// the coframe is e^a = E^a_μ dx^μ and e^α = A^α_μ dx^μ + (dg g⁻¹)^α, paired with h.
struct TotalSpace {
  std::function<MatrixXd(const VectorXd&)> coframe;  // x ↦ E (n×n)
  std::function<MatrixXd(const VectorXd&)> gauge;    // x ↦ A (r×n)
  std::vector<MatrixXd> generators;
  MatrixXd g_ref;
  MatrixXd h;  // (n+r)×(n+r)

  MatrixXd group(const VectorXd& y) const {
    MatrixXd s = MatrixXd::Zero(g_ref.rows(), g_ref.cols());
    for (std::size_t k = 0; k < generators.size(); ++k) s += y(k) * generators[k];
    return g_ref * expm(s);
  }

  // Coframe components e^A_I at (x, y).
  MatrixXd coframe_components(const VectorXd& z) const {
    const int r = static_cast<int>(generators.size());
    const int n = static_cast<int>(z.size()) - r;
    const VectorXd x = z.head(n), y = z.tail(r);
    MatrixXd e = MatrixXd::Zero(n + r, n + r);
    e.topLeftCorner(n, n) = coframe(x);
    e.bottomLeftCorner(r, n) = gauge(x);
    const MatrixXd ginv = group(y).inverse();
    const int d = static_cast<int>(g_ref.rows());
    MatrixXd s = MatrixXd::Zero(d, d);
    for (int k = 0; k < r; ++k) s += y(k) * generators[k];
    for (int b = 0; b < r; ++b) {
      // ∂_b exp(s) is the upper-right block of exp([[s, T_b], [0, s]]).
      MatrixXd big = MatrixXd::Zero(2 * d, 2 * d);
      big.topLeftCorner(d, d) = s;
      big.bottomRightCorner(d, d) = s;
      big.topRightCorner(d, d) = generators[b];
      const MatrixXd dg = g_ref * expm(big).topRightCorner(d, d);
      e.block(n, n + b, r, 1) = coordinates(generators, dg * ginv);
    }
    return e;
  }

  MatrixXd metric(const VectorXd& z) const {
    const MatrixXd e = coframe_components(z);
    return e.transpose() * h * e;
  }
};

}  // namespace oracle
