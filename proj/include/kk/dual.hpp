#pragma once

#include <array>
#include <cmath>

namespace kk {

// Upper bound on the chart dimension carried by a Dual gradient.
inline constexpr int kMaxChartDim = 8;

// Forward-mode first-order jet: a value together with its gradient along the
// chart coordinates. Lets the same templated kernel produce a quantity and its
// exact coordinate derivatives.
struct Dual {
  double v = 0.0;
  std::array<double, kMaxChartDim> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < kMaxChartDim; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < kMaxChartDim; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < kMaxChartDim; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < kMaxChartDim; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

inline Dual operator-(Dual a) {
  a.v = -a.v;
  for (double& x : a.d) x = -x;
  return a;
}
inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace kk
