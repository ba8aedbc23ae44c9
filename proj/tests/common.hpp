#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kk/basegeo.hpp"
#include "kk/fieldexpr.hpp"

namespace testutil {

using StringMatrix = std::vector<std::vector<std::string>>;

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// c0 + c1*sin(k·x + p): smooth, bounded, with nonzero derivatives everywhere.
inline std::string random_wave(std::mt19937_64& rng, int n, double base, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::string arg;
  for (int i = 0; i < n; ++i) {
    if (i) arg += " + ";
    arg += "(" + fmt(u(rng)) + ")*x" + std::to_string(i + 1);
  }
  arg += " + (" + fmt(u(rng)) + ")";
  const char* f = (rng() % 2) ? "sin" : "cos";
  return fmt(base) + " + (" + fmt(amp * u(rng)) + ")*" + f + "(" + arg + ")";
}

// Diagonally dominant coframe, so it stays invertible near the origin.
inline StringMatrix random_coframe(std::mt19937_64& rng, int n) {
  StringMatrix m(n, std::vector<std::string>(n));
  for (int a = 0; a < n; ++a) {
    for (int mu = 0; mu < n; ++mu) m[a][mu] = random_wave(rng, n, a == mu ? 1.5 : 0.0, a == mu ? 0.3 : 0.2);
  }
  return m;
}

inline StringMatrix random_gauge(std::mt19937_64& rng, int r, int n) {
  StringMatrix m(r, std::vector<std::string>(n));
  for (auto& row : m) {
    for (auto& s : row) s = random_wave(rng, n, 0.0, 0.6);
  }
  return m;
}

// Evaluates a matrix of expressions at a point.
inline Eigen::MatrixXd eval_matrix(const StringMatrix& m, const Eigen::VectorXd& x) {
  Eigen::MatrixXd out(m.size(), m.empty() ? 0 : m[0].size());
  std::vector<double> p(x.data(), x.data() + x.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      out(i, j) = kk::fieldexpr::evaluate(kk::fieldexpr::parse(m[i][j]), p);
    }
  }
  return out;
}

inline std::vector<double> random_point(std::mt19937_64& rng, int n, double radius = 0.5) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<double> p(n);
  for (auto& v : p) v = u(rng);
  return p;
}

}  // namespace testutil
