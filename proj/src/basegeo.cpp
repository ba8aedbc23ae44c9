#include "kk/basegeo.hpp"

#include <cmath>
#include <sstream>

#include "frame_kernel.hpp"
#include "kk/dual.hpp"
#include "kk/error.hpp"

namespace kk::basegeo {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

using Grid = std::vector<std::vector<fieldexpr::FieldProvider>>;

Grid parse_grid(const std::vector<std::vector<std::string>>& exprs, int cols, const fieldexpr::ParamMap& params,
                const std::vector<std::string>& aliases, const char* what) {
  fieldexpr::ParseOptions opts;
  opts.num_vars = cols;
  opts.aliases = aliases;
  Grid g;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    if (static_cast<int>(exprs[i].size()) != cols) {
      throw DimensionError(std::string(what) + " row " + std::to_string(i + 1) + " has " +
                           std::to_string(exprs[i].size()) + " entries, expected " + std::to_string(cols));
    }
    std::vector<fieldexpr::FieldProvider> row;
    for (const auto& text : exprs[i]) row.emplace_back(fieldexpr::parse(text, opts), params, cols);
    g.push_back(std::move(row));
  }
  return g;
}

void check_point(int n, std::span<const double> x) {
  if (static_cast<int>(x.size()) != n) {
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, chart has " + std::to_string(n));
  }
}

// Jets of the coframe and gauge entries at one point.
struct Jets {
  std::vector<double> e, de, a, da;        // values
  std::vector<Dual> e_d, de_d, a_d, da_d;  // with coordinate gradients
};

Jets jets(const CoframeField& coframe, const GaugeField& gauge, std::span<const double> x, bool with_second) {
  const int n = coframe.dim();
  const int r = gauge.rank();
  Jets j;
  j.e.resize(n * n);
  j.de.resize(n * n * n);
  j.a.resize(r * n);
  j.da.resize(r * n * n);
  if (with_second) {
    j.e_d.resize(n * n);
    j.de_d.resize(n * n * n);
    j.a_d.resize(r * n);
    j.da_d.resize(r * n * n);
  }
  auto load = [&](const fieldexpr::FieldProvider& f, int flat, std::vector<double>& v, std::vector<double>& dv,
                  std::vector<Dual>& vd, std::vector<Dual>& dvd) {
    v[flat] = f.value(x);
    for (int nu = 0; nu < n; ++nu) dv[flat * n + nu] = f.partial(nu, x);
    if (!with_second) return;
    Dual val(v[flat]);
    for (int nu = 0; nu < n; ++nu) val.d[nu] = dv[flat * n + nu];
    vd[flat] = val;
    for (int nu = 0; nu < n; ++nu) {
      Dual p(dv[flat * n + nu]);
      for (int rho = 0; rho < n; ++rho) p.d[rho] = f.second_partial(nu, rho, x);
      dvd[flat * n + nu] = p;
    }
  };
  for (int a = 0; a < n; ++a) {
    for (int mu = 0; mu < n; ++mu) load(coframe.entry(a, mu), a * n + mu, j.e, j.de, j.e_d, j.de_d);
  }
  for (int al = 0; al < r; ++al) {
    for (int mu = 0; mu < n; ++mu) load(gauge.entry(al, mu), al * n + mu, j.a, j.da, j.a_d, j.da_d);
  }
  return j;
}

void check_degenerate(const Eigen::MatrixXd& e, std::span<const double> x, double tol) {
  const int n = static_cast<int>(e.rows());
  const double scale = e.cwiseAbs().maxCoeff();
  const double det = e.determinant();
  if (!std::isfinite(det) || scale == 0.0 || std::abs(det) < tol * std::pow(scale, n)) {
    std::ostringstream os;
    os << "degenerate coframe at x = " << format_point(x) << " (det = " << det << ")";
    throw DegenerateCoframeError(os.str());
  }
}

Eigen::MatrixXd to_matrix(int rows, int cols, const std::vector<double>& v) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  }
  return m;
}

detail::FrameQuantities<double> values_at(const liealg::LieAlgebraSpec& spec, const CoframeField& coframe,
                                          const GaugeField& gauge, std::span<const double> x) {
  const Jets j = jets(coframe, gauge, x, false);
  return detail::frame_quantities<double>(coframe.dim(), gauge.rank(), j.e, j.de, j.a, j.da, spec, coframe.b(),
                                          coframe.b_inv());
}

// Algebra with the right block sizes for geometry that never touches g.
liealg::LieAlgebraSpec abelian_for(const Eigen::MatrixXd& b, int r) {
  const int n = static_cast<int>(b.rows());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n + r, n + r);
  h.topLeftCorner(n, n) = b;
  return liealg::LieAlgebraSpec(n, r, Tensor3({n + r, n + r, n + r}, 0.0), h, {});
}

}  // namespace

std::vector<std::vector<double>> expand_lattice(const Lattice& lattice) {
  const std::size_t dim = lattice.min.size();
  if (lattice.max.size() != dim || lattice.steps.size() != dim) {
    throw DimensionError("lattice min, max and steps must have the same length");
  }
  std::size_t total = 1;
  for (int s : lattice.steps) {
    if (s < 1) throw InvalidInputError("lattice steps must be at least 1");
    total *= static_cast<std::size_t>(s);
  }
  std::vector<std::vector<double>> out;
  out.reserve(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const int s = lattice.steps[i];
      p[i] = s == 1 ? lattice.min[i] : lattice.min[i] + (lattice.max[i] - lattice.min[i]) * idx[i] / (s - 1);
    }
    out.push_back(std::move(p));
    for (std::size_t i = dim; i-- > 0;) {
      if (++idx[i] < lattice.steps[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

CoframeField::CoframeField(std::vector<std::vector<fieldexpr::FieldProvider>> entries, Eigen::MatrixXd b)
    : n_(static_cast<int>(entries.size())), entries_(std::move(entries)), b_(std::move(b)) {
  if (n_ < 1 || n_ > kMaxChartDim) {
    throw DimensionError("chart dimension must be between 1 and " + std::to_string(kMaxChartDim));
  }
  for (const auto& row : entries_) {
    if (static_cast<int>(row.size()) != n_) throw DimensionError("coframe must be a square n x n array");
  }
  if (b_.rows() != n_ || b_.cols() != n_) throw DimensionError("metric block b must be n x n");
  if ((b_ - b_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidInputError("metric block b is not symmetric");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b_);
  if (!lu.isInvertible()) throw DegenerateMetricError("metric block b is singular");
  b_inv_ = lu.inverse();
}

CoframeField CoframeField::parse(const std::vector<std::vector<std::string>>& exprs, const Eigen::MatrixXd& b,
                                 const fieldexpr::ParamMap& params, const std::vector<std::string>& aliases) {
  const int n = static_cast<int>(exprs.size());
  return CoframeField(parse_grid(exprs, n, params, aliases, "coframe"), b);
}

GaugeField::GaugeField(std::vector<std::vector<fieldexpr::FieldProvider>> entries, int chart_dim)
    : n_(chart_dim), entries_(std::move(entries)) {
  for (const auto& row : entries_) {
    if (static_cast<int>(row.size()) != n_) throw DimensionError("gauge potential rows must have n entries");
  }
}

GaugeField GaugeField::parse(const std::vector<std::vector<std::string>>& exprs, int chart_dim,
                             const fieldexpr::ParamMap& params, const std::vector<std::string>& aliases) {
  return GaugeField(parse_grid(exprs, chart_dim, params, aliases, "gauge potential"), chart_dim);
}

GaugeField GaugeField::zero(int r, int chart_dim) {
  Grid g(r, std::vector<fieldexpr::FieldProvider>(
                chart_dim, fieldexpr::FieldProvider(fieldexpr::Expr::num(0.0), {}, chart_dim)));
  return GaugeField(std::move(g), chart_dim);
}

FrameMatrix frame_matrix(const CoframeField& coframe, std::span<const double> point, const GeometryOptions& options) {
  const int n = coframe.dim();
  check_point(n, point);
  Eigen::MatrixXd e(n, n);
  for (int a = 0; a < n; ++a) {
    for (int mu = 0; mu < n; ++mu) e(a, mu) = coframe.entry(a, mu).value(point);
  }
  check_degenerate(e, point, options.degeneracy_tol);
  return {e, e.inverse()};
}

GeometryAtPoint compute_geometry(const liealg::LieAlgebraSpec& spec, const CoframeField& coframe,
                                 const GaugeField& gauge, std::span<const double> point,
                                 const GeometryOptions& options) {
  const int n = coframe.dim();
  const int r = gauge.rank();
  if (spec.n() != n) {
    throw DimensionError("algebra has s-block of size " + std::to_string(spec.n()) + " but the chart has dimension " +
                         std::to_string(n));
  }
  if (spec.r() != r) {
    throw DimensionError("algebra has g-block of size " + std::to_string(spec.r()) + " but the gauge potential has " +
                         std::to_string(r) + " rows");
  }
  if (gauge.chart_dim() != n) throw DimensionError("gauge potential chart dimension differs from the coframe");
  check_point(n, point);
  if ((spec.b() - coframe.b()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInputError("metric block b of the algebra differs from the coframe metric");
  }

  GeometryAtPoint g;
  g.n = n;
  g.r = r;
  g.point.assign(point.begin(), point.end());
  g.mode = options.mode;
  g.b = coframe.b();
  g.b_inv = coframe.b_inv();
  g.k = spec.k();
  g.k_inv = r > 0 ? spec.k_inv() : Eigen::MatrixXd(0, 0);

  const bool analytic = options.mode == DerivativeMode::Analytic;
  const Jets j = jets(coframe, gauge, point, analytic);
  g.e = to_matrix(n, n, j.e);
  check_degenerate(g.e, point, options.degeneracy_tol);
  g.a_coord = to_matrix(r, n, j.a);
  g.de = Tensor3({n, n, n});
  std::copy(j.de.begin(), j.de.end(), g.de.flat().begin());
  g.da_coord = Tensor3({r, n, n});
  std::copy(j.da.begin(), j.da.end(), g.da_coord.flat().begin());

  g.anholonomy = Tensor3({n, n, n});
  g.gamma = Tensor3({n, n, n});
  g.dgamma = Tensor4({n, n, n, n});
  g.a_frame = Eigen::MatrixXd(r, n);
  g.da_frame = Tensor3({r, n, n});
  g.F = Tensor3({r, n, n});
  g.dF = Tensor4({r, n, n, n});

  // Coordinate gradients of γ, A_frame, F: grad(q, rho) for flat index q.
  std::vector<double> ggam(n * n * n * n), gaf(r * n * n), gf(r * n * n * n);

  if (analytic) {
    auto q = detail::frame_quantities<Dual>(n, r, j.e_d, j.de_d, j.a_d, j.da_d, spec, g.b, g.b_inv);
    g.e_inv = Eigen::MatrixXd(n, n);
    for (int mu = 0; mu < n; ++mu) {
      for (int a = 0; a < n; ++a) g.e_inv(mu, a) = q.W(mu, a).v;
    }
    for (std::size_t i = 0; i < q.c.size(); ++i) g.anholonomy.flat()[i] = q.c[i].v;
    for (std::size_t i = 0; i < q.gamma.size(); ++i) {
      g.gamma.flat()[i] = q.gamma[i].v;
      for (int rho = 0; rho < n; ++rho) ggam[i * n + rho] = q.gamma[i].d[rho];
    }
    for (std::size_t i = 0; i < q.a_frame.size(); ++i) {
      g.a_frame(static_cast<int>(i) / n, static_cast<int>(i) % n) = q.a_frame[i].v;
      for (int rho = 0; rho < n; ++rho) gaf[i * n + rho] = q.a_frame[i].d[rho];
    }
    for (std::size_t i = 0; i < q.f.size(); ++i) {
      g.F.flat()[i] = q.f[i].v;
      for (int rho = 0; rho < n; ++rho) gf[i * n + rho] = q.f[i].d[rho];
    }
  } else {
    auto q = detail::frame_quantities<double>(n, r, j.e, j.de, j.a, j.da, spec, g.b, g.b_inv);
    g.e_inv = to_matrix(n, n, q.w);
    std::copy(q.c.begin(), q.c.end(), g.anholonomy.flat().begin());
    std::copy(q.gamma.begin(), q.gamma.end(), g.gamma.flat().begin());
    std::copy(q.f.begin(), q.f.end(), g.F.flat().begin());
    g.a_frame = to_matrix(r, n, q.a_frame);
    const double h = options.fd_step;
    if (!(h > 0.0)) throw InvalidInputError("finite-difference step must be positive");
    std::vector<double> xs(point.begin(), point.end());
    for (int rho = 0; rho < n; ++rho) {
      std::array<detail::FrameQuantities<double>, 4> s;
      const std::array<double, 4> shifts{2 * h, h, -h, -2 * h};
      for (int k = 0; k < 4; ++k) {
        xs[rho] = point[rho] + shifts[k];
        try {
          s[k] = values_at(spec, coframe, gauge, xs);
        } catch (const DegenerateCoframeError&) {
          throw DegenerateCoframeError("coframe degenerates within the finite-difference stencil at x = " +
                                       format_point(point));
        }
      }
      xs[rho] = point[rho];
      auto d4 = [&](const std::vector<double>& p2, const std::vector<double>& p1, const std::vector<double>& m1,
                    const std::vector<double>& m2, std::size_t i) {
        return (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h);
      };
      for (std::size_t i = 0; i < q.gamma.size(); ++i)
        ggam[i * n + rho] = d4(s[0].gamma, s[1].gamma, s[2].gamma, s[3].gamma, i);
      for (std::size_t i = 0; i < q.a_frame.size(); ++i)
        gaf[i * n + rho] = d4(s[0].a_frame, s[1].a_frame, s[2].a_frame, s[3].a_frame, i);
      for (std::size_t i = 0; i < q.f.size(); ++i) gf[i * n + rho] = d4(s[0].f, s[1].f, s[2].f, s[3].f, i);
    }
  }

  // Frame derivatives e_d = W^rho_d ∂_rho.
  auto frame_d = [&](const std::vector<double>& grad, std::size_t i, int d) {
    double s = 0.0;
    for (int rho = 0; rho < n; ++rho) s += g.e_inv(rho, d) * grad[i * n + rho];
    return s;
  };
  for (std::size_t i = 0; i < g.gamma.size(); ++i) {
    for (int d = 0; d < n; ++d) g.dgamma.flat()[i * n + d] = frame_d(ggam, i, d);
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(r * n); ++i) {
    for (int d = 0; d < n; ++d) g.da_frame.flat()[i * n + d] = frame_d(gaf, i, d);
  }
  for (std::size_t i = 0; i < g.F.size(); ++i) {
    for (int d = 0; d < n; ++d) g.dF.flat()[i * n + d] = frame_d(gf, i, d);
  }
  return g;
}

Tensor3 anholonomy(const CoframeField& coframe, std::span<const double> point, const GeometryOptions& options) {
  const int n = coframe.dim();
  return compute_geometry(abelian_for(coframe.b(), 0), coframe, GaugeField::zero(0, n), point, options).anholonomy;
}

Tensor3 levi_civita(const CoframeField& coframe, std::span<const double> point, const GeometryOptions& options) {
  const int n = coframe.dim();
  return compute_geometry(abelian_for(coframe.b(), 0), coframe, GaugeField::zero(0, n), point, options).gamma;
}

BaseCurvature base_curvature(const GeometryAtPoint& g) {
  const int n = g.n;
  BaseCurvature out;
  out.riemann = Tensor4({n, n, n, n});
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      for (int d = 0; d < n; ++d) {
        for (int e = 0; e < n; ++e) {
          double s = g.dgamma(a, c, e, d) - g.dgamma(a, c, d, e);
          for (int f = 0; f < n; ++f) {
            s += g.gamma(a, c, f) * g.anholonomy(f, d, e);
            s += g.gamma(a, f, d) * g.gamma(f, c, e) - g.gamma(a, f, e) * g.gamma(f, c, d);
          }
          out.riemann(a, c, d, e) = s;
        }
      }
    }
  }
  out.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) {
        for (int e = 0; e < n; ++e) {
          if (g.b_inv(c, e) != 0.0) s += out.riemann(a, c, d, e) * g.b_inv(c, e);
        }
      }
      out.ricci(a, d) = s;
    }
  }
  out.scalar = out.ricci.trace();
  out.einstein = out.ricci - 0.5 * out.scalar * Eigen::MatrixXd::Identity(n, n);
  return out;
}

BaseCurvature base_curvature(const CoframeField& coframe, std::span<const double> point,
                             const GeometryOptions& options) {
  const int n = coframe.dim();
  return base_curvature(compute_geometry(abelian_for(coframe.b(), 0), coframe, GaugeField::zero(0, n), point, options));
}

FieldStrength field_strength(const liealg::LieAlgebraSpec& spec, const GaugeField& gauge, const CoframeField& coframe,
                             std::span<const double> point, const GeometryOptions& options) {
  auto g = compute_geometry(spec, coframe, gauge, point, options);
  return {std::move(g.F), std::move(g.dF)};
}

double metricity_residual(const GeometryAtPoint& g) {
  const int n = g.n;
  double m = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        double lab = 0.0, lba = 0.0;
        for (int x = 0; x < n; ++x) {
          lab += g.b(a, x) * g.gamma(x, b, c);
          lba += g.b(b, x) * g.gamma(x, a, c);
        }
        m = std::max(m, std::abs(lab + lba));
      }
    }
  }
  return m;
}

double torsion_residual(const GeometryAtPoint& g) {
  const int n = g.n;
  double m = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        m = std::max(m, std::abs(g.anholonomy(a, b, c) - g.gamma(a, b, c) + g.gamma(a, c, b)));
      }
    }
  }
  return m;
}

}  // namespace kk::basegeo
