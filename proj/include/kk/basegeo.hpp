#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kk/fieldexpr.hpp"
#include "kk/liealg.hpp"
#include "kk/tensor.hpp"

namespace kk::basegeo {

struct Lattice {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<int> steps;  // points per axis, endpoints included
};

/// Single chart of the base with its evaluation points.
struct ChartSpec {
  int n = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> points;
};

// Points of a lattice in lexicographic order (last axis fastest).
std::vector<std::vector<double>> expand_lattice(const Lattice& lattice);

/// Coframe e^a = e^a_μ dx^μ on the chart with the metric block b,
/// g = b_ab e^a e^b.
class CoframeField {
 public:
  // entries[a][mu] is the field e^a_mu.
  CoframeField(std::vector<std::vector<fieldexpr::FieldProvider>> entries, Eigen::MatrixXd b);

  // Parses expression strings; variables are x1..xn plus optional aliases.
  static CoframeField parse(const std::vector<std::vector<std::string>>& exprs, const Eigen::MatrixXd& b,
                            const fieldexpr::ParamMap& params = {}, const std::vector<std::string>& aliases = {});

  int dim() const { return n_; }
  const fieldexpr::FieldProvider& entry(int a, int mu) const { return entries_[a][mu]; }
  const Eigen::MatrixXd& b() const { return b_; }
  const Eigen::MatrixXd& b_inv() const { return b_inv_; }

 private:
  int n_;
  std::vector<std::vector<fieldexpr::FieldProvider>> entries_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd b_inv_;
};

/// Gauge potential A^α = A^α_μ dx^μ, one row per g-basis element.
class GaugeField {
 public:
  GaugeField(std::vector<std::vector<fieldexpr::FieldProvider>> entries, int chart_dim);

  static GaugeField parse(const std::vector<std::vector<std::string>>& exprs, int chart_dim,
                          const fieldexpr::ParamMap& params = {}, const std::vector<std::string>& aliases = {});
  static GaugeField zero(int r, int chart_dim);

  int rank() const { return static_cast<int>(entries_.size()); }
  int chart_dim() const { return n_; }
  const fieldexpr::FieldProvider& entry(int alpha, int mu) const { return entries_[alpha][mu]; }

 private:
  int n_;
  std::vector<std::vector<fieldexpr::FieldProvider>> entries_;
};

enum class DerivativeMode { Analytic, FiniteDifference };

struct GeometryOptions {
  // Analytic: derivatives of γ, F and frame components of A come from exact
  // second partials of the inputs. FiniteDifference: 4th-order central
  // differences of those quantities with step fd_step.
  DerivativeMode mode = DerivativeMode::Analytic;
  double fd_step = 1e-3;
  // Coframe is degenerate when |det e| < degeneracy_tol * max|e^a_mu|^n.
  double degeneracy_tol = 1e-12;
};

/// Everything the curvature code needs at one chart point. Lower-case Latin
/// indices are base frame indices, Greek ones run over the g-block (0..r-1),
/// μ, ν are coordinate indices, and e_d(f) = (e⁻¹)^μ_d ∂_μ f.
struct GeometryAtPoint {
  int n = 0;
  int r = 0;
  std::vector<double> point;
  DerivativeMode mode = DerivativeMode::Analytic;

  Eigen::MatrixXd e;      // (a, mu) = e^a_mu
  Eigen::MatrixXd e_inv;  // (mu, a)
  Tensor3 de;             // (a, mu, nu) = ∂_nu e^a_mu
  Tensor3 anholonomy;     // (a, b, c) = C^a_bc, de^a = ½ C^a_bc e^b∧e^c
  Tensor3 gamma;          // (a, b, c) = γ^a_bc, γ^a_b = γ^a_bc e^c
  Tensor4 dgamma;         // (a, b, c, d) = e_d(γ^a_bc)

  Eigen::MatrixXd a_coord;  // (alpha, mu) = A^α_mu
  Tensor3 da_coord;         // (alpha, mu, nu) = ∂_nu A^α_mu
  Eigen::MatrixXd a_frame;  // (alpha, b) = A^α_b
  Tensor3 da_frame;         // (alpha, b, d) = e_d(A^α_b)
  Tensor3 F;                // (alpha, b, c) = F^α_bc, F = dA + ½[A∧A]
  Tensor4 dF;               // (alpha, b, c, d) = e_d(F^α_bc)

  Eigen::MatrixXd b, b_inv;
  Eigen::MatrixXd k, k_inv;
};

struct FrameMatrix {
  Eigen::MatrixXd e;
  Eigen::MatrixXd inverse;
};

/// Throws DegenerateCoframeError naming the point when the coframe is singular.
FrameMatrix frame_matrix(const CoframeField& coframe, std::span<const double> point,
                         const GeometryOptions& options = {});

Tensor3 anholonomy(const CoframeField& coframe, std::span<const double> point, const GeometryOptions& options = {});

/// Connection coefficients γ^a_bc of the unique metric, torsion-free
/// connection: γ_abc + γ_bac = 0 and de^a + γ^a_c∧e^c = 0.
Tensor3 levi_civita(const CoframeField& coframe, std::span<const double> point, const GeometryOptions& options = {});

struct BaseCurvature {
  Tensor4 riemann;          // (a, c, d, e) = Ω^a_c components, Ω^a_c = ½ R^a_cde e^d∧e^e
  Eigen::MatrixXd ricci;    // Ric^a_d = R^a_cde b^ce
  double scalar = 0.0;      // Ric^a_a
  Eigen::MatrixXd einstein; // Ric^a_d − ½ R δ^a_d
};

BaseCurvature base_curvature(const GeometryAtPoint& geom);
BaseCurvature base_curvature(const CoframeField& coframe, std::span<const double> point,
                             const GeometryOptions& options = {});

struct FieldStrength {
  Tensor3 F;   // (alpha, b, c)
  Tensor4 dF;  // (alpha, b, c, d)
};

FieldStrength field_strength(const liealg::LieAlgebraSpec& spec, const GaugeField& gauge, const CoframeField& coframe,
                             std::span<const double> point, const GeometryOptions& options = {});

/// Builds the full per-point geometry. Throws DimensionError when the
/// algebra, coframe and gauge field disagree on n or r.
GeometryAtPoint compute_geometry(const liealg::LieAlgebraSpec& spec, const CoframeField& coframe,
                                 const GaugeField& gauge, std::span<const double> point,
                                 const GeometryOptions& options = {});

// max |γ_abc + γ_bac| after lowering with b.
double metricity_residual(const GeometryAtPoint& geom);
// max |C^a_bc − γ^a_bc + γ^a_cb|, the torsion of γ in components.
double torsion_residual(const GeometryAtPoint& geom);

}  // namespace kk::basegeo
