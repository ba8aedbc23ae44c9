#pragma once

#include <Eigen/Dense>

#include "kk/basegeo.hpp"
#include "kk/liealg.hpp"
#include "kk/tensor.hpp"

namespace kk::kkcurv {

/// Levi-Civita connection of h on the total space in the coframe e^A
/// (base block 0..n-1, g-block n..N-1), ω^A_B = ω^A_{B,C} e^C.
/// Coefficients depend on the base point only.
struct KKConnection {
  int n = 0;
  int r = 0;
  Tensor3 omega;      // (A, B, C) = ω^A_{B,C}
  Tensor4 domega;     // (A, B, C, d) = e_d(ω^A_{B,C}), base directions only
  Tensor3 structure;  // (A, C, D) = D^A_CD with de^A = ½ D^A_CD e^C∧e^D
  Eigen::MatrixXd h, h_inv;

  int dim() const { return n + r; }
};

KKConnection assemble_omega(const basegeo::GeometryAtPoint& geom, const liealg::LieAlgebraSpec& spec);

// max |ω^{AB} + ω^{BA}| (raised with h) over all coefficient slots.
double metricity_residual(const KKConnection& conn);
// max |D^A_CD + ω^A_{D,C} − ω^A_{C,D}|, the components of de^A + ω^A_C∧e^C.
double torsion_residual(const KKConnection& conn);

struct KKCurvature {
  Tensor4 riemann;  // (A, B, C, D): Ω^A_B = ½ Ω^A_{B;CD} e^C∧e^D
  Eigen::MatrixXd ricci;     // Ric^A_C = Ω^A_{B';CB} h^{B'B}
  double scalar = 0.0;
  Eigen::MatrixXd einstein;  // Ric − ½ R δ
};

/// Ω = dω + ω∧ω expanded in components, with de^A substituted from the
/// structure functions of the coframe.
KKCurvature curvature_direct(const KKConnection& conn);

// max |Ω^{AB}_{;CD} + Ω^{BA}_{;CD}| after raising with h.
double curvature_antisymmetry_residual(const KKCurvature& curv, const KKConnection& conn);

/// Closed-form Ricci and Einstein blocks in terms of γ, F, A and c.
struct ClosedFormRicci {
  Eigen::MatrixXd ric_ad;           // n×n, Ric^a_d
  Eigen::MatrixXd ric_a_delta;      // n×r, Ric^a_δ
  Eigen::MatrixXd ric_alpha_delta;  // r×r, Ric^α_δ
  double scalar = 0.0;
  Eigen::MatrixXd ein_ad;       // n×n
  Eigen::MatrixXd ein_a_delta;  // n×r, equal to ric_a_delta
};

ClosedFormRicci ricci_closed_form(const basegeo::GeometryAtPoint& geom, const liealg::LieAlgebraSpec& spec);

/// Largest componentwise gap between the direct curvature and the closed
/// forms, per block.
struct CrossCheck {
  double ric_ad = 0.0;
  double ric_a_delta = 0.0;
  double ric_alpha_delta = 0.0;
  double scalar = 0.0;
  double ein_ad = 0.0;
  double max() const;
};

CrossCheck cross_check(const KKCurvature& direct, const ClosedFormRicci& closed);

/// Residuals of the Einstein-Yang-Mills system on the base.
struct EYMResidual {
  Eigen::MatrixXd einstein_block;  // n×n
  Eigen::MatrixXd ym_block;        // r×n, (δ, a)
  double einstein_norm = 0.0;      // Frobenius
  double ym_norm = 0.0;
};

EYMResidual eym_residuals(const basegeo::GeometryAtPoint& geom, const liealg::LieAlgebraSpec& spec);

}  // namespace kk::kkcurv
