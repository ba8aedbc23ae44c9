#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kk/basegeo.hpp"
#include "kk/fieldexpr.hpp"
#include "kk/liealg.hpp"

namespace kk::bundle {

/// Real matrix representation of the g-block: generators T_α with
/// [T_α, T_β] = T_γ c^γ_αβ. All built-in reps are orthogonal.
struct MatrixRep {
  std::string name;
  std::vector<Eigen::MatrixXd> generators;
  int dim() const { return generators.empty() ? 0 : static_cast<int>(generators.front().rows()); }
  int rank() const { return static_cast<int>(generators.size()); }
};

enum class BuiltinRep { Su2AsSo3, U1AsSo2, Product };

BuiltinRep parse_rep_name(const std::string& name);  // "su2_as_so3", "u1_as_so2", "product"

/// Built-in rep matched against the g-block of `spec`. Product is u(1) ⊕ su(2)
/// in that order, as in the u1_su2 algebra. Throws InvalidInputError when
/// the rank or the closure check does not fit the algebra.
MatrixRep builtin_rep(BuiltinRep which, const liealg::LieAlgebraSpec& spec);

// max |[T_α, T_β] − T_γ c^γ_αβ|.
double closure_residual(const MatrixRep& rep, const liealg::LieAlgebraSpec& spec);

Eigen::MatrixXd generator_sum(const MatrixRep& rep, const Eigen::VectorXd& xi);  // Σ ξ^α T_α
Eigen::MatrixXd exp_generator(const MatrixRep& rep, const Eigen::VectorXd& xi);   // exp(Σ ξ^α T_α)

// Orthogonality defect max |gᵀg − I|.
double manifold_drift(const Eigen::MatrixXd& g);
// Throws OffManifoldError when the drift exceeds tol.
void require_on_manifold(const Eigen::MatrixXd& g, double tol = 1e-8);

Eigen::MatrixXd random_element(const MatrixRep& rep, std::mt19937_64& rng, double scale = 1.0);

/// Ad_g on the g-block: g T_β g⁻¹ = S^α_β T_α.
Eigen::MatrixXd adjoint_g_block(const MatrixRep& rep, const Eigen::MatrixXd& g);

/// Full N×N gauge map: identity on the s-block, Ad_g on the g-block.
Eigen::MatrixXd adjoint_of(const MatrixRep& rep, const liealg::LieAlgebraSpec& spec, const Eigen::MatrixXd& g);

// Step of the fiber-direction central differences.
inline constexpr double kFiberStep = 1e-4;

/// Checks de^α − ½[e∧e]^α + [A∧e]^α = F^α at (x, g) of the local product
/// U × G, with e^α = A^α + (dg g⁻¹)^α. Returns the largest residual over all
/// e-frame components.
double verify_deextra(const basegeo::GeometryAtPoint& geom, const MatrixRep& rep,
                      const liealg::LieAlgebraSpec& spec, const Eigen::MatrixXd& g);

struct GaugeCheckOptions {
  // Restrict to pairs of base directions, along which S is constant.
  bool horizontal_only = false;
};

/// With φ = S⁻¹ωS + S⁻¹dS and Φ = dφ + φ∧φ, returns max ‖Ω − SΦS⁻¹‖ over
/// coordinate 2-planes of U × G at (x, g).
double verify_gauge_covariance(const basegeo::GeometryAtPoint& geom, const MatrixRep& rep,
                               const liealg::LieAlgebraSpec& spec, const Eigen::MatrixXd& g,
                               const GaugeCheckOptions& options = {});

enum class Interpolation { Linear, Hold };

/// Vertical path data: t ∈ [0,1] ↦ v(t) ∈ R^r and the start element.
/// velocity(t, left) returns the left limit at t when `left` is set, which
/// only matters for piecewise-constant samples.
struct PathSpec {
  std::function<Eigen::VectorXd(double, bool)> velocity;
  Eigen::MatrixXd g0;

  static PathSpec constant(const Eigen::VectorXd& xi, Eigen::MatrixXd g0);
  // One expression per component in the variable t.
  static PathSpec analytic(const std::vector<std::string>& exprs, Eigen::MatrixXd g0,
                           const fieldexpr::ParamMap& params = {});
  // Rows (t_i, v_i) with strictly increasing t_i.
  static PathSpec sampled(std::vector<std::pair<double, Eigen::VectorXd>> samples, Interpolation interp,
                          Eigen::MatrixXd g0);
  // v ↦ −v(1 − t), starting from `start`.
  static PathSpec reversed(const PathSpec& path, Eigen::MatrixXd start);
};

struct LiftResult {
  std::vector<Eigen::MatrixXd> elements;  // steps + 1 entries, elements[0] = g0
  double max_drift_before_projection = 0.0;
  double max_drift = 0.0;
};

/// Integrates g' = g·Σ v^α(t) T_α on [0,1] with classical RK4 and a polar
/// projection after every step. Throws InvalidInputError for steps < 1 and
/// IntegratorError when the projected drift exceeds 1e-6.
LiftResult lift_path(const MatrixRep& rep, const PathSpec& path, int steps);

/// Convergence order log2(‖g_N − g_2N‖ / ‖g_2N − g_4N‖) at t = 1.
double richardson_order(const MatrixRep& rep, const PathSpec& path, int steps);

}  // namespace kk::bundle
