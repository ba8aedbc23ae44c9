#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kk/tensor.hpp"

namespace kk::liealg {

/// Split Lie algebra s ⊕ g with an ad-invariant block metric h = b ⊕ k.
///
/// Indices 0..n-1 address the central block s, indices n..N-1 the block g.
/// Structure constants are stored dense as c(A, B, C) = c^A_BC, meaning
/// [t_B, t_C] = t_A c^A_BC. Construction checks shapes only; the algebraic
/// hypotheses are checked by validate_spec().
class LieAlgebraSpec {
 public:
  LieAlgebraSpec(int n, int r, Tensor3 c, Eigen::MatrixXd h, std::vector<std::string> names = {});

  int n() const { return n_; }
  int r() const { return r_; }
  int dim() const { return n_ + r_; }

  double c(int a, int b, int cc) const { return c_(a, b, cc); }
  const Tensor3& structure_constants() const { return c_; }

  const Eigen::MatrixXd& h() const { return h_; }
  Eigen::MatrixXd b() const { return h_.topLeftCorner(n_, n_); }
  Eigen::MatrixXd k() const { return h_.bottomRightCorner(r_, r_); }

  // Inverses throw DegenerateMetricError when the block is singular.
  const Eigen::MatrixXd& h_inv() const;
  const Eigen::MatrixXd& b_inv() const;
  const Eigen::MatrixXd& k_inv() const;

  const std::vector<std::string>& names() const { return names_; }

 private:
  int n_;
  int r_;
  Tensor3 c_;
  Eigen::MatrixXd h_;
  std::optional<Eigen::MatrixXd> h_inv_;
  std::optional<Eigen::MatrixXd> b_inv_;
  std::optional<Eigen::MatrixXd> k_inv_;
  std::vector<std::string> names_;
};

enum class SignatureClass { PositiveDefinite, NegativeDefinite, Indefinite, Degenerate, Empty };

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  SignatureClass kind = SignatureClass::Empty;
};

std::string to_string(SignatureClass kind);

/// One checked invariant. Offending index tuples are zero-based; `message`
/// renders them one-based.
struct InvariantCheck {
  std::string name;
  bool passed = true;
  double max_violation = 0.0;
  std::vector<std::vector<int>> offending;  // first few violating tuples, largest first
  std::string message;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  // Unimodularity c^α_γα = 0 is reported but never fails validation.
  bool unimodular = true;
  double unimodular_violation = 0.0;
  Signature b_signature;
  Signature k_signature;

  bool ok() const;
  const InvariantCheck& check(const std::string& name) const;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// Checks antisymmetry, Jacobi, central s-block, ad-invariance of h, s ⟂ g and
/// nondegeneracy of h. Throws DimensionError on shape mismatch and
/// DegenerateMetricError when |det h| <= tol.
ValidationReport validate_spec(const LieAlgebraSpec& spec, double tol = kDefaultTolerance);

Eigen::VectorXd bracket(const LieAlgebraSpec& spec, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta);

// (ad_ξ)^A_C = c^A_BC ξ^B
Eigen::MatrixXd adjoint_matrix(const LieAlgebraSpec& spec, const Eigen::VectorXd& xi);

/// K_γε = c^α_βγ c^β_αε on the g-block (r×r).
Eigen::MatrixXd killing_form(const LieAlgebraSpec& spec);

/// Sign in front of (K, k⁻¹)/8 in the cosmological constant:
/// Λ = −(1/8) c^α_βγ c^β_αε k^γε.
inline constexpr double kCosmologicalSign = -1.0;

/// Λ = kCosmologicalSign · (1/8) Σ K_γε (k⁻¹)^γε. Throws on singular k.
double cosmological_constant(const LieAlgebraSpec& spec);

enum class Builtin { Abelian, Su2, U1Su2 };

/// Builds one of the standard algebras: abelian(n, r), su2(n) with
/// c^α_βγ = ε_αβγ, or u1_su2(n) = R^n ⊕ u(1) ⊕ su(2). `r` is only read for
/// the abelian case. Throws InvalidInputError when b or k is not symmetric,
/// has the wrong size, or breaks one of the validated invariants.
LieAlgebraSpec builtin_algebra(Builtin which, int n, int r, const Eigen::MatrixXd& b, const Eigen::MatrixXd& k);

}  // namespace kk::liealg
