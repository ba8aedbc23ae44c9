#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kk/liealg.hpp"

namespace kk::exterior {

// Strictly increasing multi-index encoded as a bitmask over the frame indices.
using Mask = std::uint32_t;

inline constexpr int kMaxFrameDim = 16;

/// Alternating p-form in an N-dimensional coframe θ^0..θ^{N-1}, with
/// coefficients in R^m (m = 1 for scalar forms).
///
/// The form is Σ_{I increasing} c_I θ^{i1}∧...∧θ^{ip}. Only nonzero
/// coefficient vectors are stored, so the zero form has an empty map.
class AlternatingForm {
 public:
  AlternatingForm(int frame_dim, int degree, int value_dim = 1);

  static AlternatingForm constant(int frame_dim, double value);
  // θ^{i1}∧...∧θ^{ip} for indices in any order (sign applied, repeats give 0).
  static AlternatingForm basis(int frame_dim, std::span<const int> indices, double coeff = 1.0);
  static AlternatingForm basis(int frame_dim, std::initializer_list<int> indices, double coeff = 1.0);
  // θ^0∧...∧θ^{N-1}
  static AlternatingForm volume(int frame_dim);

  int frame_dim() const { return frame_dim_; }
  int degree() const { return degree_; }
  int value_dim() const { return value_dim_; }
  bool is_zero() const { return coeffs_.empty(); }

  const std::map<Mask, std::vector<double>>& terms() const { return coeffs_; }

  // Coefficient at an arbitrary ordering of p indices: sign of the sorting
  // permutation times the stored value, zero for repeated indices.
  std::vector<double> at(std::span<const int> indices) const;
  double scalar_at(std::initializer_list<int> indices) const;

  void add_term(Mask mask, std::span<const double> value, double scale = 1.0);

  // Scalar form holding value component `k`.
  AlternatingForm component(int k) const;
  // Promotes a scalar form to value dimension m with the value in slot k.
  AlternatingForm embed(int value_dim, int k) const;

  AlternatingForm& operator+=(const AlternatingForm& other);
  AlternatingForm& operator-=(const AlternatingForm& other);
  AlternatingForm& operator*=(double s);

  double max_abs_coeff() const;

  // One line per multi-index: "i1 i2 ... ip : v1 ... vm" (one-based indices).
  std::string dump() const;

  bool operator==(const AlternatingForm& other) const;

 private:
  void prune(Mask mask);

  int frame_dim_;
  int degree_;
  int value_dim_;
  std::map<Mask, std::vector<double>> coeffs_;
};

AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b);
AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b);
AlternatingForm operator*(double s, AlternatingForm a);

// Components in the dual frame ∂/∂θ^A.
using FrameVector = std::vector<double>;

FrameVector frame_basis_vector(int frame_dim, int index);

/// α∧β; value dims must be scalar×scalar, scalar×vector or vector×scalar.
AlternatingForm wedge(const AlternatingForm& alpha, const AlternatingForm& beta);

/// v ⌟ α, with (v⌟α)(w...) = α(v, w...). Throws for degree 0.
AlternatingForm interior(const FrameVector& v, const AlternatingForm& alpha);

/// θ^(N-k) with k fixed indices, built recursively by interior products of
/// the volume form: ∂_{A_k} ⌟ ... ⌟ ∂_{A_1} ⌟ θ^(N). Repeated indices give 0.
AlternatingForm epsilon_form(int frame_dim, std::span<const int> fixed_indices);
AlternatingForm epsilon_form(int frame_dim, std::initializer_list<int> fixed_indices);

/// Applies the odd degree-one derivation D of the exterior algebra determined
/// by D θ^B = images[B] (scalar 2-forms). This is how exterior derivatives of
/// θ-polynomials are evaluated when dθ^B is substituted by arbitrary 2-forms.
AlternatingForm apply_derivation(const AlternatingForm& alpha, std::span<const AlternatingForm> images);

/// [θ∧θ]^A = c^A_BC θ^B∧θ^C for a ĝ-valued 1-form (value dim N).
AlternatingForm lie_wedge_1(const liealg::LieAlgebraSpec& spec, const AlternatingForm& theta);

/// [φ∧φ]₂^AB = 2 h_{A'B'} φ^{AA'}∧φ^{B'B} for an so(ĝ,h)-valued 1-form whose
/// value slot A*N+B holds φ^{AB}. Throws InvalidInputError unless φ^{AB} = −φ^{BA}.
AlternatingForm lie_wedge_2(const liealg::LieAlgebraSpec& spec, const AlternatingForm& phi);

struct IdentityResult {
  std::string name;
  long long checks = 0;
  double max_residual = 0.0;
};

struct IdentityReport {
  int frame_dim = 0;
  bool exhaustive = false;
  std::vector<IdentityResult> identities;  // always five entries

  double max_residual() const;
  bool passed(double tol = 0.0) const { return max_residual() <= tol; }
};

/// Checks the five θ^(N-k) relations:
///   θ^A∧θ^(N-1)_A' = δ θ^(N)
///   θ^A∧θ^(N-2)_A'B' = δ^A_B' θ^(N-1)_A' − δ^A_A' θ^(N-1)_B'
///   θ^A∧θ^(N-3)_A'B'C' = δ^A_C' θ^(N-2)_A'B' + δ^A_B' θ^(N-2)_C'A' + δ^A_A' θ^(N-2)_B'C'
///   dθ^(N-1)_A = dθ^B∧θ^(N-2)_AB
///   dθ^(N-2)_AB = dθ^C∧θ^(N-3)_ABC
/// with dθ^B replaced by random integer 2-forms. For N <= 5 every index
/// choice is visited; otherwise `trials` random choices per identity.
/// Requires 3 <= N <= 8.
IdentityReport check_identities(int frame_dim, int trials, std::uint64_t seed);

}  // namespace kk::exterior
