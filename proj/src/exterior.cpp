#include "kk/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "kk/error.hpp"

namespace kk::exterior {

namespace {

Mask bit(int i) { return Mask{1} << i; }

// Sign of θ^I ∧ θ^J relative to θ^{I∪J} (I, J disjoint): parity of the pairs
// (i in I, j in J) with i > j.
int merge_sign(Mask I, Mask J) {
  int swaps = 0;
  for (Mask rest = J; rest != 0; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    const Mask above = ~((Mask{2} << j) - 1);
    swaps += std::popcount(I & above);
  }
  return (swaps & 1) ? -1 : 1;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void require_same_frame(const AlternatingForm& a, const AlternatingForm& b) {
  if (a.frame_dim() != b.frame_dim()) {
    throw DimensionError("frame dimension mismatch: " + std::to_string(a.frame_dim()) + " vs " +
                         std::to_string(b.frame_dim()));
  }
}

// Residual of an identity as the largest coefficient of lhs − rhs.
double residual(const AlternatingForm& lhs, const AlternatingForm& rhs) { return (lhs - rhs).max_abs_coeff(); }

AlternatingForm random_two_form(int N, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  AlternatingForm out(N, 2);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double v = coeff(rng);
      if (v != 0.0) out.add_term(bit(i) | bit(j), std::span<const double>(&v, 1));
    }
  }
  return out;
}

std::vector<AlternatingForm> random_images(int N, std::mt19937_64& rng) {
  std::vector<AlternatingForm> images;
  images.reserve(N);
  for (int B = 0; B < N; ++B) images.push_back(random_two_form(N, rng));
  return images;
}

}  // namespace

AlternatingForm::AlternatingForm(int frame_dim, int degree, int value_dim)
    : frame_dim_(frame_dim), degree_(degree), value_dim_(value_dim) {
  if (frame_dim < 1 || frame_dim > kMaxFrameDim) {
    throw DimensionError("frame dimension must be in 1.." + std::to_string(kMaxFrameDim));
  }
  if (degree < 0) throw DimensionError("form degree must be nonnegative");
  if (value_dim < 1) throw DimensionError("value dimension must be positive");
}

AlternatingForm AlternatingForm::constant(int frame_dim, double value) {
  AlternatingForm f(frame_dim, 0);
  if (value != 0.0) f.coeffs_[0] = {value};
  return f;
}

AlternatingForm AlternatingForm::basis(int frame_dim, std::span<const int> indices, double coeff) {
  const int p = static_cast<int>(indices.size());
  AlternatingForm f(frame_dim, p);
  Mask mask = 0;
  int sign = 1;
  for (int idx : indices) {
    if (idx < 0 || idx >= frame_dim) throw DimensionError("frame index out of range");
    if (mask & bit(idx)) return f;
    sign *= merge_sign(mask, bit(idx));
    mask |= bit(idx);
  }
  if (coeff != 0.0) f.coeffs_[mask] = {sign * coeff};
  return f;
}

AlternatingForm AlternatingForm::basis(int frame_dim, std::initializer_list<int> indices, double coeff) {
  return basis(frame_dim, std::span<const int>(indices.begin(), indices.size()), coeff);
}

AlternatingForm AlternatingForm::volume(int frame_dim) {
  std::vector<int> all(frame_dim);
  for (int i = 0; i < frame_dim; ++i) all[i] = i;
  return basis(frame_dim, all);
}

std::vector<double> AlternatingForm::at(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != degree_) throw DimensionError("index count differs from form degree");
  Mask mask = 0;
  int sign = 1;
  for (int idx : indices) {
    if (idx < 0 || idx >= frame_dim_) throw DimensionError("frame index out of range");
    if (mask & bit(idx)) return std::vector<double>(value_dim_, 0.0);
    sign *= merge_sign(mask, bit(idx));
    mask |= bit(idx);
  }
  auto it = coeffs_.find(mask);
  if (it == coeffs_.end()) return std::vector<double>(value_dim_, 0.0);
  std::vector<double> out = it->second;
  for (double& x : out) x *= sign;
  return out;
}

double AlternatingForm::scalar_at(std::initializer_list<int> indices) const {
  if (value_dim_ != 1) throw DimensionError("scalar_at on a vector-valued form");
  return at(std::span<const int>(indices.begin(), indices.size()))[0];
}

void AlternatingForm::add_term(Mask mask, std::span<const double> value, double scale) {
  if (static_cast<int>(value.size()) != value_dim_) throw DimensionError("value dimension mismatch");
  if (std::popcount(mask) != degree_) throw DimensionError("multi-index length differs from form degree");
  auto& slot = coeffs_[mask];
  if (slot.empty()) slot.assign(value_dim_, 0.0);
  for (int k = 0; k < value_dim_; ++k) slot[k] += scale * value[k];
  prune(mask);
}

void AlternatingForm::prune(Mask mask) {
  auto it = coeffs_.find(mask);
  if (it != coeffs_.end() && all_zero(it->second)) coeffs_.erase(it);
}

AlternatingForm AlternatingForm::component(int k) const {
  if (k < 0 || k >= value_dim_) throw DimensionError("value component out of range");
  AlternatingForm out(frame_dim_, degree_);
  for (const auto& [mask, v] : coeffs_) {
    if (v[k] != 0.0) out.coeffs_[mask] = {v[k]};
  }
  return out;
}

AlternatingForm AlternatingForm::embed(int value_dim, int k) const {
  if (value_dim_ != 1) throw DimensionError("embed needs a scalar form");
  if (k < 0 || k >= value_dim) throw DimensionError("value component out of range");
  AlternatingForm out(frame_dim_, degree_, value_dim);
  for (const auto& [mask, v] : coeffs_) {
    std::vector<double> slot(value_dim, 0.0);
    slot[k] = v[0];
    out.coeffs_[mask] = std::move(slot);
  }
  return out;
}

AlternatingForm& AlternatingForm::operator+=(const AlternatingForm& other) {
  require_same_frame(*this, other);
  if (degree_ != other.degree_ || value_dim_ != other.value_dim_) throw DimensionError("adding incompatible forms");
  for (const auto& [mask, v] : other.coeffs_) add_term(mask, v);
  return *this;
}

AlternatingForm& AlternatingForm::operator-=(const AlternatingForm& other) {
  require_same_frame(*this, other);
  if (degree_ != other.degree_ || value_dim_ != other.value_dim_) throw DimensionError("subtracting incompatible forms");
  for (const auto& [mask, v] : other.coeffs_) add_term(mask, v, -1.0);
  return *this;
}

AlternatingForm& AlternatingForm::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [mask, v] : coeffs_) {
    for (double& x : v) x *= s;
  }
  return *this;
}

double AlternatingForm::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [mask, v] : coeffs_) {
    for (double x : v) m = std::max(m, std::abs(x));
  }
  return m;
}

std::string AlternatingForm::dump() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [mask, v] : coeffs_) {
    bool first = true;
    for (Mask rest = mask; rest != 0; rest &= rest - 1) {
      os << (first ? "" : " ") << std::countr_zero(rest) + 1;
      first = false;
    }
    os << " :";
    for (double x : v) os << ' ' << x;
    os << '\n';
  }
  return os.str();
}

bool AlternatingForm::operator==(const AlternatingForm& other) const {
  return frame_dim_ == other.frame_dim_ && degree_ == other.degree_ && value_dim_ == other.value_dim_ &&
         coeffs_ == other.coeffs_;
}

AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b) { return a += b; }
AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b) { return a -= b; }
AlternatingForm operator*(double s, AlternatingForm a) { return a *= s; }

FrameVector frame_basis_vector(int frame_dim, int index) {
  if (index < 0 || index >= frame_dim) throw DimensionError("frame index out of range");
  FrameVector v(frame_dim, 0.0);
  v[index] = 1.0;
  return v;
}

AlternatingForm wedge(const AlternatingForm& alpha, const AlternatingForm& beta) {
  require_same_frame(alpha, beta);
  const int N = alpha.frame_dim();
  const int ma = alpha.value_dim();
  const int mb = beta.value_dim();
  if (ma != 1 && mb != 1) throw DimensionError("wedge of two vector-valued forms is not defined");
  const int m = std::max(ma, mb);
  const int p = alpha.degree() + beta.degree();
  AlternatingForm out(N, p, m);
  if (p > N) return out;
  std::vector<double> prod(m);
  for (const auto& [I, va] : alpha.terms()) {
    for (const auto& [J, vb] : beta.terms()) {
      if (I & J) continue;
      const int sign = merge_sign(I, J);
      for (int k = 0; k < m; ++k) prod[k] = va[ma == 1 ? 0 : k] * vb[mb == 1 ? 0 : k];
      out.add_term(I | J, prod, sign);
    }
  }
  return out;
}

AlternatingForm interior(const FrameVector& v, const AlternatingForm& alpha) {
  const int N = alpha.frame_dim();
  if (static_cast<int>(v.size()) != N) throw DimensionError("frame vector dimension mismatch");
  if (alpha.degree() == 0) throw DimensionError("interior product of a 0-form");
  AlternatingForm out(N, alpha.degree() - 1, alpha.value_dim());
  for (const auto& [I, val] : alpha.terms()) {
    for (Mask rest = I; rest != 0; rest &= rest - 1) {
      const int k = std::countr_zero(rest);
      if (v[k] == 0.0) continue;
      const int below = std::popcount(I & (bit(k) - 1));
      const double sign = (below & 1) ? -1.0 : 1.0;
      out.add_term(I & ~bit(k), val, sign * v[k]);
    }
  }
  return out;
}

AlternatingForm epsilon_form(int frame_dim, std::span<const int> fixed_indices) {
  AlternatingForm form = AlternatingForm::volume(frame_dim);
  for (int idx : fixed_indices) form = interior(frame_basis_vector(frame_dim, idx), form);
  return form;
}

AlternatingForm epsilon_form(int frame_dim, std::initializer_list<int> fixed_indices) {
  return epsilon_form(frame_dim, std::span<const int>(fixed_indices.begin(), fixed_indices.size()));
}

AlternatingForm apply_derivation(const AlternatingForm& alpha, std::span<const AlternatingForm> images) {
  const int N = alpha.frame_dim();
  if (static_cast<int>(images.size()) != N) throw DimensionError("derivation needs one image per coframe element");
  for (const auto& img : images) {
    if (img.frame_dim() != N || img.degree() != 2 || img.value_dim() != 1) {
      throw DimensionError("derivation images must be scalar 2-forms in the same frame");
    }
  }
  const int p = alpha.degree();
  AlternatingForm out(N, p + 1, alpha.value_dim());
  if (p + 1 > N) return out;
  for (const auto& [I, val] : alpha.terms()) {
    std::vector<int> idx;
    for (Mask rest = I; rest != 0; rest &= rest - 1) idx.push_back(std::countr_zero(rest));
    AlternatingForm term(N, p + 1);
    for (int j = 0; j < p; ++j) {
      const auto prefix = AlternatingForm::basis(N, std::span<const int>(idx.data(), j));
      const auto suffix = AlternatingForm::basis(N, std::span<const int>(idx.data() + j + 1, p - j - 1));
      auto piece = wedge(wedge(prefix, images[idx[j]]), suffix);
      if (j & 1) piece *= -1.0;
      term += piece;
    }
    for (const auto& [mask, coeff] : term.terms()) out.add_term(mask, val, coeff[0]);
  }
  return out;
}

AlternatingForm lie_wedge_1(const liealg::LieAlgebraSpec& spec, const AlternatingForm& theta) {
  const int N = spec.dim();
  if (theta.value_dim() != N || theta.degree() != 1) {
    throw DimensionError("lie_wedge_1 expects a 1-form with values in the N-dimensional algebra");
  }
  const int F = theta.frame_dim();
  std::vector<AlternatingForm> comp;
  comp.reserve(N);
  for (int B = 0; B < N; ++B) comp.push_back(theta.component(B));
  AlternatingForm out(F, 2, N);
  for (int B = 0; B < N; ++B) {
    if (comp[B].is_zero()) continue;
    for (int C = 0; C < N; ++C) {
      if (comp[C].is_zero()) continue;
      const AlternatingForm bc = wedge(comp[B], comp[C]);
      if (bc.is_zero()) continue;
      for (int A = 0; A < N; ++A) {
        const double cabc = spec.c(A, B, C);
        if (cabc != 0.0) out += cabc * bc.embed(N, A);
      }
    }
  }
  return out;
}

AlternatingForm lie_wedge_2(const liealg::LieAlgebraSpec& spec, const AlternatingForm& phi) {
  const int N = spec.dim();
  if (phi.value_dim() != N * N || phi.degree() != 1) {
    throw DimensionError("lie_wedge_2 expects a 1-form with N*N values");
  }
  const int F = phi.frame_dim();
  std::vector<AlternatingForm> comp;
  comp.reserve(N * N);
  for (int k = 0; k < N * N; ++k) comp.push_back(phi.component(k));
  for (int A = 0; A < N; ++A) {
    for (int B = A; B < N; ++B) {
      if (!(comp[A * N + B] + comp[B * N + A]).is_zero()) {
        throw InvalidInputError("so-valued form is not antisymmetric at (" + std::to_string(A + 1) + "," +
                                std::to_string(B + 1) + ")");
      }
    }
  }
  const auto& h = spec.h();
  AlternatingForm out(F, 2, N * N);
  for (int A = 0; A < N; ++A) {
    for (int Ap = 0; Ap < N; ++Ap) {
      const auto& left = comp[A * N + Ap];
      if (left.is_zero()) continue;
      for (int Bp = 0; Bp < N; ++Bp) {
        if (h(Ap, Bp) == 0.0) continue;
        for (int B = 0; B < N; ++B) {
          const auto& right = comp[Bp * N + B];
          if (right.is_zero()) continue;
          out += (2.0 * h(Ap, Bp)) * wedge(left, right).embed(N * N, A * N + B);
        }
      }
    }
  }
  return out;
}

double IdentityReport::max_residual() const {
  double m = 0.0;
  for (const auto& id : identities) m = std::max(m, id.max_residual);
  return m;
}

IdentityReport check_identities(int frame_dim, int trials, std::uint64_t seed) {
  const int N = frame_dim;
  if (N < 3 || N > 8) throw DimensionError("identity suite needs 3 <= N <= 8");
  if (trials < 0) throw DimensionError("trial count must be nonnegative");

  IdentityReport report;
  report.frame_dim = N;
  report.exhaustive = N <= 5;
  report.identities = {{"theta^A wedge theta^(N-1)"},
                       {"theta^A wedge theta^(N-2)"},
                       {"theta^A wedge theta^(N-3)"},
                       {"d theta^(N-1)"},
                       {"d theta^(N-2)"}};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, N - 1);

  const auto vol = AlternatingForm::volume(N);
  // Cache θ^(N-1)_A and θ^(N-2)_AB; they appear on both sides.
  std::vector<AlternatingForm> e1;
  for (int A = 0; A < N; ++A) e1.push_back(epsilon_form(N, {A}));
  std::vector<AlternatingForm> e2;
  for (int A = 0; A < N; ++A) {
    for (int B = 0; B < N; ++B) e2.push_back(epsilon_form(N, {A, B}));
  }
  auto theta = [N](int A) { return AlternatingForm::basis(N, {A}); };
  auto delta = [](int x, int y) { return x == y ? 1.0 : 0.0; };

  auto record = [&report](int which, double r) {
    auto& id = report.identities[which];
    ++id.checks;
    id.max_residual = std::max(id.max_residual, r);
  };

  auto id1 = [&](int A, int Ap) { record(0, residual(wedge(theta(A), e1[Ap]), delta(A, Ap) * vol)); };
  auto id2 = [&](int A, int Ap, int Bp) {
    const auto rhs = delta(A, Bp) * e1[Ap] - delta(A, Ap) * e1[Bp];
    record(1, residual(wedge(theta(A), e2[Ap * N + Bp]), rhs));
  };
  auto id3 = [&](int A, int Ap, int Bp, int Cp) {
    const auto lhs = wedge(theta(A), epsilon_form(N, {Ap, Bp, Cp}));
    const auto rhs = delta(A, Cp) * e2[Ap * N + Bp] + delta(A, Bp) * e2[Cp * N + Ap] + delta(A, Ap) * e2[Bp * N + Cp];
    record(2, residual(lhs, rhs));
  };
  auto id4 = [&](int A) {
    const auto images = random_images(N, rng);
    AlternatingForm rhs(N, N);
    for (int B = 0; B < N; ++B) rhs += wedge(images[B], e2[A * N + B]);
    record(3, residual(apply_derivation(e1[A], images), rhs));
  };
  auto id5 = [&](int A, int B) {
    const auto images = random_images(N, rng);
    AlternatingForm rhs(N, N - 1);
    for (int C = 0; C < N; ++C) rhs += wedge(images[C], epsilon_form(N, {A, B, C}));
    record(4, residual(apply_derivation(e2[A * N + B], images), rhs));
  };

  if (report.exhaustive) {
    for (int A = 0; A < N; ++A) {
      id4(A);
      for (int Ap = 0; Ap < N; ++Ap) {
        id1(A, Ap);
        id5(A, Ap);
        for (int Bp = 0; Bp < N; ++Bp) {
          id2(A, Ap, Bp);
          for (int Cp = 0; Cp < N; ++Cp) id3(A, Ap, Bp, Cp);
        }
      }
    }
  }
  // Random index choices; added on top of the exhaustive sweep when N is small.
  for (int t = 0; t < trials; ++t) {
    const int A = pick(rng), Ap = pick(rng), Bp = pick(rng), Cp = pick(rng);
    id1(A, Ap);
    id2(A, Ap, Bp);
    id3(A, Ap, Bp, Cp);
    id4(A);
    id5(Ap, Bp);
  }
  return report;
}

}  // namespace kk::exterior
