#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

#include "oracles.hpp"

#include "kk/error.hpp"
#include "kk/exterior.hpp"
#include "kk/liealg.hpp"

using namespace kk;
using exterior::AlternatingForm;
using exterior::Mask;

namespace {

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (m & (Mask{1} << i)) out.push_back(i);
  return out;
}

Mask to_mask(const std::vector<int>& idx) {
  Mask m = 0;
  for (int i : idx) m |= Mask{1} << i;
  return m;
}

// Fully antisymmetric component of a scalar form, from the stored increasing
// coefficient and an explicitly computed sorting sign.
double component(const AlternatingForm& f, const std::vector<int>& idx) {
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return 0.0;
  auto it = f.terms().find(to_mask(sorted));
  if (it == f.terms().end()) return 0.0;
  return oracle::permutation_sign(idx) * it->second[0];
}

std::vector<std::vector<int>> subsets(int N, int k) {
  std::vector<std::vector<int>> out;
  for (Mask m = 0; m < (Mask{1} << N); ++m) {
    if (std::popcount(m) == k) out.push_back(mask_indices(m));
  }
  return out;
}

AlternatingForm random_form(std::mt19937_64& rng, int N, int p) {
  std::uniform_int_distribution<int> d(-3, 3);
  AlternatingForm f(N, p);
  for (const auto& s : subsets(N, p)) {
    const double v = d(rng);
    if (v != 0.0) f.add_term(to_mask(s), std::vector<double>{v});
  }
  return f;
}

double factorial(int k) { return k <= 1 ? 1.0 : k * factorial(k - 1); }

// (α∧β)_K = 1/(p! q!) Σ_σ sgn(σ) α_{σ(K)_1..p} β_{σ(K)_p+1..}
AlternatingForm wedge_oracle(const AlternatingForm& a, const AlternatingForm& b) {
  const int N = a.frame_dim(), p = a.degree(), q = b.degree();
  AlternatingForm out(N, p + q);
  if (p + q > N) return out;
  for (auto K : subsets(N, p + q)) {
    std::vector<int> perm = K;
    double s = 0.0;
    do {
      std::vector<int> left(perm.begin(), perm.begin() + p), right(perm.begin() + p, perm.end());
      s += oracle::permutation_sign(perm) * component(a, left) * component(b, right);
    } while (std::next_permutation(perm.begin(), perm.end()));
    s /= factorial(p) * factorial(q);
    if (s != 0.0) out.add_term(to_mask(K), std::vector<double>{s});
  }
  return out;
}

double diff(const AlternatingForm& a, const AlternatingForm& b) { return (a - b).max_abs_coeff(); }

}  // namespace

TEST(Exterior, WedgeMatchesPermutationSum) {
  std::mt19937_64 rng(3);
  for (int N = 2; N <= 6; ++N) {
    for (int p = 0; p <= N; ++p) {
      for (int q = 0; p + q <= N; ++q) {
        auto a = random_form(rng, N, p);
        auto b = random_form(rng, N, q);
        EXPECT_EQ(diff(exterior::wedge(a, b), wedge_oracle(a, b)), 0.0) << N << " " << p << " " << q;
      }
    }
  }
}

TEST(Exterior, WedgeAssociativeAndGradedCommutative) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 3 + trial % 4;
    const int p = trial % 3, q = (trial / 3) % 2 + 1, r = 1;
    auto a = random_form(rng, N, p), b = random_form(rng, N, q), c = random_form(rng, N, r);
    EXPECT_EQ(diff(exterior::wedge(exterior::wedge(a, b), c), exterior::wedge(a, exterior::wedge(b, c))), 0.0);
    const double sign = (p * q) % 2 ? -1.0 : 1.0;
    EXPECT_EQ(diff(exterior::wedge(a, b), sign * exterior::wedge(b, a)), 0.0);
  }
}

TEST(Exterior, InteriorMatchesComponents) {
  std::mt19937_64 rng(5);
  for (int N = 2; N <= 6; ++N) {
    for (int p = 1; p <= N; ++p) {
      auto a = random_form(rng, N, p);
      exterior::FrameVector v(N);
      for (auto& x : v) x = static_cast<double>(static_cast<int>(rng() % 7) - 3);
      auto iv = exterior::interior(v, a);
      for (auto K : subsets(N, p - 1)) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
          std::vector<int> idx{i};
          idx.insert(idx.end(), K.begin(), K.end());
          s += v[i] * component(a, idx);
        }
        EXPECT_EQ(component(iv, K), s);
      }
    }
  }
}

TEST(Exterior, InteriorIsAntiderivation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 4;
    const int p = 1 + trial % 2, q = 1 + (trial / 2) % 2;
    auto a = random_form(rng, N, p), b = random_form(rng, N, q);
    auto v = exterior::frame_basis_vector(N, trial % N);
    auto lhs = exterior::interior(v, exterior::wedge(a, b));
    auto rhs = exterior::wedge(exterior::interior(v, a), b);
    auto second = exterior::wedge(a, exterior::interior(v, b));
    if (p % 2) second *= -1.0;
    rhs += second;
    EXPECT_EQ(diff(lhs, rhs), 0.0);
  }
  EXPECT_THROW(exterior::interior(exterior::frame_basis_vector(3, 0), AlternatingForm::constant(3, 1.0)), Error);
}

TEST(Exterior, EpsilonFormsAreLeviCivita) {
  for (int N = 3; N <= 5; ++N) {
    for (int k = 0; k <= 3; ++k) {
      std::vector<int> fixed(k);
      for (int trial = 0; trial < 20; ++trial) {
        for (int i = 0; i < k; ++i) fixed[i] = (trial * (i + 3) + i) % N;
        auto eps = exterior::epsilon_form(N, fixed);
        EXPECT_EQ(eps.degree(), N - k);
        for (const auto& [mask, value] : eps.terms()) {
          EXPECT_TRUE(value[0] == 1.0 || value[0] == -1.0);
        }
        for (auto B : subsets(N, N - k)) {
          std::vector<int> all = fixed;
          all.insert(all.end(), B.begin(), B.end());
          EXPECT_EQ(component(eps, B), oracle::levi_civita_symbol(all, N));
        }
      }
    }
  }
}

TEST(Exterior, IdentitySuite) {
  for (int N = 3; N <= 8; ++N) {
    auto report = exterior::check_identities(N, N <= 5 ? 0 : 500, 11);
    EXPECT_EQ(report.exhaustive, N <= 5);
    ASSERT_EQ(report.identities.size(), 5u);
    for (const auto& id : report.identities) EXPECT_GT(id.checks, 0) << id.name;
    EXPECT_LE(report.max_residual(), 1e-12) << "N=" << N;
  }
  EXPECT_THROW(exterior::check_identities(2, 10, 1), Error);
}

// The first identity with the wrong contraction sign must be caught, so the
// suite has teeth.
TEST(Exterior, MutatedIdentityFails) {
  const int N = 4;
  double worst = 0.0;
  for (int A = 0; A < N; ++A) {
    for (int B = 0; B < N; ++B) {
      auto lhs = exterior::wedge(AlternatingForm::basis(N, {A}), exterior::epsilon_form(N, {B}));
      auto wrong = AlternatingForm::volume(N);
      wrong *= (A == B ? -1.0 : 0.0);
      worst = std::max(worst, diff(lhs, wrong));
      auto right = AlternatingForm::volume(N);
      right *= (A == B ? 1.0 : 0.0);
      EXPECT_EQ(diff(lhs, right), 0.0);
    }
  }
  EXPECT_GT(worst, 0.5);
}

TEST(Exterior, DerivationOfBasis) {
  const int N = 3;
  std::vector<AlternatingForm> images;
  for (int B = 0; B < N; ++B) images.push_back(AlternatingForm::basis(N, {(B + 1) % N, (B + 2) % N}));
  // D(θ^0∧θ^1) = Dθ^0∧θ^1 − θ^0∧Dθ^1
  auto d = exterior::apply_derivation(AlternatingForm::basis(N, {0, 1}), images);
  auto expected = exterior::wedge(images[0], AlternatingForm::basis(N, {1})) -
                  exterior::wedge(AlternatingForm::basis(N, {0}), images[1]);
  EXPECT_EQ(diff(d, expected), 0.0);
}

TEST(Exterior, LieWedgeSu2) {
  auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, 0, 3, Eigen::MatrixXd(0, 0), Eigen::MatrixXd::Identity(3, 3));
  // θ = θ^A t_A: [θ∧θ]^A = c^A_BC θ^B∧θ^C = 2 ε_ABC θ^B∧θ^C over B<C.
  AlternatingForm theta(3, 1, 3);
  for (int A = 0; A < 3; ++A) {
    std::vector<double> v(3, 0.0);
    v[A] = 1.0;
    theta.add_term(Mask{1} << A, v);
  }
  auto w = exterior::lie_wedge_1(spec, theta);
  EXPECT_EQ(w.component(2).scalar_at({0, 1}), 2.0);
  EXPECT_EQ(w.component(0).scalar_at({1, 2}), 2.0);
  EXPECT_EQ(w.component(1).scalar_at({0, 1}), 0.0);
}
