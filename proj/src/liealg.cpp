#include "kk/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kk/error.hpp"

namespace kk::liealg {

namespace {

std::optional<Eigen::MatrixXd> try_inverse(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) return std::nullopt;
  return lu.inverse();
}

// Tracks the largest violations of one invariant while scanning index tuples.
class ViolationCollector {
 public:
  ViolationCollector(std::string name, double tol) : tol_(tol) { check_.name = std::move(name); }

  void observe(double magnitude, std::vector<int> idx) {
    magnitude = std::abs(magnitude);
    if (magnitude <= tol_) return;
    check_.passed = false;
    if (magnitude > check_.max_violation) {
      check_.max_violation = magnitude;
      check_.offending.insert(check_.offending.begin(), std::move(idx));
    } else if (check_.offending.size() < kKeep) {
      check_.offending.push_back(std::move(idx));
    }
    if (check_.offending.size() > kKeep) check_.offending.pop_back();
  }

  void note_magnitude(double magnitude) { check_.max_violation = std::max(check_.max_violation, std::abs(magnitude)); }

  InvariantCheck finish(const std::string& index_label) {
    std::ostringstream os;
    if (check_.passed) {
      os << check_.name << ": ok";
    } else {
      os << check_.name << ": violated (max " << check_.max_violation << ") at " << index_label << "=(";
      const auto& idx = check_.offending.front();
      for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i] + 1;
      os << ")";
    }
    check_.message = os.str();
    return check_;
  }

 private:
  static constexpr std::size_t kKeep = 8;
  double tol_;
  InvariantCheck check_;
};

Signature classify(const Eigen::MatrixXd& m, double tol) {
  Signature s;
  if (m.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    const double ev = eig.eigenvalues()(i);
    if (ev > tol) {
      ++s.positive;
    } else if (ev < -tol) {
      ++s.negative;
    } else {
      ++s.zero;
    }
  }
  if (s.zero > 0) {
    s.kind = SignatureClass::Degenerate;
  } else if (s.negative == 0) {
    s.kind = SignatureClass::PositiveDefinite;
  } else if (s.positive == 0) {
    s.kind = SignatureClass::NegativeDefinite;
  } else {
    s.kind = SignatureClass::Indefinite;
  }
  return s;
}

void require_symmetric(const Eigen::MatrixXd& m, int size, const char* label) {
  if (m.rows() != size || m.cols() != size) {
    throw InvalidInputError(std::string(label) + " must be " + std::to_string(size) + "x" + std::to_string(size));
  }
  if (size > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw InvalidInputError(std::string(label) + " is not symmetric");
  }
}

}  // namespace

LieAlgebraSpec::LieAlgebraSpec(int n, int r, Tensor3 c, Eigen::MatrixXd h, std::vector<std::string> names)
    : n_(n), r_(r), c_(std::move(c)), h_(std::move(h)), names_(std::move(names)) {
  if (n < 0 || r < 0 || n + r == 0) throw DimensionError("algebra dimensions must satisfy n, r >= 0 and n + r > 0");
  const int N = n + r;
  if (c_.extent(0) != N || c_.extent(1) != N || c_.extent(2) != N) {
    throw DimensionError("structure constants must be " + std::to_string(N) + "x" + std::to_string(N) + "x" +
                         std::to_string(N));
  }
  if (h_.rows() != N || h_.cols() != N) {
    throw DimensionError("metric h must be " + std::to_string(N) + "x" + std::to_string(N));
  }
  if (!names_.empty() && static_cast<int>(names_.size()) != N) {
    throw DimensionError("basis labels must have length " + std::to_string(N));
  }
  h_inv_ = try_inverse(h_);
  b_inv_ = try_inverse(b());
  k_inv_ = try_inverse(k());
}

const Eigen::MatrixXd& LieAlgebraSpec::h_inv() const {
  if (!h_inv_) throw DegenerateMetricError("metric h is singular");
  return *h_inv_;
}

const Eigen::MatrixXd& LieAlgebraSpec::b_inv() const {
  if (!b_inv_) throw DegenerateMetricError("metric block b is singular");
  return *b_inv_;
}

const Eigen::MatrixXd& LieAlgebraSpec::k_inv() const {
  if (!k_inv_) throw DegenerateMetricError("metric block k is singular");
  return *k_inv_;
}

std::string to_string(SignatureClass kind) {
  switch (kind) {
    case SignatureClass::PositiveDefinite: return "positive-definite";
    case SignatureClass::NegativeDefinite: return "negative-definite";
    case SignatureClass::Indefinite: return "indefinite";
    case SignatureClass::Degenerate: return "degenerate";
    case SignatureClass::Empty: return "empty";
  }
  return "unknown";
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

const InvariantCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no invariant named " + name);
}

ValidationReport validate_spec(const LieAlgebraSpec& spec, double tol) {
  const int N = spec.dim();
  const int n = spec.n();
  const auto& h = spec.h();
  const auto& c = spec.structure_constants();
  if (c.extent(0) != N || h.rows() != N) throw DimensionError("spec arrays are inconsistent with N");

  const double det = h.determinant();
  if (std::abs(det) <= tol) {
    throw DegenerateMetricError("metric h is degenerate (|det h| = " + std::to_string(std::abs(det)) + ")");
  }

  ValidationReport report;

  ViolationCollector antisym("antisymmetry", tol);
  ViolationCollector block("central_block", tol);
  for (int A = 0; A < N; ++A) {
    for (int B = 0; B < N; ++B) {
      for (int C = 0; C < N; ++C) {
        antisym.observe(c(A, B, C) + c(A, C, B), {A, B, C});
        const bool all_g = A >= n && B >= n && C >= n;
        if (!all_g) block.observe(c(A, B, C), {A, B, C});
      }
    }
  }

  ViolationCollector jacobi("jacobi", tol);
  ViolationCollector adinv("ad_invariance", tol);
  for (int A = 0; A < N; ++A) {
    for (int B = 0; B < N; ++B) {
      for (int C = 0; C < N; ++C) {
        for (int E = 0; E < N; ++E) {
          double s = 0.0;
          for (int D = 0; D < N; ++D) {
            s += c(E, D, A) * c(D, B, C) + c(E, D, B) * c(D, C, A) + c(E, D, C) * c(D, A, B);
          }
          jacobi.observe(s, {A, B, C, E});
        }
        double s = 0.0;
        for (int D = 0; D < N; ++D) s += c(D, A, B) * h(D, C) + c(D, A, C) * h(B, D);
        adinv.observe(s, {A, B, C});
      }
    }
  }

  ViolationCollector ortho("block_orthogonality", tol);
  for (int a = 0; a < n; ++a) {
    for (int beta = n; beta < N; ++beta) {
      ortho.observe(h(a, beta), {a, beta});
      ortho.observe(h(beta, a), {beta, a});
    }
  }

  ViolationCollector nondeg("nondegenerate_metric", tol);
  nondeg.note_magnitude(0.0);

  report.checks.push_back(antisym.finish("(A,B,C)"));
  report.checks.push_back(jacobi.finish("(A,B,C,E)"));
  report.checks.push_back(block.finish("(A,B,C)"));
  report.checks.push_back(adinv.finish("(A,B,C)"));
  report.checks.push_back(ortho.finish("(A,B)"));
  auto nd = nondeg.finish("");
  nd.message = "nondegenerate_metric: ok (|det h| = " + std::to_string(std::abs(det)) + ")";
  report.checks.push_back(nd);

  double uni = 0.0;
  for (int gamma = n; gamma < N; ++gamma) {
    double s = 0.0;
    for (int alpha = n; alpha < N; ++alpha) s += c(alpha, gamma, alpha);
    uni = std::max(uni, std::abs(s));
  }
  report.unimodular_violation = uni;
  report.unimodular = uni <= tol;
  report.b_signature = classify(spec.b(), tol);
  report.k_signature = classify(spec.k(), tol);
  return report;
}

Eigen::VectorXd bracket(const LieAlgebraSpec& spec, const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) {
  const int N = spec.dim();
  if (xi.size() != N || eta.size() != N) throw DimensionError("bracket arguments must have length N");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  for (int A = 0; A < N; ++A) {
    double s = 0.0;
    for (int B = 0; B < N; ++B) {
      if (xi(B) == 0.0) continue;
      for (int C = 0; C < N; ++C) s += spec.c(A, B, C) * xi(B) * eta(C);
    }
    out(A) = s;
  }
  return out;
}

Eigen::MatrixXd adjoint_matrix(const LieAlgebraSpec& spec, const Eigen::VectorXd& xi) {
  const int N = spec.dim();
  if (xi.size() != N) throw DimensionError("adjoint_matrix argument must have length N");
  Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(N, N);
  for (int A = 0; A < N; ++A) {
    for (int C = 0; C < N; ++C) {
      double s = 0.0;
      for (int B = 0; B < N; ++B) s += spec.c(A, B, C) * xi(B);
      ad(A, C) = s;
    }
  }
  return ad;
}

Eigen::MatrixXd killing_form(const LieAlgebraSpec& spec) {
  const int n = spec.n();
  const int r = spec.r();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(r, r);
  for (int g = 0; g < r; ++g) {
    for (int e = 0; e < r; ++e) {
      double s = 0.0;
      for (int al = 0; al < r; ++al) {
        for (int be = 0; be < r; ++be) s += spec.c(n + al, n + be, n + g) * spec.c(n + be, n + al, n + e);
      }
      K(g, e) = s;
    }
  }
  return K;
}

double cosmological_constant(const LieAlgebraSpec& spec) {
  if (spec.r() == 0) return 0.0;
  const Eigen::MatrixXd K = killing_form(spec);
  const Eigen::MatrixXd& kinv = spec.k_inv();
  return kCosmologicalSign * (K.cwiseProduct(kinv).sum()) / 8.0;
}

LieAlgebraSpec builtin_algebra(Builtin which, int n, int r, const Eigen::MatrixXd& b, const Eigen::MatrixXd& k) {
  if (n < 0) throw InvalidInputError("n must be nonnegative");
  int g_dim = 0;
  switch (which) {
    case Builtin::Abelian: g_dim = r; break;
    case Builtin::Su2: g_dim = 3; break;
    case Builtin::U1Su2: g_dim = 4; break;
  }
  if (g_dim < 0) throw InvalidInputError("r must be nonnegative");
  require_symmetric(b, n, "b");
  require_symmetric(k, g_dim, "k");

  const int N = n + g_dim;
  Tensor3 c({N, N, N}, 0.0);
  const int su2_offset = which == Builtin::U1Su2 ? n + 1 : n;
  if (which != Builtin::Abelian) {
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      const int l = (i + 2) % 3;
      // [t_j, t_l] = t_i for cyclic (i, j, l)
      c(su2_offset + i, su2_offset + j, su2_offset + l) = 1.0;
      c(su2_offset + i, su2_offset + l, su2_offset + j) = -1.0;
    }
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
  h.topLeftCorner(n, n) = b;
  h.bottomRightCorner(g_dim, g_dim) = k;

  LieAlgebraSpec spec(n, g_dim, std::move(c), std::move(h));
  const ValidationReport report = validate_spec(spec);
  if (!report.ok()) {
    for (const auto& chk : report.checks) {
      if (!chk.passed) throw InvalidInputError("builtin algebra rejected: " + chk.message);
    }
  }
  return spec;
}

}  // namespace kk::liealg
