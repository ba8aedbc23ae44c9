#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kk {

// Dense row-major array of fixed rank with runtime extents. Used for the
// small index-heavy objects (structure constants, connection coefficients,
// curvature components) where N stays at desk scale.
template <class T, std::size_t Rank>
class Tensor {
 public:
  using Extents = std::array<int, Rank>;

  Tensor() { extents_.fill(0); }

  explicit Tensor(const Extents& extents, const T& fill = T{}) : extents_(extents) {
    std::size_t total = 1;
    for (int e : extents_) total *= static_cast<std::size_t>(e);
    data_.assign(total, fill);
  }

  template <class... I>
  T& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  template <class... I>
  const T& operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  int extent(std::size_t axis) const { return extents_[axis]; }
  const Extents& extents() const { return extents_; }
  std::size_t size() const { return data_.size(); }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t offset(const std::array<int, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < Rank; ++k) {
      assert(idx[k] >= 0 && idx[k] < extents_[k]);
      off = off * static_cast<std::size_t>(extents_[k]) + static_cast<std::size_t>(idx[k]);
    }
    return off;
  }

  Extents extents_;
  std::vector<T> data_;
};

using Tensor2 = Tensor<double, 2>;
using Tensor3 = Tensor<double, 3>;
using Tensor4 = Tensor<double, 4>;

// Largest |a - b| over two equally shaped tensors.
template <std::size_t Rank>
double max_abs_diff(const Tensor<double, Rank>& a, const Tensor<double, Rank>& b) {
  assert(a.extents() == b.extents());
  double m = 0.0;
  auto fa = a.flat();
  auto fb = b.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) m = std::max(m, std::abs(fa[i] - fb[i]));
  return m;
}

template <std::size_t Rank>
double max_abs(const Tensor<double, Rank>& a) {
  double m = 0.0;
  for (double v : a.flat()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace kk
