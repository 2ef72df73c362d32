#pragma once

#include <cstddef>
#include <vector>

namespace qcr {

/// Dense rank-3 array with row-major indexing.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0 * d1 * d2), 0.0) {}

  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  int dim(int axis) const noexcept { return axis == 0 ? d0_ : axis == 1 ? d1_ : d2_; }

 private:
  std::size_t index(int i, int j, int k) const { return static_cast<std::size_t>((i * d1_ + j) * d2_ + k); }

  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

/// k^4 array for curvature tensors.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int k) : k_(k), data_(static_cast<std::size_t>(k * k * k * k), 0.0) {}

  double& operator()(int i, int j, int a, int b) { return data_[index(i, j, a, b)]; }
  double operator()(int i, int j, int a, int b) const { return data_[index(i, j, a, b)]; }

  int dim() const noexcept { return k_; }

 private:
  std::size_t index(int i, int j, int a, int b) const { return static_cast<std::size_t>(((i * k_ + j) * k_ + a) * k_ + b); }

  int k_ = 0;
  std::vector<double> data_;
};

}  // namespace qcr
