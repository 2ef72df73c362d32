#pragma once

#include <random>

#include "qcr/quatlin.hpp"

namespace qcr::test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Vec gaussian(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal_(engine_);
    return v;
  }
  Vec unit(int n) { return gaussian(n).normalized(); }
  Mat matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j) m.col(j) = gaussian(rows);
    return m;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace qcr::test
