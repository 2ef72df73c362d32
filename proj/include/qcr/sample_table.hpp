#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qcr/crgeom.hpp"

namespace qcr {

struct TableOptions {
  FdScheme scheme;
  double rank_tol = 1e-8;
  std::uint64_t seed = 0;
  int random_vectors = 20;
  /// Throw on a non-CR point or a rank change instead of recording it.
  bool strict = true;
  /// Also store the intrinsic curvature tensor of every point.
  bool curvature = false;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Everything the predicates read at one sample point.
struct SamplePoint {
  int index = 0;
  Vec u;
  PointGeometry pg;
  CRDecomposition dec;
  DistributionJet jet;
  Mat P_T, P_N, P_D, P_Dperp, P_mu, P_mu_perp;
  /// frame[0]: quaternionic frame of D, frame[1]: orthonormal basis of Dperp.
  std::array<std::vector<Vec>, 2> frame;
  /// Seeded random unit vectors of D and Dperp.
  std::array<std::vector<Vec>, 2> random;
  std::vector<Vec> mu_frame, mu_random, mu_perp_frame, mu_perp_random;
  std::optional<Tensor4> riemann;

  const std::vector<Vec>& frame_of(Distribution d) const { return frame[d == Distribution::D ? 0 : 1]; }
  const std::vector<Vec>& random_of(Distribution d) const { return random[d == Distribution::D ? 0 : 1]; }
  const Mat& projector(Distribution d) const { return d == Distribution::D ? P_D : P_Dperp; }
};

/// Seeded standard normals. The uniform and Box-Muller steps are written out
/// so the stream does not depend on the standard library's distributions.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed);
  double uniform();
  double normal();
  /// Unit vector uniformly distributed in the span of `basis`.
  Vec unit_in(const Mat& basis);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Immutable per-point cache of geometry and CR data for a scenario.
class CrSampleTable {
 public:
  static CrSampleTable build(const ChartedSubmanifold& sub, const AmbientSpace& space, const TableOptions& options = {});

  const ChartedSubmanifold& submanifold() const noexcept { return sub_; }
  const AmbientSpace& space() const noexcept { return space_; }
  const TableOptions& options() const noexcept { return options_; }
  const std::vector<SamplePoint>& points() const noexcept { return points_; }

  int rank_D() const noexcept { return rank_D_; }
  int rank_Dperp() const noexcept { return rank_Dperp_; }
  bool constant_ranks() const noexcept { return constant_ranks_; }
  bool is_cr() const noexcept { return is_cr_; }
  double worst_totally_real_residual() const noexcept { return worst_totally_real_; }
  double worst_invariance_residual() const noexcept { return worst_invariance_; }
  bool mu_vanishes() const noexcept { return mu_zero_; }

 private:
  CrSampleTable(ChartedSubmanifold sub, AmbientSpace space, TableOptions options)
      : sub_(std::move(sub)), space_(std::move(space)), options_(options) {}

  ChartedSubmanifold sub_;
  AmbientSpace space_;
  TableOptions options_;
  std::vector<SamplePoint> points_;
  int rank_D_ = 0;
  int rank_Dperp_ = 0;
  bool constant_ranks_ = true;
  bool is_cr_ = true;
  bool mu_zero_ = true;
  double worst_totally_real_ = 0.0;
  double worst_invariance_ = 0.0;
};

}  // namespace qcr
