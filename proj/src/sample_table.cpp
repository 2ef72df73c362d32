#include "qcr/sample_table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "qcr/error.hpp"

namespace qcr {

NormalSampler::NormalSampler(std::uint64_t seed) : engine_(seed) {}

double NormalSampler::uniform() {
  // 53 random bits mapped into (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSampler::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

Vec NormalSampler::unit_in(const Mat& basis) {
  Vec g(basis.cols());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal();
  return (basis * g).normalized();
}

namespace {

std::uint64_t point_seed(std::uint64_t seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Vec> basis_vectors(const Subspace& s) {
  std::vector<Vec> out;
  for (int i = 0; i < s.rank(); ++i) out.push_back(s.vector(i));
  return out;
}

std::vector<Vec> random_vectors(NormalSampler& rng, const Subspace& s, int count) {
  std::vector<Vec> out;
  if (s.rank() == 0) return out;
  for (int i = 0; i < count; ++i) out.push_back(rng.unit_in(s.basis()));
  return out;
}

SamplePoint build_point(const ChartedSubmanifold& sub, const AmbientSpace& space, const TableOptions& opt, int index) {
  SamplePoint sp;
  sp.index = index;
  sp.u = sub.sample_points[static_cast<std::size_t>(index)];
  sp.pg = point_geometry(sub, space, sp.u, opt.scheme);
  sp.dec = decomposition_at(sub, space, sp.u, opt.scheme, opt.rank_tol);
  sp.jet = distribution_jet(sub, space, sp.u, opt.scheme, opt.rank_tol);
  sp.P_T = sp.pg.tangent_projector();
  sp.P_N = sp.pg.normal_projector();
  sp.P_D = sp.dec.D.projector();
  sp.P_Dperp = sp.dec.Dperp.projector();
  sp.P_mu = sp.dec.mu.projector();
  sp.P_mu_perp = sp.dec.mu_perp.projector();
  sp.frame[0] = quaternionic_frame(sp.dec.D, space.triple);
  sp.frame[1] = basis_vectors(sp.dec.Dperp);
  sp.mu_frame = basis_vectors(sp.dec.mu);
  sp.mu_perp_frame = basis_vectors(sp.dec.mu_perp);
  NormalSampler rng(point_seed(opt.seed, index));
  sp.random[0] = random_vectors(rng, sp.dec.D, opt.random_vectors);
  sp.random[1] = random_vectors(rng, sp.dec.Dperp, opt.random_vectors);
  sp.mu_random = random_vectors(rng, sp.dec.mu, opt.random_vectors);
  sp.mu_perp_random = random_vectors(rng, sp.dec.mu_perp, opt.random_vectors);
  if (opt.curvature) sp.riemann = riemann_tensor(sub, sp.u, opt.scheme);
  return sp;
}

}  // namespace

CrSampleTable CrSampleTable::build(const ChartedSubmanifold& sub, const AmbientSpace& space, const TableOptions& options) {
  if (sub.ambient_dim != space.dim()) throw Error(ErrorKind::Shape, sub.name + ": ambient dimension does not match the space");
  if (sub.sample_points.empty()) throw Error(ErrorKind::Configuration, sub.name + ": no sample points");
  const double reach = options.scheme.reach();
  for (const Vec& u : sub.sample_points) {
    if (sub.domain.margin(u) < reach) {
      std::ostringstream msg;
      msg << sub.name << ": sample point lies " << sub.domain.margin(u) << " from the boundary, the stencils need " << reach;
      throw Error(ErrorKind::Margin, msg.str());
    }
  }

  CrSampleTable table(sub, space, options);
  const int count = static_cast<int>(sub.sample_points.size());
  std::vector<std::optional<SamplePoint>> built(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        built[static_cast<std::size_t>(i)] = build_point(table.sub_, table.space_, options, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  table.points_.reserve(static_cast<std::size_t>(count));
  for (auto& p : built) table.points_.push_back(std::move(*p));

  const SamplePoint& first = table.points_.front();
  table.rank_D_ = first.dec.rank_D();
  table.rank_Dperp_ = first.dec.rank_Dperp();
  for (const SamplePoint& p : table.points_) {
    if (p.dec.rank_D() != table.rank_D_ || p.dec.rank_Dperp() != table.rank_Dperp_) table.constant_ranks_ = false;
    if (!p.dec.is_cr) table.is_cr_ = false;
    if (p.dec.mu.rank() != 0) table.mu_zero_ = false;
    table.worst_totally_real_ = std::max(table.worst_totally_real_, p.dec.totally_real_residual);
    table.worst_invariance_ = std::max(table.worst_invariance_, p.dec.invariance_residual);
  }
  if (options.strict) {
    if (!table.constant_ranks_) throw Error(ErrorKind::NonConstantRank, sub.name + ": rank of D or Dperp changes across sample points");
    if (!table.is_cr_) {
      std::ostringstream msg;
      msg << sub.name << ": Dperp is not totally real or D is not quaternionic (worst residuals " << table.worst_totally_real_
          << ", " << table.worst_invariance_ << ")";
      throw Error(ErrorKind::NotTotallyReal, msg.str());
    }
  }
  return table;
}

}  // namespace qcr
