#include "qcr/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "qcr/error.hpp"
#include "qcr/sample_table.hpp"

namespace qcr {

namespace {

using Quat = Eigen::Vector4d;

Quat quat_at(const Vec& v, int offset) { return v.segment<4>(offset); }

Quat quat_param(const std::vector<double>& p, std::size_t offset) {
  return Quat(p[offset], p[offset + 1], p[offset + 2], p[offset + 3]);
}

Quat real_quat(double x) { return Quat(x, 0.0, 0.0, 0.0); }

/// cos t + sin t i
Quat exp_i(double t) { return Quat(std::cos(t), std::sin(t), 0.0, 0.0); }

Quat inverse(const Quat& q) {
  return Quat(q[0], -q[1], -q[2], -q[3]) / q.squaredNorm();
}

Vec stack(std::initializer_list<Quat> parts) {
  Vec out(4 * static_cast<Eigen::Index>(parts.size()));
  Eigen::Index at = 0;
  for (const Quat& q : parts) {
    out.segment<4>(at) = q;
    at += 4;
  }
  return out;
}

using ChartFn = std::function<Vec(const Vec&)>;

struct Family {
  std::string_view name;
  std::string_view summary;
  int m;
  int k;
  std::vector<double> defaults;
  std::vector<std::pair<double, double>> domain;
  std::optional<std::pair<int, int>> ranks;
  std::function<ChartFn(const std::vector<double>&)> make;
  /// Leaf charts used when the scenario lists none.
  std::function<std::vector<LeafChart>(const std::vector<double>&)> leaves;
};

std::vector<std::pair<double, double>> product_domain(int k) {
  return std::vector<std::pair<double, double>>(static_cast<std::size_t>(k), {-1.0, 1.0});
}

std::function<std::vector<LeafChart>(const std::vector<double>&)> product_leaves() {
  return [](const std::vector<double>&) {
    return std::vector<LeafChart>{coordinate_leaf(Distribution::D, {0, 1, 2, 3}), coordinate_leaf(Distribution::Dperp, {4})};
  };
}

std::function<std::vector<LeafChart>(const std::vector<double>&)> no_leaves() {
  return [](const std::vector<double>&) { return std::vector<LeafChart>{}; };
}

const std::vector<Family>& families() {
  static const std::vector<Family> table = [] {
    std::vector<Family> f;
    f.push_back({"qr-linear", "(q, t) in H^2, a totally geodesic product", 2, 5, {}, product_domain(5), std::pair{4, 1},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({quat_at(u, 0), real_quat(u[4])}); };
                 },
                 product_leaves()});
    f.push_back({"q-times-circle", "(q, cos t + i sin t) in H^2, mixed geodesic and not ruled", 2, 5, {}, product_domain(5),
                 std::pair{4, 1},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({quat_at(u, 0), exp_i(u[4])}); };
                 },
                 product_leaves()});
    f.push_back({"totally-real-flat", "(s, t) in H^2, a linear totally real plane", 2, 2, {}, product_domain(2), std::pair{0, 2},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({real_quat(u[0]), real_quat(u[1])}); };
                 },
                 [](const std::vector<double>&) { return std::vector<LeafChart>{coordinate_leaf(Distribution::Dperp, {0, 1})}; }});
    f.push_back({"totally-real-torus", "(cos s + i sin s, cos t + i sin t) in H^2, a flat totally real torus", 2, 2, {},
                 product_domain(2), std::pair{0, 2},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({exp_i(u[0]), exp_i(u[1])}); };
                 },
                 [](const std::vector<double>&) { return std::vector<LeafChart>{coordinate_leaf(Distribution::Dperp, {0, 1})}; }});
    f.push_back({"twisted-product", "(q exp(i t), t) in H^2, the linear product with a twisted D frame", 2, 5, {}, product_domain(5),
                 std::pair{4, 1},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({quaternion_product(quat_at(u, 0), exp_i(u[4])), real_quat(u[4])}); };
                 },
                 [](const std::vector<double>&) {
                   LeafChart dperp;
                   dperp.which = Distribution::Dperp;
                   dperp.dim = 1;
                   // Moves along t while holding the image of q fixed.
                   dperp.to_chart = [](const Vec& base, const Vec& v) {
                     const double t = base[4] + v[0];
                     const Quat p = quaternion_product(quat_at(base, 0), exp_i(base[4]));
                     Vec w(5);
                     w.head<4>() = quaternion_product(p, inverse(exp_i(t)));
                     w[4] = t;
                     return w;
                   };
                   return std::vector<LeafChart>{coordinate_leaf(Distribution::D, {0, 1, 2, 3}), dperp};
                 }});
    f.push_back({"plane", "a flat plane in R^8", 2, 2, {}, product_domain(2), std::pair{0, 2},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) {
                     Vec x = Vec::Zero(8);
                     x[0] = u[0] + 0.3 * u[1];
                     x[1] = 0.2;
                     x[4] = u[1];
                     return x;
                   };
                 },
                 no_leaves()});
    f.push_back({"circle", "the unit circle in the first two coordinates of R^8", 2, 1, {}, product_domain(1), std::pair{0, 1},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) {
                     Vec x = Vec::Zero(8);
                     x[0] = std::cos(u[0]);
                     x[1] = std::sin(u[0]);
                     return x;
                   };
                 },
                 no_leaves()});
    f.push_back({"sphere", "the unit sphere in the real parts of H^3", 3, 2, {}, {{0.4, 2.74}, {-1.2, 1.2}}, std::pair{0, 2},
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) {
                     Vec x = Vec::Zero(12);
                     x[0] = std::sin(u[0]) * std::cos(u[1]);
                     x[4] = std::sin(u[0]) * std::sin(u[1]);
                     x[8] = std::cos(u[0]);
                     return x;
                   };
                 },
                 no_leaves()});
    f.push_back({"complex-line", "a complex line in H^1, not a quaternion CR-submanifold", 1, 2, {}, product_domain(2), std::nullopt,
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return Vec(Quat(u[0], u[1], 0.0, 0.0)); };
                 },
                 no_leaves()});
    f.push_back({"contact-fixture", "a totally real 3-flat in H^3 with Dperp replaced by the contact planes", 3, 3, {},
                 product_domain(3), std::nullopt,
                 [](const std::vector<double>&) -> ChartFn {
                   return [](const Vec& u) { return stack({real_quat(u[0]), real_quat(u[1]), real_quat(u[2])}); };
                 },
                 no_leaves()});
    f.push_back({"linear-product", "(q a, q b, t w) in H^3; parameters a, b, w", 3, 5,
                 {1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0}, product_domain(5), std::pair{4, 1},
                 [](const std::vector<double>& p) -> ChartFn {
                   const Quat a = quat_param(p, 0), b = quat_param(p, 4), w = quat_param(p, 8).normalized();
                   return [a, b, w](const Vec& u) {
                     const Quat q = quat_at(u, 0);
                     return stack({quaternion_product(q, a), quaternion_product(q, b), u[4] * w});
                   };
                 },
                 product_leaves()});
    f.push_back({"q-times-helix", "(q, r cos wt + r sin wt i + s t j) in H^2; parameters r, w, s", 2, 5, {1.0, 1.0, 0.5},
                 product_domain(5), std::pair{4, 1},
                 [](const std::vector<double>& p) -> ChartFn {
                   const double r = p[0], w = p[1], s = p[2];
                   return [r, w, s](const Vec& u) {
                     const double t = u[4];
                     return stack({quat_at(u, 0), Quat(r * std::cos(w * t), r * std::sin(w * t), s * t, 0.0)});
                   };
                 },
                 product_leaves()});
    f.push_back({"rotating-product", "(q (a1 + t b1), q (a2 + t b2), t) in H^3; parameters a1, b1, a2, b2", 3, 5,
                 {1.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.4}, product_domain(5),
                 std::pair{4, 1},
                 [](const std::vector<double>& p) -> ChartFn {
                   const Quat a1 = quat_param(p, 0), b1 = quat_param(p, 4), a2 = quat_param(p, 8), b2 = quat_param(p, 12);
                   return [a1, b1, a2, b2](const Vec& u) {
                     const Quat q = quat_at(u, 0);
                     const double t = u[4];
                     return stack({quaternion_product(q, a1 + t * b1), quaternion_product(q, a2 + t * b2), real_quat(t)});
                   };
                 },
                 [](const std::vector<double>&) { return std::vector<LeafChart>{coordinate_leaf(Distribution::D, {0, 1, 2, 3})}; }});
    return f;
  }();
  return table;
}

const Family* find_family(std::string_view name) {
  for (const Family& f : families())
    if (f.name == name) return &f;
  return nullptr;
}

const Family& family_or_throw(std::string_view name) {
  if (const Family* f = find_family(name)) return *f;
  throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + std::string(name) + "'");
}

std::uint64_t mix(std::uint64_t seed, int index) {
  std::uint64_t z = seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(index + 1));
  z = (z ^ (z >> 32)) * 0x9E3779B97F4A7C15ULL;
  return z ^ (z >> 29);
}

void push_quat(std::vector<double>& out, const Quat& q) {
  for (int i = 0; i < 4; ++i) out.push_back(q[i]);
}

Quat gaussian_quat(NormalSampler& rng, double scale) {
  Quat q;
  for (int i = 0; i < 4; ++i) q[i] = scale * rng.normal();
  return q;
}

/// Contact plane field of dz - y dx on the 3-flat: span of d/dy and d/dx + y d/dz.
Mat contact_planes(const Vec& u) {
  Mat c = Mat::Zero(3, 2);
  c(1, 0) = 1.0;
  c(0, 1) = 1.0;
  c(2, 1) = u[1];
  return c;
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Configuration, field + ": " + what);
}

int chart_dim(const ScenarioSpec& spec) {
  if (spec.chart.builtin.empty()) return spec.chart.dim;
  return family_or_throw(spec.chart.builtin).k;
}

}  // namespace

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.name.empty()) config_error("name", "must not be empty");
  if (spec.ambient_m < 1) config_error("ambient_m", "must be at least 1");
  const ChartSpec& c = spec.chart;
  int k = 0;
  std::vector<std::pair<double, double>> domain = c.domain;
  if (!c.builtin.empty()) {
    const Family& f = family_or_throw(c.builtin);
    k = f.k;
    if (spec.ambient_m != f.m) config_error("ambient_m", "chart '" + c.builtin + "' lives in H^" + std::to_string(f.m));
    if (c.params.size() != f.defaults.size())
      config_error("chart.params", "'" + c.builtin + "' takes " + std::to_string(f.defaults.size()) + " parameters");
    if (!c.terms.empty()) config_error("chart.term", "not allowed with chart.builtin");
    if (c.dim != 0 && c.dim != k) config_error("chart.dim", "does not match the builtin chart");
    if (domain.empty()) domain = f.domain;
  } else {
    k = c.dim;
    if (k < 1) config_error("chart.dim", "must be at least 1");
    if (!c.params.empty()) config_error("chart.params", "only builtin charts take parameters");
    if (c.terms.empty()) config_error("chart.term", "a polynomial chart needs at least one term");
    for (const PolynomialTerm& t : c.terms) {
      if (static_cast<int>(t.exponents.size()) != k) config_error("chart.term", "needs " + std::to_string(k) + " exponents");
      if (std::any_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e < 0; }))
        config_error("chart.term", "exponents must be non-negative");
      if (static_cast<int>(t.coeffs.size()) != 4 * spec.ambient_m)
        config_error("chart.term", "needs " + std::to_string(4 * spec.ambient_m) + " coefficients");
    }
    if (domain.empty()) config_error("chart.domain", "a polynomial chart needs a domain");
  }
  for (double v : c.params)
    if (!std::isfinite(v)) config_error("chart.params", "must be finite");
  for (const PolynomialTerm& t : c.terms)
    for (double v : t.coeffs)
      if (!std::isfinite(v)) config_error("chart.term", "coefficients must be finite");
  if (!c.dperp_override.empty() && c.dperp_override != "contact")
    config_error("chart.dperp_override", "unknown override '" + c.dperp_override + "'");
  if (c.dperp_override == "contact" && k != 3) config_error("chart.dperp_override", "the contact planes need a 3-dimensional chart");
  if (static_cast<int>(domain.size()) != k) config_error("chart.domain", "needs " + std::to_string(k) + " intervals");

  const GridSpec& g = spec.grid;
  if (!g.counts.empty() && static_cast<int>(g.counts.size()) != k)
    config_error("grid.counts", "needs " + std::to_string(k) + " entries");
  if (std::any_of(g.counts.begin(), g.counts.end(), [](int n) { return n < 1; })) config_error("grid.counts", "must be positive");
  const double reach = FdScheme{}.reach();
  if (!std::isfinite(g.margin) || g.margin < reach) {
    std::ostringstream msg;
    msg << "must be at least " << reach << " so the finite-difference stencils stay inside the domain";
    config_error("grid.margin", msg.str());
  }
  for (const auto& [lo, hi] : domain) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) config_error("chart.domain", "intervals must be finite with lo < hi");
    if (hi - lo < 2.0 * g.margin) config_error("grid.margin", "leaves no room inside the domain");
  }

  if (spec.declared_ranks) {
    const auto [d, dp] = *spec.declared_ranks;
    if (d < 0 || dp < 0 || d + dp != k) config_error("declared_ranks", "must be non-negative and add up to the chart dimension");
    if (d % 4 != 0) config_error("declared_ranks", "rank of D must be a multiple of 4");
  }
  bool seen[2] = {false, false};
  for (const LeafChartSpec& l : spec.leaf_charts) {
    const std::string field = l.which == Distribution::D ? "leaf_charts.d" : "leaf_charts.dperp";
    bool& s = seen[l.which == Distribution::D ? 0 : 1];
    if (s) config_error(field, "given twice");
    s = true;
    if (l.axes.empty()) config_error(field, "needs at least one axis");
    for (int a : l.axes)
      if (a < 0 || a >= k) config_error(field, "axis out of range");
  }
  const auto positive = [](const std::optional<double>& v, const char* field) {
    if (v && !(std::isfinite(*v) && *v > 0.0)) config_error(field, "must be positive and finite");
  };
  positive(spec.tolerances.predicate, "tolerances.predicate");
  positive(spec.tolerances.noise_floor, "tolerances.noise_floor");
  positive(spec.tolerances.identity, "tolerances.identity");
  positive(spec.tolerances.rank, "tolerances.rank");
}

namespace {

ChartFn polynomial_chart(const ChartSpec& c, int m) {
  std::vector<std::pair<std::vector<int>, Vec>> terms;
  for (const PolynomialTerm& t : c.terms) terms.emplace_back(t.exponents, Eigen::Map<const Vec>(t.coeffs.data(), 4 * m));
  return [terms](const Vec& u) {
    Vec x = Vec::Zero(terms.front().second.size());
    for (const auto& [exps, coeff] : terms) {
      double mono = 1.0;
      for (std::size_t i = 0; i < exps.size(); ++i) mono *= std::pow(u[static_cast<Eigen::Index>(i)], exps[i]);
      x += mono * coeff;
    }
    return x;
  };
}

std::vector<double> axis_points(double lo, double hi, double margin, int count) {
  const double a = lo + margin, b = hi - margin;
  if (count == 1) return {0.5 * (a + b)};
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * i / (count - 1));
  return out;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const Family& f : families()) out.emplace_back(f.name);
  return out;
}

std::string_view builtin_summary(std::string_view name) { return family_or_throw(name).summary; }

ScenarioSpec builtin(std::string_view name) {
  const Family& f = family_or_throw(name);
  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.ambient_m = f.m;
  spec.chart.builtin = std::string(name);
  spec.chart.params = f.defaults;
  if (name == "contact-fixture") spec.chart.dperp_override = "contact";
  spec.declared_ranks = f.ranks;
  return spec;
}

ScenarioSpec random_variant(int index, std::uint64_t seed) {
  const std::string_view family = kRandomFamilies[index % 3];
  ScenarioSpec spec = builtin(family);
  spec.name = "random-" + std::to_string(index) + "-" + std::string(family);
  NormalSampler rng(mix(seed, index));
  std::vector<double> p;
  switch (index % 3) {
    case 0:
      push_quat(p, real_quat(1.0) + gaussian_quat(rng, 0.3));
      push_quat(p, gaussian_quat(rng, 0.5));
      push_quat(p, real_quat(0.5) + gaussian_quat(rng, 1.0));
      break;
    case 1:
      p.push_back(0.5 + rng.uniform());
      p.push_back(0.5 + 1.5 * rng.uniform());
      p.push_back(rng.uniform());
      break;
    default:
      push_quat(p, real_quat(1.0) + gaussian_quat(rng, 0.2));
      push_quat(p, gaussian_quat(rng, 0.3));
      push_quat(p, gaussian_quat(rng, 0.5));
      push_quat(p, gaussian_quat(rng, 0.4));
      break;
  }
  spec.chart.params = p;
  return spec;
}

std::vector<int> default_counts(int k) {
  if (k <= 2) return std::vector<int>(static_cast<std::size_t>(k), 7);
  std::vector<int> counts(static_cast<std::size_t>(k), 3);
  long total = 1;
  for (int c : counts) total *= c;
  for (int i = k - 1; i >= 0 && total > 243; --i) {
    total /= counts[static_cast<std::size_t>(i)];
    counts[static_cast<std::size_t>(i)] = 1;
  }
  return counts;
}

ChartedSubmanifold instantiate(const ScenarioSpec& spec) {
  validate_scenario(spec);
  const ChartSpec& c = spec.chart;
  const Family* family = c.builtin.empty() ? nullptr : &family_or_throw(c.builtin);
  const int k = chart_dim(spec);

  ChartedSubmanifold sub;
  sub.name = spec.name;
  sub.k = k;
  sub.ambient_dim = 4 * spec.ambient_m;
  const auto& domain = c.domain.empty() ? family->domain : c.domain;
  sub.domain = Box{Vec(k), Vec(k)};
  for (int i = 0; i < k; ++i) {
    sub.domain.lo[i] = domain[static_cast<std::size_t>(i)].first;
    sub.domain.hi[i] = domain[static_cast<std::size_t>(i)].second;
  }
  sub.eval = family ? family->make(c.params) : polynomial_chart(c, spec.ambient_m);
  if (c.dperp_override == "contact") sub.dperp_override = contact_planes;

  if (!spec.leaf_charts.empty()) {
    for (const LeafChartSpec& l : spec.leaf_charts) sub.leaf_charts.push_back(coordinate_leaf(l.which, l.axes));
  } else if (family) {
    sub.leaf_charts = family->leaves(c.params);
  }

  const std::vector<int> counts = spec.grid.counts.empty() ? default_counts(k) : spec.grid.counts;
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < k; ++i)
    axes.push_back(axis_points(sub.domain.lo[i], sub.domain.hi[i], spec.grid.margin, counts[static_cast<std::size_t>(i)]));
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Vec u(k);
    for (int i = 0; i < k; ++i) u[i] = axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    sub.sample_points.push_back(u);
    int i = k - 1;
    for (; i >= 0; --i) {
      auto& at = idx[static_cast<std::size_t>(i)];
      if (++at < static_cast<int>(axes[static_cast<std::size_t>(i)].size())) break;
      at = 0;
    }
    if (i < 0) break;
  }
  return sub;
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
  if (find_family(name_or_path)) return builtin(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorKind::UnknownScenario, "'" + name_or_path + "' is neither a builtin scenario nor a readable file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

}  // namespace qcr
