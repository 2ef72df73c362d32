#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcr/immersion.hpp"

namespace qcr {

/// One monomial of a polynomial chart: prod u_i^exponents[i] times `coeffs`.
struct PolynomialTerm {
  std::vector<int> exponents;
  std::vector<double> coeffs;

  bool operator==(const PolynomialTerm&) const = default;
};

struct ChartSpec {
  /// Family name; empty for a polynomial chart.
  std::string builtin;
  std::vector<double> params;
  /// "contact" swaps Dperp for the contact plane field (test fixture).
  std::string dperp_override;
  int dim = 0;
  std::vector<std::pair<double, double>> domain;
  std::vector<PolynomialTerm> terms;

  bool operator==(const ChartSpec&) const = default;
};

struct GridSpec {
  /// Points per axis; empty means the default for the chart dimension.
  std::vector<int> counts;
  double margin = 0.25;

  bool operator==(const GridSpec&) const = default;
};

struct LeafChartSpec {
  Distribution which = Distribution::Dperp;
  std::vector<int> axes;

  bool operator==(const LeafChartSpec&) const = default;
};

struct ToleranceSpec {
  std::optional<double> predicate;
  std::optional<double> noise_floor;
  std::optional<double> identity;
  std::optional<double> rank;

  bool operator==(const ToleranceSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  int ambient_m = 1;
  ChartSpec chart;
  GridSpec grid;
  std::optional<std::pair<int, int>> declared_ranks;
  /// Coordinate leaf charts; when empty the chart family supplies its own.
  std::vector<LeafChartSpec> leaf_charts;
  ToleranceSpec tolerances;

  bool operator==(const ScenarioSpec&) const = default;
};

/// Catalog names in listing order.
std::vector<std::string> builtin_names();
/// One-line description of a catalog entry.
std::string_view builtin_summary(std::string_view name);

ScenarioSpec builtin(std::string_view name);

/// Parameter families used for the randomized runs.
inline constexpr std::string_view kRandomFamilies[] = {"linear-product", "q-times-helix", "rotating-product"};

/// Variant `index` of the randomized set: family index % 3 with parameters
/// drawn from a generator seeded by (seed, index).
ScenarioSpec random_variant(int index, std::uint64_t seed = 2024);

/// Default per-axis counts: 7 for curves and surfaces, otherwise 3 with
/// trailing axes collapsed to one point until at most 243 points remain.
std::vector<int> default_counts(int k);

/// Throws Configuration naming the offending field.
void validate_scenario(const ScenarioSpec& spec);

/// Chart, domain, sample grid and leaf charts described by the spec.
ChartedSubmanifold instantiate(const ScenarioSpec& spec);

/// Parses the scenario file format; throws Parse (with line and column) or
/// Configuration (naming the field) errors.
ScenarioSpec parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

/// A catalog name or a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& name_or_path);

}  // namespace qcr
