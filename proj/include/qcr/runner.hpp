#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcr/scenarios.hpp"
#include "qcr/theorems.hpp"

namespace qcr {

enum class ReportFormat { Text, Machine };

struct RunConfig {
  /// Catalog name or scenario file path.
  std::string scenario;
  std::optional<double> tol;
  /// First-derivative step; the Hessian step is ten times larger.
  std::optional<double> fd_step;
  /// Points per chart axis.
  std::optional<int> samples;
  ReportFormat format = ReportFormat::Text;
  std::uint64_t seed = 0;
  /// Worker threads for the sample table; 0 uses every core.
  unsigned threads = 0;
};

/// Checks overrides; throws Configuration naming the bad field.
void validate(const RunConfig& config);

/// A relation between predicate verdicts (equivalence, implication) or a
/// predicate that must hold on every CR-submanifold.
struct PropertyResult {
  std::string name;
  Verdict verdict = Verdict::NotApplicable;
  double worst_residual = 0.0;
  Witness witness;
  /// Human-readable summary for the text report.
  std::string line;
};

struct VerificationReport {
  std::string scenario;
  int ambient_m = 0;
  int sample_count = 0;
  bool is_cr = false;
  int rank_D = 0;
  int rank_Dperp = 0;
  int rank_mu = 0;
  int rank_mu_perp = 0;
  /// Predicates in evaluation order.
  std::vector<PredicateResult> predicates;
  std::vector<PropertyResult> properties;
  /// Lines printed between the predicate block and the property block.
  std::vector<std::string> summary;
  int exit_code = 0;

  const PredicateResult* predicate(const std::string& name) const;
  const PropertyResult* property(const std::string& name) const;

  /// `name<TAB>verdict<TAB>residual<TAB>witness`, one record per line.
  std::string machine() const;
  std::string text() const;
};

/// Builds the sample table and evaluates every predicate and property.
VerificationReport verify(const ScenarioSpec& spec, const RunConfig& config);

/// Resolves the scenario, verifies it and writes the report. Returns the exit
/// code: 0 all properties hold, 2 a property fails or the submanifold is not
/// CR, 3 some verdict is inconclusive, 1 configuration error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qcr
