#include "qcr/runner.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "qcr/error.hpp"

namespace qcr {

namespace {

std::string format_residual(double r) {
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", r);
  return buf;
}

std::string format_witness(const Witness& w) {
  if (w.point < 0) return "-";
  std::string out = "p" + std::to_string(w.point) + ":u=(";
  char buf[32];
  for (Eigen::Index i = 0; i < w.u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", w.u[i]);
    if (i) out += ",";
    out += buf;
  }
  return out + ")";
}

/// Verdicts that are not-applicable do not take part; any inconclusive input
/// makes the comparison inconclusive.
struct Comparison {
  std::vector<const PredicateResult*> inputs;

  bool any_inconclusive() const {
    for (const PredicateResult* r : inputs)
      if (r->verdict == Verdict::Inconclusive) return true;
    return false;
  }
  std::vector<const PredicateResult*> applicable() const {
    std::vector<const PredicateResult*> out;
    for (const PredicateResult* r : inputs)
      if (r->verdict != Verdict::NotApplicable) out.push_back(r);
    return out;
  }
  double worst() const {
    double w = 0.0;
    for (const PredicateResult* r : inputs)
      if (r->verdict != Verdict::NotApplicable) w = std::max(w, r->worst_residual);
    return w;
  }
  Witness witness() const {
    const PredicateResult* best = nullptr;
    for (const PredicateResult* r : inputs)
      if (r->verdict != Verdict::NotApplicable && (!best || r->worst_residual > best->worst_residual)) best = r;
    return best ? best->witness : Witness{};
  }
};

PropertyResult agreement(std::string name, std::string label, std::vector<const PredicateResult*> inputs) {
  Comparison c{std::move(inputs)};
  PropertyResult p;
  p.name = std::move(name);
  p.worst_residual = c.worst();
  p.witness = c.witness();
  const auto live = c.applicable();
  int count_true = 0;
  for (const PredicateResult* r : live) count_true += r->verdict == Verdict::True;
  const int n = static_cast<int>(c.inputs.size());
  if (live.empty()) {
    p.verdict = Verdict::NotApplicable;
    p.line = label + ": not-applicable";
    return p;
  }
  if (c.any_inconclusive()) {
    p.verdict = Verdict::Inconclusive;
  } else {
    p.verdict = (count_true == 0 || count_true == static_cast<int>(live.size())) ? Verdict::True : Verdict::False;
  }
  std::string tally;
  if (p.verdict == Verdict::True) {
    const Verdict common = live.front()->verdict;
    tally = std::to_string(live.size()) + "/" + std::to_string(n) + " " + std::string(to_string(common));
  } else {
    for (const PredicateResult* r : c.inputs) tally += (tally.empty() ? "" : ", ") + std::string(to_string(r->verdict));
  }
  const std::string status = p.verdict == Verdict::True ? "EQUIVALENT" : p.verdict == Verdict::False ? "DISAGREE" : "INCONCLUSIVE";
  p.line = label + ": " + status + " (" + tally + ")";
  return p;
}

/// premise true => every conclusion true; not-applicable when the premise
/// is false or not-applicable.
PropertyResult implication(std::string name, std::string label, std::vector<const PredicateResult*> premises,
                           std::vector<const PredicateResult*> conclusions) {
  PropertyResult p;
  p.name = std::move(name);
  bool premise_true = true, premise_inconclusive = false;
  for (const PredicateResult* r : premises) {
    premise_true = premise_true && r->verdict == Verdict::True;
    premise_inconclusive = premise_inconclusive || r->verdict == Verdict::Inconclusive;
  }
  Comparison c{conclusions};
  p.worst_residual = c.worst();
  p.witness = c.witness();
  if (premise_inconclusive) {
    p.verdict = Verdict::Inconclusive;
  } else if (!premise_true) {
    p.verdict = Verdict::NotApplicable;
  } else {
    p.verdict = Verdict::True;
    for (const PredicateResult* r : conclusions) {
      if (r->verdict == Verdict::False) p.verdict = Verdict::False;
      if (r->verdict == Verdict::Inconclusive && p.verdict == Verdict::True) p.verdict = Verdict::Inconclusive;
    }
  }
  p.line = label + ": " + (p.verdict == Verdict::True            ? "HOLDS"
                           : p.verdict == Verdict::False         ? "FAILS"
                           : p.verdict == Verdict::Inconclusive  ? "INCONCLUSIVE"
                                                                 : "not-applicable (premise not met)");
  return p;
}

/// Equality of two derived booleans, each the conjunction of its inputs.
PropertyResult boolean_iff(std::string name, std::string label, std::vector<const PredicateResult*> lhs,
                           std::vector<const PredicateResult*> rhs) {
  auto conj = [](const std::vector<const PredicateResult*>& v, bool& inconclusive) {
    bool all = true, any = false;
    for (const PredicateResult* r : v) {
      if (r->verdict == Verdict::NotApplicable) continue;
      any = true;
      inconclusive = inconclusive || r->verdict == Verdict::Inconclusive;
      all = all && r->verdict == Verdict::True;
    }
    return std::pair{any, all};
  };
  bool inconclusive = false;
  const auto [lany, lval] = conj(lhs, inconclusive);
  const auto [rany, rval] = conj(rhs, inconclusive);
  std::vector<const PredicateResult*> all = lhs;
  all.insert(all.end(), rhs.begin(), rhs.end());
  Comparison c{all};
  PropertyResult p;
  p.name = std::move(name);
  p.worst_residual = c.worst();
  p.witness = c.witness();
  if (!lany || !rany) {
    p.verdict = Verdict::NotApplicable;
    p.line = label + ": not-applicable";
    return p;
  }
  p.verdict = inconclusive ? Verdict::Inconclusive : (lval == rval ? Verdict::True : Verdict::False);
  const std::string status = p.verdict == Verdict::True ? "HOLDS" : p.verdict == Verdict::False ? "FAILS" : "INCONCLUSIVE";
  p.line = label + ": " + status + " (" + (lval ? "true" : "false") + " vs " + (rval ? "true" : "false") + ")";
  return p;
}

PropertyResult requirement(std::string name, std::string label, const PredicateResult& r) {
  PropertyResult p;
  p.name = std::move(name);
  p.verdict = r.verdict;
  p.worst_residual = r.worst_residual;
  p.witness = r.witness;
  p.line = label + ": " + std::string(to_string(r.verdict)) + " (worst residual " + format_residual(r.worst_residual) + ")";
  return p;
}

PropertyResult not_applicable(std::string name, std::string label, const std::string& why) {
  PropertyResult p;
  p.name = std::move(name);
  p.line = label + ": not-applicable (" + why + ")";
  return p;
}

PropertyResult from_predicate(const PredicateResult& r, std::string name, std::string line) {
  PropertyResult p;
  p.name = std::move(name);
  p.verdict = r.verdict;
  p.worst_residual = r.worst_residual;
  p.witness = r.witness;
  p.line = std::move(line);
  return p;
}

std::string verdict_word(const PredicateResult& r) { return std::string(to_string(r.verdict)); }

/// "true (4/4 true)" style value summary of a four-way characterization.
std::string four_way_value(const std::array<PredicateResult, 4>& r) {
  int counts[4] = {0, 0, 0, 0};
  for (const PredicateResult& p : r) ++counts[static_cast<int>(p.verdict)];
  for (int v = 0; v < 4; ++v)
    if (counts[v] == 4) {
      const std::string w(to_string(static_cast<Verdict>(v)));
      return w + " (4/4 " + w + ")";
    }
  std::string out = "mixed (";
  for (std::size_t i = 0; i < 4; ++i) out += (i ? ", " : "") + verdict_word(r[i]);
  return out + ")";
}

TableOptions table_options(const ScenarioSpec& spec, const RunConfig& config) {
  TableOptions opt;
  if (config.fd_step) {
    opt.scheme.first_step = *config.fd_step;
    opt.scheme.second_step = 10.0 * *config.fd_step;
  }
  if (spec.tolerances.rank) opt.rank_tol = *spec.tolerances.rank;
  opt.seed = config.seed;
  opt.strict = false;
  opt.curvature = true;
  opt.threads = config.threads;
  return opt;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.scenario.empty()) throw Error(ErrorKind::Configuration, "scenario: no scenario given");
  if (config.tol && !(std::isfinite(*config.tol) && *config.tol > 0.0))
    throw Error(ErrorKind::Configuration, "tol: must be positive and finite");
  if (config.fd_step && !(std::isfinite(*config.fd_step) && *config.fd_step > 0.0))
    throw Error(ErrorKind::Configuration, "fd-step: must be positive and finite");
  if (config.samples && *config.samples < 1) throw Error(ErrorKind::Configuration, "samples: must be at least 1");
}

const PredicateResult* VerificationReport::predicate(const std::string& name) const {
  for (const PredicateResult& p : predicates)
    if (p.name == name) return &p;
  return nullptr;
}

const PropertyResult* VerificationReport::property(const std::string& name) const {
  for (const PropertyResult& p : properties)
    if (p.name == name) return &p;
  return nullptr;
}

std::string VerificationReport::machine() const {
  std::ostringstream out;
  auto record = [&](const std::string& name, Verdict v, double r, const Witness& w) {
    out << name << '\t' << to_string(v) << '\t' << format_residual(r) << '\t' << format_witness(w) << '\n';
  };
  for (const PredicateResult& p : predicates) record(p.name, p.verdict, p.worst_residual, p.witness);
  for (const PropertyResult& p : properties) record("property:" + p.name, p.verdict, p.worst_residual, p.witness);
  out << "exit_code\t" << exit_code << "\t-\t-\n";
  return out.str();
}

std::string VerificationReport::text() const {
  std::ostringstream out;
  out << "scenario: " << scenario << " in H^" << ambient_m << ", " << sample_count << " sample points\n";
  if (is_cr)
    out << "CR structure: rank D = " << rank_D << ", rank Dperp = " << rank_Dperp << ", rank mu = " << rank_mu
        << ", rank mu_perp = " << rank_mu_perp << "\n";
  out << "\npredicates\n";
  for (const PredicateResult& p : predicates)
    out << "  " << p.name << ": " << to_string(p.verdict) << " (worst residual " << format_residual(p.worst_residual)
        << (p.witness.point >= 0 ? ", at " + format_witness(p.witness) : std::string()) << ")\n";
  out << "\nsummary\n";
  for (const std::string& s : summary) out << "  " << s << "\n";
  out << "\nproperties\n";
  for (const PropertyResult& p : properties) out << "  " << p.line << "\n";
  out << "\nexit code " << exit_code << "\n";
  return out.str();
}

VerificationReport verify(const ScenarioSpec& spec_in, const RunConfig& config) {
  validate(config);
  ScenarioSpec spec = spec_in;
  const ChartedSubmanifold probe = instantiate(spec);
  if (config.samples) spec.grid.counts.assign(static_cast<std::size_t>(probe.k), *config.samples);
  const ChartedSubmanifold sub = config.samples ? instantiate(spec) : probe;
  const AmbientSpace space = make_flat_space(spec.ambient_m);
  const CrSampleTable table = CrSampleTable::build(sub, space, table_options(spec, config));

  VerdictPolicy policy;
  if (spec.tolerances.predicate) policy.tol = *spec.tolerances.predicate;
  if (spec.tolerances.noise_floor) policy.noise_floor = *spec.tolerances.noise_floor;
  VerdictPolicy identity{kIdentityTol, policy.noise_floor};
  if (spec.tolerances.identity) identity.tol = *spec.tolerances.identity;
  if (config.tol) policy.tol = identity.tol = *config.tol;

  VerificationReport rep;
  rep.scenario = spec.name;
  rep.ambient_m = spec.ambient_m;
  rep.sample_count = static_cast<int>(table.points().size());
  rep.is_cr = table.is_cr() && table.constant_ranks();
  rep.rank_D = table.rank_D();
  rep.rank_Dperp = table.rank_Dperp();
  rep.rank_mu = table.points().front().dec.mu.rank();
  rep.rank_mu_perp = table.points().front().dec.mu_perp.rank();

  PredicateResult cr;
  cr.name = "cr_structure";
  cr.verdict = rep.is_cr ? Verdict::True : Verdict::False;
  cr.worst_residual = std::max(table.worst_totally_real_residual(), table.worst_invariance_residual());
  cr.tol = table.options().rank_tol;
  for (const SamplePoint& p : table.points())
    if (!p.dec.is_cr || p.dec.rank_D() != rep.rank_D || p.dec.rank_Dperp() != rep.rank_Dperp) {
      cr.witness = Witness{p.index, p.u, {}};
      break;
    }
  rep.predicates.push_back(cr);

  if (!rep.is_cr) {
    // A structured finding: report what the decomposition looks like and how
    // far the totally real part is from closing under brackets.
    std::ostringstream why;
    why << "not a quaternion CR-submanifold: rank D = " << rep.rank_D << ", rank Dperp = " << rep.rank_Dperp
        << (table.constant_ranks() ? "" : " (ranks vary)") << ", worst totally-real residual "
        << format_residual(table.worst_totally_real_residual()) << ", worst invariance residual "
        << format_residual(table.worst_invariance_residual());
    rep.summary.push_back(why.str());
    if (table.constant_ranks()) {
      const PredicateResult integrable = check_dperp_integrable(table, policy);
      rep.predicates.push_back(integrable);
      rep.summary.push_back("Dperp integrable: " + verdict_word(integrable) + " (worst residual " +
                            format_residual(integrable.worst_residual) + ")");
    }
    rep.exit_code = 2;
    return rep;
  }

  const GeodesyFlags geo = check_geodesy(table, policy);
  const PredicateResult dperp_int = check_dperp_integrable(table, policy);
  const PredicateResult d_int = check_d_integrable(table, policy);
  const PredicateResult d_min = check_d_minimal(table, policy);
  const auto tgf = check_totally_geodesic_foliation(table, policy);
  const auto ruled = check_ruled(table, policy);
  const PredicateResult d_ruled = check_d_leaves_ruled(table, policy);
  const BundleLikeResult bundle = check_bundle_like(table, policy);
  const QrProductResult qr = check_qr_product(table, policy);
  std::vector<PredicateResult> identities;
  for (Identity id : kAllIdentities) identities.push_back(check_identity(table, id, identity));
  const PredicateResult gauss = check_gauss_equation(table, identity);
  LeafCurvatureResult leaves;
  try {
    leaves = check_leaf_space_forms(table, identity);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Configuration) throw;
    for (auto [r, name] : {std::pair{&leaves.dperp_leaves, "leaf_dperp_curvature"}, std::pair{&leaves.d_leaves, "leaf_d_quaternion_curvature"},
                           std::pair{&leaves.consistency, "leaf_curvature_consistency"}})
      r->name = name;
    rep.summary.push_back(std::string("leaf curvature not checked: ") + e.what());
  }

  for (const PredicateResult* p : {&geo.d_geodesic, &geo.dperp_geodesic, &geo.mixed_geodesic, &geo.totally_geodesic, &dperp_int,
                                   &d_int, &d_min})
    rep.predicates.push_back(*p);
  for (const auto* group : {&tgf, &ruled})
    for (const PredicateResult& p : *group) rep.predicates.push_back(p);
  for (const PredicateResult* p : {&d_ruled, &bundle.metric_form, &bundle.sff_form, &bundle.sff_form_mu_free, &qr.d_geodesic,
                                   &qr.dperp_geodesic, &qr.mixed_in_mu, &qr.combined})
    rep.predicates.push_back(*p);
  for (const PredicateResult& p : identities) rep.predicates.push_back(p);
  for (const PredicateResult& p : {gauss, leaves.dperp_leaves, leaves.d_leaves, leaves.consistency}) rep.predicates.push_back(p);

  rep.summary.push_back("D geodesic: " + verdict_word(geo.d_geodesic));
  rep.summary.push_back("Dperp geodesic: " + verdict_word(geo.dperp_geodesic));
  rep.summary.push_back("mixed geodesic: " + verdict_word(geo.mixed_geodesic));
  rep.summary.push_back("totally geodesic: " + verdict_word(geo.totally_geodesic));
  rep.summary.push_back("totally geodesic Dperp foliation (Thm 3.1): " + four_way_value(tgf));
  rep.summary.push_back("ruled (Thm 4.2): " + four_way_value(ruled));
  rep.summary.push_back("D leaves ambient-geodesic: " + verdict_word(d_ruled));
  rep.summary.push_back("bundle-like metric (Thm 5.1): metric form " + verdict_word(bundle.metric_form) + ", second fundamental form " +
                        verdict_word(bundle.sff_form));
  rep.summary.push_back("Thm 6.3 conditions: i " + verdict_word(qr.d_geodesic) + ", ii " + verdict_word(qr.dperp_geodesic) + ", iii " +
                        verdict_word(qr.mixed_in_mu));
  rep.summary.push_back("QR-product: " + verdict_word(qr.combined));

  auto& props = rep.properties;
  props.push_back(requirement("dperp_integrable_self_test", "Thm 2.5 i (Dperp integrable)", dperp_int));
  props.push_back(boolean_iff("d_integrable_iff_d_geodesic", "Thm 2.5 ii (D integrable iff D geodesic)", {&d_int}, {&geo.d_geodesic}));
  props.push_back(requirement("d_minimal", "Prop 2.8 (D minimal)", d_min));
  props.push_back(agreement("totally_geodesic_foliation_equivalence", "Thm 3.1", {&tgf[0], &tgf[1], &tgf[2], &tgf[3]}));
  props.push_back(implication("mixed_geodesic_implies_totally_geodesic_foliation", "Cor 3.3 (mixed geodesic => totally geodesic Dperp foliation)",
                              {&geo.mixed_geodesic}, {&tgf[0], &tgf[1], &tgf[2], &tgf[3]}));
  if (table.mu_vanishes())
    props.push_back(boolean_iff("mu_free_mixed_geodesic_iff_totally_geodesic_foliation",
                                "Cor 3.4 (mu = 0: mixed geodesic iff totally geodesic Dperp foliation)", {&geo.mixed_geodesic},
                                {&tgf[0]}));
  else
    props.push_back(not_applicable("mu_free_mixed_geodesic_iff_totally_geodesic_foliation",
                                   "Cor 3.4 (mu = 0: mixed geodesic iff totally geodesic Dperp foliation)", "mu is not zero"));
  props.push_back(agreement("ruled_equivalence", "Thm 4.2", {&ruled[0], &ruled[1], &ruled[2], &ruled[3]}));
  props.push_back(implication("totally_geodesic_implies_ruled", "Cor 4.3 (totally geodesic => ruled)", {&geo.totally_geodesic},
                              {&ruled[0], &ruled[1], &ruled[2], &ruled[3]}));
  props.push_back(boolean_iff("bundle_like_equivalence", "Thm 5.1 (bundle-like metric iff second fundamental form condition)",
                              {&bundle.metric_form}, {&bundle.sff_form}));
  if (table.mu_vanishes()) {
    props.push_back(boolean_iff("mu_free_bundle_like_equivalence", "Cor 5.2 (mu = 0: bundle-like iff J_beta/J_gamma condition)",
                                {&bundle.metric_form}, {&bundle.sff_form_mu_free}));
    props.push_back(boolean_iff("mu_free_totally_geodesic_bundle_like",
                                "totally geodesic bundle-like Dperp foliation iff mixed geodesic with J_beta/J_gamma condition",
                                {&tgf[0], &bundle.metric_form}, {&geo.mixed_geodesic, &bundle.sff_form_mu_free}));
  } else {
    props.push_back(not_applicable("mu_free_bundle_like_equivalence", "Cor 5.2 (mu = 0: bundle-like iff J_beta/J_gamma condition)",
                                   "mu is not zero"));
    props.push_back(not_applicable("mu_free_totally_geodesic_bundle_like",
                                   "totally geodesic bundle-like Dperp foliation iff mixed geodesic with J_beta/J_gamma condition",
                                   "mu is not zero"));
  }
  props.push_back(implication("totally_geodesic_implies_ruled_both_foliations", "Prop 6.2 (totally geodesic => ruled for D and Dperp)",
                              {&geo.totally_geodesic}, {&ruled[0], &d_ruled}));
  props.push_back(implication("totally_geodesic_implies_qr_product", "totally geodesic => QR-product", {&geo.totally_geodesic},
                              {&qr.combined}));
  if (table.mu_vanishes())
    props.push_back(boolean_iff("mu_free_qr_product_iff_totally_geodesic", "mu = 0: QR-product iff totally geodesic", {&qr.combined},
                                {&geo.totally_geodesic}));
  else
    props.push_back(not_applicable("mu_free_qr_product_iff_totally_geodesic", "mu = 0: QR-product iff totally geodesic",
                                   "mu is not zero"));
  props.push_back(implication("d_geodesic_ruled_implies_qr_product", "D geodesic and ruled => QR-product", {&geo.d_geodesic, &ruled[0]},
                              {&qr.combined}));
  for (const PredicateResult& r : identities) props.push_back(requirement(r.name, r.name, r));
  props.push_back(requirement("gauss_equation", "Gauss equation", gauss));
  props.push_back(from_predicate(leaves.dperp_leaves, "leaf_dperp_curvature", "Dperp leaves of curvature c/4: " + verdict_word(leaves.dperp_leaves)));
  props.push_back(
      from_predicate(leaves.d_leaves, "leaf_d_quaternion_curvature", "D leaves of quaternion sectional curvature c: " + verdict_word(leaves.d_leaves)));
  props.push_back(from_predicate(leaves.consistency, "leaf_curvature_consistency",
                                 "curvature of M on Dperp equals the leaf curvature: " + verdict_word(leaves.consistency)));

  if (spec.declared_ranks && (spec.declared_ranks->first != rep.rank_D || spec.declared_ranks->second != rep.rank_Dperp)) {
    PropertyResult p;
    p.name = "declared_ranks";
    p.verdict = Verdict::False;
    p.line = "declared ranks (" + std::to_string(spec.declared_ranks->first) + ", " + std::to_string(spec.declared_ranks->second) +
             ") differ from the computed ranks";
    props.insert(props.begin(), p);
  }

  bool any_false = false, any_inconclusive = false;
  for (const PropertyResult& p : props) {
    any_false = any_false || p.verdict == Verdict::False;
    any_inconclusive = any_inconclusive || p.verdict == Verdict::Inconclusive;
  }
  for (const PredicateResult& p : rep.predicates) any_inconclusive = any_inconclusive || p.verdict == Verdict::Inconclusive;
  rep.exit_code = any_false ? 2 : any_inconclusive ? 3 : 0;
  return rep;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  VerificationReport report;
  try {
    validate(config);
    const ScenarioSpec spec = resolve_scenario(config.scenario);
    report = verify(spec, config);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  out << (config.format == ReportFormat::Machine ? report.machine() : report.text());
  return report.exit_code;
}

}  // namespace qcr
