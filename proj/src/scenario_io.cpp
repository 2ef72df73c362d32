#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "qcr/error.hpp"
#include "qcr/scenarios.hpp"

namespace qcr {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;
};

[[noreturn]] void syntax_error(int line, int column, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

/// [first, last) of s with surrounding blanks removed.
std::pair<std::size_t, std::size_t> trimmed(std::string_view s, std::size_t first, std::size_t last) {
  while (first < last && is_space(s[first])) ++first;
  while (last > first && is_space(s[last - 1])) --last;
  return {first, last};
}

const std::map<std::string, bool, std::less<>>& known_keys() {
  // value: may repeat
  static const std::map<std::string, bool, std::less<>> keys = {
      {"name", false},           {"ambient_m", false},          {"declared_ranks", false},
      {"chart.builtin", false},  {"chart.kind", false},         {"chart.params", false},
      {"chart.dim", false},      {"chart.domain", false},       {"chart.term", true},
      {"chart.dperp_override", false},
      {"grid.counts", false},    {"grid.margin", false},
      {"tolerances.predicate", false}, {"tolerances.noise_floor", false},
      {"tolerances.identity", false},  {"tolerances.rank", false},
      {"leaf_charts.d", false},  {"leaf_charts.dperp", false},
  };
  return keys;
}

std::vector<Entry> tokenize(std::string_view text) {
  static const char* const sections[] = {"chart", "grid", "tolerances", "leaf_charts"};
  std::vector<Entry> entries;
  std::map<std::string, int> first_line;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    std::size_t stop = line.find('#');
    if (stop == std::string_view::npos) stop = line.size();
    auto [b, e] = trimmed(line, 0, stop);
    if (b == e) {
      if (end == text.size()) break;
      continue;
    }
    const int col = static_cast<int>(b) + 1;
    if (line[b] == '[') {
      if (line[e - 1] != ']') syntax_error(line_no, static_cast<int>(e), "expected ']' to close the section header");
      auto [nb, ne] = trimmed(line, b + 1, e - 1);
      const std::string name(line.substr(nb, ne - nb));
      bool ok = false;
      for (const char* s : sections) ok = ok || name == s;
      if (!ok) syntax_error(line_no, static_cast<int>(nb) + 1, "unknown section '" + name + "'");
      section = name;
    } else {
      const std::size_t eq = line.find('=', b);
      if (eq == std::string_view::npos || eq >= e) syntax_error(line_no, col, "expected 'key = value'");
      auto [kb, ke] = trimmed(line, b, eq);
      if (kb == ke) syntax_error(line_no, col, "missing key before '='");
      for (std::size_t i = kb; i < ke; ++i) {
        const char c = line[i];
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
          syntax_error(line_no, static_cast<int>(i) + 1, std::string("unexpected character '") + c + "' in key");
      }
      std::string key(line.substr(kb, ke - kb));
      if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
      const auto known = known_keys().find(key);
      if (known == known_keys().end()) syntax_error(line_no, static_cast<int>(kb) + 1, "unknown key '" + key + "'");
      if (!known->second) {
        const auto [it, fresh] = first_line.emplace(key, line_no);
        if (!fresh)
          syntax_error(line_no, static_cast<int>(kb) + 1, "key '" + key + "' already set on line " + std::to_string(it->second));
      }
      auto [vb, ve] = trimmed(line, eq + 1, e);
      entries.push_back({key, std::string(line.substr(vb, ve - vb)), line_no, static_cast<int>(vb) + 1});
    }
    if (end == text.size()) break;
  }
  return entries;
}

/// Comma-separated numbers; an empty value is an empty list.
template <class T>
std::vector<T> numbers(const Entry& e, std::string_view value, int column) {
  std::vector<T> out;
  auto [b, end] = trimmed(value, 0, value.size());
  if (b == end) return out;
  std::size_t at = 0;
  while (true) {
    std::size_t comma = value.find(',', at);
    if (comma == std::string_view::npos) comma = value.size();
    auto [tb, te] = trimmed(value, at, comma);
    const int col = column + static_cast<int>(tb);
    if (tb == te) syntax_error(e.line, col, "missing number in '" + e.key + "'");
    std::string_view token = value.substr(tb, te - tb);
    if (token.front() == '+') token.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      syntax_error(e.line, col, "'" + std::string(value.substr(tb, te - tb)) + "' is not a valid number");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) syntax_error(e.line, col, "'" + e.key + "' must be finite");
    }
    out.push_back(v);
    if (comma == value.size()) break;
    at = comma + 1;
  }
  return out;
}

template <class T>
std::vector<T> numbers(const Entry& e) {
  return numbers<T>(e, e.value, e.value_column);
}

template <class T>
T single(const Entry& e) {
  const std::vector<T> v = numbers<T>(e);
  if (v.size() != 1) syntax_error(e.line, e.value_column, "'" + e.key + "' takes one number");
  return v.front();
}

const Entry* find(const std::vector<Entry>& entries, std::string_view key) {
  for (const Entry& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

PolynomialTerm parse_term(const Entry& e) {
  const std::size_t colon = e.value.find(':');
  if (colon == std::string::npos) syntax_error(e.line, e.value_column, "term needs 'exponents : coefficients'");
  PolynomialTerm t;
  t.exponents = numbers<int>(e, std::string_view(e.value).substr(0, colon), e.value_column);
  t.coeffs = numbers<double>(e, std::string_view(e.value).substr(colon + 1), e.value_column + static_cast<int>(colon) + 1);
  return t;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_number(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  const std::vector<Entry> entries = tokenize(text);
  ScenarioSpec spec;
  const Entry* builtin_key = find(entries, "chart.builtin");
  const Entry* kind = find(entries, "chart.kind");
  if (builtin_key && kind) syntax_error(kind->line, kind->value_column, "chart.kind cannot be combined with chart.builtin");
  if (builtin_key) {
    try {
      spec = builtin(builtin_key->value);
    } catch (const Error&) {
      syntax_error(builtin_key->line, builtin_key->value_column, "unknown builtin chart '" + builtin_key->value + "'");
    }
  } else if (kind) {
    if (kind->value != "polynomial") syntax_error(kind->line, kind->value_column, "chart.kind must be 'polynomial'");
    spec.name = "polynomial";
    spec.ambient_m = 0;
  } else {
    throw Error(ErrorKind::Configuration, "chart: needs chart.builtin or chart.kind = polynomial");
  }

  bool ranks_given = false;
  for (const Entry& e : entries) {
    const std::string& k = e.key;
    if (k == "name") {
      if (e.value.empty()) syntax_error(e.line, e.value_column, "name must not be empty");
      spec.name = e.value;
    } else if (k == "ambient_m") {
      spec.ambient_m = single<int>(e);
    } else if (k == "declared_ranks") {
      const auto r = numbers<int>(e);
      if (r.size() != 2) syntax_error(e.line, e.value_column, "declared_ranks takes 'rank_D, rank_Dperp'");
      spec.declared_ranks = std::pair{r[0], r[1]};
      ranks_given = true;
    } else if (k == "chart.params") {
      spec.chart.params = numbers<double>(e);
    } else if (k == "chart.dim") {
      spec.chart.dim = single<int>(e);
    } else if (k == "chart.domain") {
      const auto d = numbers<double>(e);
      if (d.size() % 2 != 0) syntax_error(e.line, e.value_column, "chart.domain takes lo, hi pairs");
      spec.chart.domain.clear();
      for (std::size_t i = 0; i < d.size(); i += 2) spec.chart.domain.emplace_back(d[i], d[i + 1]);
    } else if (k == "chart.term") {
      spec.chart.terms.push_back(parse_term(e));
    } else if (k == "chart.dperp_override") {
      spec.chart.dperp_override = e.value;
    } else if (k == "grid.counts") {
      spec.grid.counts = numbers<int>(e);
    } else if (k == "grid.margin") {
      spec.grid.margin = single<double>(e);
    } else if (k == "tolerances.predicate") {
      spec.tolerances.predicate = single<double>(e);
    } else if (k == "tolerances.noise_floor") {
      spec.tolerances.noise_floor = single<double>(e);
    } else if (k == "tolerances.identity") {
      spec.tolerances.identity = single<double>(e);
    } else if (k == "tolerances.rank") {
      spec.tolerances.rank = single<double>(e);
    } else if (k == "leaf_charts.d" || k == "leaf_charts.dperp") {
      spec.leaf_charts.push_back({k == "leaf_charts.d" ? Distribution::D : Distribution::Dperp, numbers<int>(e)});
    }
  }
  if (!builtin_key && !ranks_given) spec.declared_ranks.reset();
  validate_scenario(spec);
  return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << "\n";
  out << "ambient_m = " << spec.ambient_m << "\n";
  if (spec.declared_ranks) out << "declared_ranks = " << spec.declared_ranks->first << ", " << spec.declared_ranks->second << "\n";

  const ChartSpec& c = spec.chart;
  out << "\n[chart]\n";
  if (!c.builtin.empty()) {
    out << "builtin = " << c.builtin << "\n";
    if (!c.params.empty()) out << "params = " << join(c.params) << "\n";
  } else {
    out << "kind = polynomial\n";
  }
  if (c.dim != 0) out << "dim = " << c.dim << "\n";
  if (!c.domain.empty()) {
    std::vector<double> flat;
    for (const auto& [lo, hi] : c.domain) {
      flat.push_back(lo);
      flat.push_back(hi);
    }
    out << "domain = " << join(flat) << "\n";
  }
  for (const PolynomialTerm& t : c.terms) out << "term = " << join(t.exponents) << " : " << join(t.coeffs) << "\n";
  if (!c.dperp_override.empty()) out << "dperp_override = " << c.dperp_override << "\n";

  out << "\n[grid]\n";
  if (!spec.grid.counts.empty()) out << "counts = " << join(spec.grid.counts) << "\n";
  out << "margin = " << format_number(spec.grid.margin) << "\n";

  const ToleranceSpec& t = spec.tolerances;
  if (t.predicate || t.noise_floor || t.identity || t.rank) {
    out << "\n[tolerances]\n";
    if (t.predicate) out << "predicate = " << format_number(*t.predicate) << "\n";
    if (t.noise_floor) out << "noise_floor = " << format_number(*t.noise_floor) << "\n";
    if (t.identity) out << "identity = " << format_number(*t.identity) << "\n";
    if (t.rank) out << "rank = " << format_number(*t.rank) << "\n";
  }
  if (!spec.leaf_charts.empty()) {
    out << "\n[leaf_charts]\n";
    for (const LeafChartSpec& l : spec.leaf_charts) out << (l.which == Distribution::D ? "d" : "dperp") << " = " << join(l.axes) << "\n";
  }
  return out.str();
}

}  // namespace qcr
