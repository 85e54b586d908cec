// Scenario documents: a JSON object naming a computation kind, its inputs and
// the values it must reproduce. Running one yields CSV tables, optional SVG
// plots, and a list of checks.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <type_traits>

#include <json.hpp>

#include "amenact/duality.hpp"
#include "amenact/properties.hpp"
#include "amenact/tiling.hpp"

namespace amenact {

using Json = nlohmann::json;

/// The document does not match the schema of its kind.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};

struct RunOptions {
  std::optional<std::size_t> prefix;  // overrides the document's prefix
  std::size_t budget = kDefaultElementBudget;
  double log_base = 0;  // 0: natural logarithms in tables
};

struct CheckResult {
  std::string label;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::string name, kind, title;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, std::string>> plots;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Value expressions
// ---------------------------------------------------------------------------

namespace detail {

/// Evaluates + - * / ^ with parentheses, numbers, log(x), and variables.
/// V is long double, or cpp_rational for exact counts (no log, integer
/// exponents only).
template <class V>
class ExprParser {
 public:
  ExprParser(const std::string& text, const std::map<std::string, V>& vars) : s_(text), vars_(vars) {}

  V parse() {
    const V v = sum();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  static constexpr bool kExact = !std::is_floating_point_v<V>;

  [[noreturn]] void fail(const std::string& why) const {
    throw SchemaError("expression \"" + s_ + "\": " + why);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  V sum() {
    V v = product();
    for (;;) {
      if (eat('+'))
        v += product();
      else if (eat('-'))
        v -= product();
      else
        return v;
    }
  }
  V product() {
    V v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        const V d = unary();
        if (kExact && d == 0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  V unary() {
    if (eat('-')) return -unary();
    const V b = primary();
    if (eat('^')) return power(b, unary());
    return b;
  }
  V power(const V& b, const V& e) {
    if constexpr (kExact) {
      using boost::multiprecision::denominator;
      using boost::multiprecision::numerator;
      if (denominator(e) != 1 || e < 0 || e > 100000) fail("exact exponents must be integers in [0, 100000]");
      return V(boost::multiprecision::pow(numerator(b), static_cast<unsigned>(numerator(e))),
               boost::multiprecision::pow(denominator(b), static_cast<unsigned>(numerator(e))));
    } else {
      return std::pow(b, e);
    }
  }
  V literal() {
    std::size_t j = i_;
    while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '.')) ++j;
    const std::string t = s_.substr(i_, j - i_);
    long exponent = 0;
    if (j + 1 < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
      std::size_t k = j + 1;
      if (s_[k] == '+' || s_[k] == '-') ++k;
      const std::size_t digits_from = k;
      while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
      if (k > digits_from) {
        exponent = std::stol(s_.substr(j + 1, k - j - 1));
        j = k;
      }
    }
    if (t.empty() || t == "." || std::count(t.begin(), t.end(), '.') > 1 || std::labs(exponent) > 4000)
      fail("bad number " + s_.substr(i_, j - i_));
    const std::string text = s_.substr(i_, j - i_);
    i_ = j;
    if constexpr (kExact) {
      std::string digits = t;
      long scale = -exponent;
      if (const std::size_t dot = t.find('.'); dot != std::string::npos) {
        digits.erase(dot, 1);
        scale += static_cast<long>(t.size() - dot - 1);
      }
      digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));  // a leading 0 means octal
      const BigCount m(digits.empty() ? "0" : digits);
      const BigCount p = boost::multiprecision::pow(BigCount(10), static_cast<unsigned>(std::labs(scale)));
      return scale >= 0 ? V(m, p) : V(m * p);
    } else {
      return std::stold(text);
    }
  }
  V primary() {
    skip();
    if (eat('(')) {
      const V v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) return literal();
    std::string name;
    while (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) name += s_[i_++];
    if (name.empty()) fail(i_ < s_.size() ? "unexpected '" + std::string(1, s_[i_]) + "'" : "unexpected end");
    if (name == "log") {
      if constexpr (kExact) {
        fail("log is not exact; counts must be rational expressions");
      } else {
        if (!eat('(')) fail("log needs parentheses");
        const V v = sum();
        if (!eat(')')) fail("missing ')'");
        return std::log(v);
      }
    }
    auto it = vars_.find(name);
    if (it == vars_.end()) fail("unknown name '" + name + "'");
    return it->second;
  }

  std::string s_;
  const std::map<std::string, V>& vars_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline long double evaluate(const std::string& expr, const std::map<std::string, long double>& vars = {}) {
  return detail::ExprParser<long double>(expr, vars).parse();
}

using ExactValue = boost::multiprecision::cpp_rational;

/// Exact evaluation for integer counts such as "4*3^(n-1)".
inline ExactValue evaluate_exact(const std::string& expr, const std::map<std::string, ExactValue>& vars = {}) {
  return detail::ExprParser<ExactValue>(expr, vars).parse();
}

// ---------------------------------------------------------------------------
// Schema helpers
// ---------------------------------------------------------------------------

namespace detail {

/// A JSON object whose keys are checked against an allowed list.
class Fields {
 public:
  Fields(const Json& j, std::string where, std::initializer_list<const char*> allowed) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw SchemaError(where_ + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
      if (!ok.count(key)) throw SchemaError(where_ + ": unknown key \"" + key + "\"");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const {
    if (!j_.contains(key)) throw SchemaError(where_ + ": missing key \"" + key + "\"");
    return j_.at(key);
  }
  std::string where(const char* key) const { return where_ + "." + key; }

  template <class T>
  T get(const char* key) const {
    try {
      return at(key).get<T>();
    } catch (const Json::exception&) {
      throw SchemaError(where(key) + ": wrong type");
    }
  }
  template <class T>
  T get(const char* key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

 private:
  const Json& j_;
  std::string where_;
};

inline std::string expr_text(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw SchemaError(where + ": expected a number or an expression string");
}

inline Rational rational_of(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  } catch (const Error&) {
  }
  throw SchemaError(where + ": expected an exact rational such as \"1/10\"");
}

inline Monoid parse_monoid_atom(const std::string& t, const std::string& where) {
  auto power = [&](const std::string& base) -> std::optional<std::size_t> {
    if (t == base) return 1;
    if (t.rfind(base + "^", 0) == 0) {
      const std::string e = t.substr(base.size() + 1);
      if (!e.empty() && std::all_of(e.begin(), e.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return static_cast<std::size_t>(std::stoul(e));
    }
    return std::nullopt;
  };
  if (auto d = power("N")) return Monoid::naturals(*d);
  if (auto d = power("Z")) return Monoid::integers(*d);
  if (t.rfind("Z/", 0) == 0) {
    const std::string m = t.substr(2);
    if (!m.empty() && std::all_of(m.begin(), m.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return Monoid::finite({std::stoll(m)});
  }
  if (t == "semidirect") return Monoid::semidirect();
  throw SchemaError(where + ": unknown monoid \"" + t + "\"");
}

/// "N", "Z^2", "Z/5", "semidirect", or products such as "Z x Z/2".
inline Monoid parse_monoid(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a monoid name such as \"Z^2\"");
  const std::string s = j.get<std::string>();
  std::vector<Monoid> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t x = s.find(" x ", start);
    std::string t = s.substr(start, x == std::string::npos ? std::string::npos : x - start);
    t.erase(0, t.find_first_not_of(' '));
    t.erase(t.find_last_not_of(' ') + 1);
    parts.push_back(parse_monoid_atom(t, where));
    if (x == std::string::npos) break;
    start = x + 3;
  }
  return parts.size() == 1 ? parts[0] : Monoid::product(parts);
}

inline AbelianGroup parse_group(const Json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) throw SchemaError(where + ": expected one of finite, free, direct_sum");
  const auto& [key, v] = *j.items().begin();
  try {
    if (key == "finite") return AbelianGroup::finite(v.get<std::vector<std::int64_t>>());
    if (key == "free") return AbelianGroup::free(v.get<std::size_t>());
  } catch (const Json::exception&) {
    throw SchemaError(where + "." + key + ": wrong type");
  }
  if (key == "direct_sum") {
    Fields f(v, where + ".direct_sum", {"base", "index"});
    return AbelianGroup::direct_sum(f.get<std::vector<std::int64_t>>("base"), parse_monoid(f.at("index"), f.where("index")));
  }
  throw SchemaError(where + ": unknown group family \"" + key + "\"");
}

inline MElement parse_melement(const Json& j, const Monoid& S, const std::string& where) {
  MElement s;
  try {
    s = j.get<MElement>();
  } catch (const Json::exception&) {
    throw SchemaError(where + ": expected a list of integers");
  }
  if (!S.contains(s)) throw SchemaError(where + ": " + to_string(s) + " is not an element of " + S.describe());
  return s;
}

inline std::vector<MElement> parse_melements(const Json& j, const Monoid& S, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a list of elements");
  std::vector<MElement> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_melement(j[i], S, where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Finite products and free groups take coordinate lists; direct sums take
/// {"at": index, "value": coords} or {"terms": [...]} of those.
inline GroupElement parse_element(const Json& j, const AbelianGroup& A, const std::string& where) {
  if (A.kind() == GroupKind::DirectSum) {
    if (j.is_array() && j.empty()) return A.zero();
    if (j.is_object() && j.contains("terms")) {
      Fields f(j, where, {"terms"});
      const Json& t = f.at("terms");
      if (!t.is_array()) throw SchemaError(where + ".terms: expected a list");
      GroupElement g = A.zero();
      for (std::size_t i = 0; i < t.size(); ++i)
        g = A.add(g, parse_element(t[i], A, where + ".terms[" + std::to_string(i) + "]"));
      return g;
    }
    Fields f(j, where, {"at", "value"});
    const MElement idx = parse_melement(f.at("at"), A.index(), f.where("at"));
    const auto v = f.get<Coords>("value");
    if (v.size() != A.base_dim()) throw SchemaError(where + ".value: expected " + std::to_string(A.base_dim()) + " coordinates");
    return A.single(idx, v);
  }
  Coords c;
  try {
    c = j.get<Coords>();
  } catch (const Json::exception&) {
    throw SchemaError(where + ": expected a list of integers");
  }
  if (c.size() != A.base_dim()) throw SchemaError(where + ": expected " + std::to_string(A.base_dim()) + " coordinates");
  return A.element(c);
}

inline std::vector<GroupElement> parse_elements(const Json& j, const AbelianGroup& A, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a list of elements");
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_element(j[i], A, where + "[" + std::to_string(i) + "]"));
  return out;
}

inline IntMatrix parse_matrix(const Json& j, const std::string& where) {
  std::vector<std::vector<std::int64_t>> rows;
  try {
    rows = j.get<std::vector<std::vector<std::int64_t>>>();
  } catch (const Json::exception&) {
    throw SchemaError(where + ": expected a list of integer rows");
  }
  if (rows.empty()) throw SchemaError(where + ": empty matrix");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw SchemaError(where + ": ragged matrix");
  return IntMatrix::from_rows(rows);
}

/// "identity", "zero", {"scalar": k}, {"matrix": rows}, or
/// {"shift": t, "base": rows, "truncating": bool} on direct sums.
inline Endomorphism parse_endomorphism(const Json& j, const AbelianGroup& A, const std::string& where) {
  if (j.is_string()) {
    if (j == "identity") return Endomorphism::identity(A);
    if (j == "zero") return Endomorphism::zero(A);
    throw SchemaError(where + ": unknown endomorphism \"" + j.get<std::string>() + "\"");
  }
  if (j.is_object() && j.contains("scalar")) {
    Fields f(j, where, {"scalar"});
    return Endomorphism::scalar(A, f.get<std::int64_t>("scalar"));
  }
  if (j.is_object() && j.contains("matrix")) {
    Fields f(j, where, {"matrix"});
    return Endomorphism::matrix(A, parse_matrix(f.at("matrix"), f.where("matrix")));
  }
  if (j.is_object() && j.contains("shift")) {
    Fields f(j, where, {"shift", "base", "truncating"});
    if (A.kind() != GroupKind::DirectSum) throw SchemaError(where + ": shifts act on direct sums");
    const MElement t = f.get<MElement>("shift");
    const bool trunc = f.get<bool>("truncating", false);
    if (f.has("base")) return Endomorphism::shift(A, t, parse_matrix(f.at("base"), f.where("base")), trunc);
    return Endomorphism::shift(A, t, trunc);
  }
  throw SchemaError(where + ": expected identity, zero, scalar, matrix or shift");
}

inline Action parse_action(const Json& j, const Monoid& S, const AbelianGroup& A, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected one generator per monoid coordinate");
  std::vector<Endomorphism> gens;
  for (std::size_t i = 0; i < j.size(); ++i) gens.push_back(parse_endomorphism(j[i], A, where + "[" + std::to_string(i) + "]"));
  return Action::from_generators(S, A, std::move(gens));
}

/// "whole", "trivial", {"multiples": k} or {"generators": [...]}.
inline Subgroup parse_subgroup(const Json& j, const AbelianGroup& A, const std::string& where) {
  if (j == "whole") return Subgroup::whole(A);
  if (j == "trivial") return Subgroup::trivial(A);
  if (j.is_object() && j.contains("multiples")) {
    Fields f(j, where, {"multiples"});
    return Subgroup::multiples(A, f.get<std::int64_t>("multiples"));
  }
  Fields f(j, where, {"generators"});
  return Subgroup::generated(A, parse_elements(f.at("generators"), A, f.where("generators")));
}

/// {"family": "box" | "corner" | "canonical", "E": [...]}; canonical nets
/// are linearized along E (default: the generators).
inline FolnerNet parse_net(const Json& j, const Monoid& S, const std::string& where) {
  Fields f(j, where, {"family", "E"});
  const auto family = f.get<std::string>("family");
  if (family == "box") return box_net(S);
  if (family == "corner") {
    return FolnerNet(S, "corner boxes", [S](std::size_t i) { return detail::corner_box(S, static_cast<std::int64_t>(i)); });
  }
  if (family == "canonical") {
    const auto net = canonical_net(S);
    return f.has("E") ? net.linear(MSubset(parse_melements(f.at("E"), S, f.where("E")))) : net.linear();
  }
  throw SchemaError(where + ".family: expected box, corner or canonical");
}

inline std::vector<std::pair<std::int64_t, std::int64_t>> parse_ranges(const Json& j, const std::string& where) {
  std::vector<std::pair<std::int64_t, std::int64_t>> r;
  try {
    for (const auto& p : j.get<std::vector<std::vector<std::int64_t>>>()) {
      if (p.size() != 2 || p[1] <= p[0]) throw SchemaError(where + ": each range is [lo, hi) with lo < hi");
      r.emplace_back(p[0], p[1] - 1);
    }
  } catch (const Json::exception&) {
    throw SchemaError(where + ": expected a list of [lo, hi) ranges");
  }
  return r;
}

/// {"box": [[lo, hi), ...]} or {"elements": [...]}.
inline MSubset parse_msubset(const Json& j, const Monoid& S, const std::string& where) {
  if (j.is_object() && j.contains("box")) {
    Fields f(j, where, {"box"});
    const auto r = parse_ranges(f.at("box"), f.where("box"));
    if (r.size() != S.dim()) throw SchemaError(where + ".box: one range per coordinate of " + S.describe());
    return MSubset(Monoid::box(r));
  }
  Fields f(j, where, {"elements"});
  return MSubset(parse_melements(f.at("elements"), S, f.where("elements")));
}

inline MonoidHom parse_hom(const Json& j, const Monoid& S, const std::string& where) {
  if (j.is_object() && j.contains("projection")) {
    Fields f(j, where, {"projection"});
    return MonoidHom::projection(S, f.get<std::vector<std::size_t>>("projection"));
  }
  Fields f(j, where, {"target", "select"});
  return MonoidHom::coordinate_map(S, parse_monoid(f.at("target"), f.where("target")),
                                   f.get<std::vector<std::size_t>>("select"));
}

/// "cardinality", {"constant": a}, {"card_pi": hom}, or
/// {"trajectory": {"group", "action", "seed"}}.
inline SetFunction parse_set_function(const Json& j, const Monoid& S, const RunOptions& opt, const std::string& where) {
  if (j == "cardinality") return SetFunction::cardinality(S);
  if (j.is_object() && j.contains("constant")) {
    Fields f(j, where, {"constant"});
    return SetFunction::constant(S, f.get<double>("constant"));
  }
  if (j.is_object() && j.contains("card_pi")) {
    Fields f(j, where, {"card_pi"});
    return card_pi(parse_hom(f.at("card_pi"), S, f.where("card_pi")));
  }
  Fields f(j, where, {"trajectory"});
  Fields t(f.at("trajectory"), f.where("trajectory"), {"group", "action", "seed"});
  const auto A = parse_group(t.at("group"), t.where("group"));
  const auto a = parse_action(t.at("action"), S, A, t.where("action"));
  return trajectory_length(a, FiniteSubset(parse_elements(t.at("seed"), A, t.where("seed"))), opt.budget);
}

// ---------------------------------------------------------------------------
// Expectations on ratio tables
// ---------------------------------------------------------------------------

struct ClosedCount {
  std::string count, ratio_near;
  std::size_t at = 0;
  double tolerance = 0;
};

/// count / ratio per row (from row ratio_from on), tail bounds and an
/// extrapolated closed count.
struct Expectation {
  std::optional<std::string> count, ratio, tail, tail_below;
  std::size_t ratio_from = 1;
  double tolerance = 1e-12;
  std::optional<ClosedCount> closed;
};

inline Expectation parse_expectation(const Json& j, const std::string& where) {
  Fields f(j, where, {"count", "ratio", "ratio_from", "tail", "tail_below", "tolerance", "closed"});
  Expectation e;
  if (f.has("count")) e.count = expr_text(f.at("count"), f.where("count"));
  if (f.has("ratio")) e.ratio = expr_text(f.at("ratio"), f.where("ratio"));
  if (f.has("tail")) e.tail = expr_text(f.at("tail"), f.where("tail"));
  if (f.has("tail_below")) e.tail_below = expr_text(f.at("tail_below"), f.where("tail_below"));
  e.ratio_from = f.get<std::size_t>("ratio_from", 1);
  e.tolerance = f.get<double>("tolerance", 1e-12);
  if (f.has("closed")) {
    Fields c(f.at("closed"), f.where("closed"), {"count", "at", "ratio_near", "tolerance"});
    e.closed = ClosedCount{expr_text(c.at("count"), c.where("count")), expr_text(c.at("ratio_near"), c.where("ratio_near")),
                           c.get<std::size_t>("at"), c.get<double>("tolerance")};
  }
  return e;
}

inline std::string fmt(long double x) { return format_real(static_cast<double>(x)); }

/// Checks an estimate row by row; the detail of a failure names its row.
inline void check_estimate(const std::string& label, const IntegralEstimate& est, const Expectation& e,
                           std::vector<CheckResult>& out) {
  auto vars = [](const IntegralRow& r) {
    return std::map<std::string, long double>{{"n", static_cast<long double>(r.index)},
                                              {"size", static_cast<long double>(r.size)}};
  };
  if (e.count) {
    CheckResult c{label + ": count = " + *e.count, true, std::to_string(est.rows.size()) + " rows match"};
    for (const auto& r : est.rows) {
      const ExactValue want = evaluate_exact(*e.count, {{"n", ExactValue(r.index)}, {"size", ExactValue(r.size)}});
      if (!r.exact || ExactValue(*r.exact) != want) {
        c.passed = false;
        c.detail = "row n=" + std::to_string(r.index) + ": count " + (r.exact ? r.exact->str() : "inexact") +
                   ", expected " + want.str();
        break;
      }
    }
    out.push_back(c);
  }
  if (e.ratio) {
    CheckResult c{label + ": ratio = " + *e.ratio, true, ""};
    long double worst = 0;
    for (const auto& r : est.rows) {
      if (r.index < e.ratio_from) continue;
      const long double want = evaluate(*e.ratio, vars(r));
      const long double d = std::fabs(static_cast<long double>(r.ratio) - want);
      worst = std::max(worst, d);
      if (!(d <= e.tolerance)) {
        c.passed = false;
        c.detail = "row n=" + std::to_string(r.index) + ": ratio " + format_real(r.ratio) + ", expected " + fmt(want) +
                   " within " + fmt(e.tolerance);
        break;
      }
    }
    if (c.passed) c.detail = "max deviation " + fmt(worst) + " <= " + fmt(e.tolerance);
    out.push_back(c);
  }
  if (e.tail) {
    const long double want = evaluate(*e.tail);
    const bool ok = !est.rows.empty() && std::fabs(static_cast<long double>(est.tail()) - want) <= e.tolerance;
    out.push_back({label + ": tail = " + *e.tail, ok,
                   "tail " + format_real(est.tail()) + " at n=" + std::to_string(est.rows.size()) + ", expected " +
                       fmt(want) + " within " + fmt(e.tolerance)});
  }
  if (e.tail_below) {
    const long double bound = evaluate(*e.tail_below);
    const bool ok = !est.rows.empty() && est.tail() < bound;
    out.push_back({label + ": tail < " + *e.tail_below, ok,
                   "tail " + format_real(est.tail()) + " at n=" + std::to_string(est.rows.size()) + " against " +
                       fmt(bound)});
  }
  if (e.closed) {
    const auto& cc = *e.closed;
    const long double n = static_cast<long double>(cc.at);
    const long double count = evaluate(cc.count, {{"n", n}});
    // log(count) / |F| with |F| = n on the boxes [0, n) of N
    const long double ratio = std::log(count) / n, want = evaluate(cc.ratio_near, {{"n", n}});
    const bool ok = std::fabs(ratio - want) < cc.tolerance;
    out.push_back({label + ": closed count " + cc.count + " at n=" + std::to_string(cc.at), ok,
                   "ratio " + fmt(ratio) + ", expected " + fmt(want) + " within " + fmt(cc.tolerance)});
  }
}

inline std::vector<std::pair<double, double>> ratio_points(const IntegralEstimate& est) {
  std::vector<std::pair<double, double>> p;
  for (const auto& r : est.rows) p.emplace_back(static_cast<double>(r.index), r.ratio);
  return p;
}

inline std::size_t prefix_of(const Fields& f, const RunOptions& opt, std::size_t fallback) {
  const std::size_t p = opt.prefix ? *opt.prefix : f.get<std::size_t>("prefix", fallback);
  if (p < 1) throw SchemaError(f.where("prefix") + ": must be >= 1");
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kinds
// ---------------------------------------------------------------------------

struct ScenarioKind {
  std::string name, summary;
  std::vector<std::pair<std::string, std::string>> fields;  // key, description
};

inline const std::vector<ScenarioKind>& scenario_kinds() {
  static const std::vector<std::pair<std::string, std::string>> common{
      {"kind", "computation kind (required)"},
      {"name", "identifier used for output file names (required)"},
      {"title", "one-line description"},
      {"description", "free text"},
      {"plot", "write SVG ratio plots (default false)"}};
  auto with_common = [&](std::vector<std::pair<std::string, std::string>> f) {
    f.insert(f.begin(), common.begin(), common.end());
    return f;
  };
  static const std::vector<ScenarioKind> kinds{
      {"folner-verify", "defect ratios |F_i s sym F_i| / |F_i| of a net against test elements",
       with_common({{"monoid", "monoid name, e.g. \"Z^2\" or \"Z x Z/2\""},
                    {"net", "{\"family\": box|corner|canonical, \"E\": [...]}"},
                    {"test", "list of monoid elements"},
                    {"prefix", "number of net indices (>= 2)"},
                    {"expect", "{\"tail_below\": expr} on the maximal defect at the last index"}})},
      {"canonical-net", "box sides of the canonical net at precisions 1..prefix with the defect bound 1/n",
       with_common({{"monoid", "monoid name"}, {"E", "list of monoid elements"}, {"prefix", "largest precision"}})},
      {"tiling", "greedy eps-tiling of a box by box tiles, with the tiling and counting checks",
       with_common({{"monoid", "monoid name"},
                    {"domain", "{\"box\": [[lo, hi), ...]} or {\"elements\": [...]}"},
                    {"tiles", "list of subsets containing the identity, largest first"},
                    {"eps", "exact rational, e.g. \"1/10\""}})},
      {"semidirect-defect", "delta_{n,m}(x) on G = [0,m)^2 x [0,n) in Z^2 x| Z",
       with_common({{"x", "element of Z^2 x| Z"},
                    {"sweep", "{\"from\": n0, \"to\": n1, \"at_least\": rational} over n = m"},
                    {"probes", "[{\"n\": n, \"m\": m, \"below\": rational}]"}})},
      {"integral", "ratios f(F_i)/|F_i| of a set function along a net",
       with_common({{"monoid", "monoid name"},
                    {"function", "cardinality | {constant} | {card_pi: hom} | {trajectory: {group, action, seed}}"},
                    {"net", "net spec"},
                    {"prefix", "number of indices"},
                    {"expect", "expectation on the ratio table"}})},
      {"fubini", "integral of f along boxes of S against the integral of Theta along boxes of C",
       with_common({{"monoid", "product monoid S"},
                    {"keep", "coordinates kept by the projection S -> C"},
                    {"function", "set function spec"},
                    {"prefix", "number of indices"},
                    {"expect", "{\"difference_below\": expr}"}})},
      {"entropy", "trajectory growth log|T_F(X)| / |F| for seeds of an action",
       with_common({{"monoid", "acting monoid"},
                    {"group", "{finite: [...]} | {free: k} | {direct_sum: {base, index}}"},
                    {"action", "one generator per monoid coordinate"},
                    {"restrict", "{\"matrix\": rows, \"source\": monoid}: restrict along an embedding"},
                    {"seeds", "[{label, subset | subgroup, probe, expect}]"},
                    {"net", "net spec (default box)"},
                    {"prefix", "number of indices"}})},
      {"addition", "ent of an action against ent on an invariant subgroup plus ent on the quotient",
       with_common({{"monoid", "acting monoid"},
                    {"group", "torsion group"},
                    {"action", "generators"},
                    {"B", "invariant subgroup"},
                    {"X", "generating subgroup of A"},
                    {"X_B", "generating subgroup inside B"},
                    {"X_Q", "generating subgroup of the quotient (quotient coordinates)"},
                    {"net", "net spec"},
                    {"prefix", "number of indices"},
                    {"window", "certificate window (default 4)"},
                    {"expect", "{whole, sub, quotient: expr; residual_exact: bool}"}})},
      {"bridge", "trajectory sizes against indices of cotrajectories of annihilators",
       with_common({{"sweep", "{\"max_order\", \"endomorphisms\", \"max_k\", \"seed\"}: all small groups"},
                    {"monoid", "acting monoid (single action mode)"},
                    {"group", "finite product or direct sum"},
                    {"action", "generators"},
                    {"B", "finite subgroup"},
                    {"window", "window of the dual for direct sums"},
                    {"net", "net spec"},
                    {"prefix", "number of indices"},
                    {"expect", "{\"exact\": bool, \"ratio\": expr, \"tail_difference_below\": expr}"}})},
      {"duality-props", "exhaustive duality laws or the randomized lemma property suite",
       with_common({{"suite", "duality | lemmas"},
                    {"max_order", "duality: largest group order"},
                    {"pairs_exhaustive_up_to", "duality: all pairs of subgroups up to this order"},
                    {"pair_samples", "duality: sampled pairs per larger group"},
                    {"cases", "lemmas: random cases per property (>= 1)"},
                    {"seed", "RNG seed"}})},
  };
  return kinds;
}

namespace detail {

using Runner = std::function<void(const Json&, const RunOptions&, ScenarioResult&)>;

inline void run_folner_verify(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "net", "test", "prefix", "expect"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const auto net = parse_net(f.at("net"), S, "net");
  const MSubset test(parse_melements(f.at("test"), S, "test"));
  const std::size_t prefix = prefix_of(f, opt, 16);
  if (prefix < 2) throw SchemaError("prefix: must be >= 2");
  const auto rep = verify_folner(net, test, prefix);
  res.tables.emplace_back("defects", rep.csv());
  if (f.has("expect")) {
    Fields e(f.at("expect"), "expect", {"tail_below"});
    const long double bound = evaluate(expr_text(e.at("tail_below"), e.where("tail_below")));
    res.checks.push_back({"max defect at the last index < " + fmt(bound), to_double(rep.tail()) < bound,
                          "defect " + format_rational(rep.tail()) + " at index " + std::to_string(prefix)});
  }
}

inline void run_canonical_net(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "E", "prefix"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const MSubset E(parse_melements(f.at("E"), S, "E"));
  const std::size_t prefix = prefix_of(f, opt, 8);
  const auto net = canonical_net(S);
  CsvTable t({"n", "side", "|F|", "max defect", "bound"});
  CheckResult c{"F s ~_{1/n} F for s in E", true, std::to_string(prefix) + " precisions"};
  for (std::size_t n = 1; n <= prefix; ++n) {
    const MSubset F = net.at(E, n);
    Rational worst(0);
    for (const auto& s : E) worst = std::max(worst, sym_diff_ratio_exact(S, F, s));
    const Rational bound(1, static_cast<std::int64_t>(n));
    t.add_row({std::to_string(n), std::to_string(net.side(E, n)), std::to_string(F.size()), format_rational(worst),
               format_rational(bound)});
    if (worst > bound && c.passed) {
      c.passed = false;
      c.detail = "row n=" + std::to_string(n) + ": defect " + format_rational(worst) + " > " + format_rational(bound);
    }
  }
  res.tables.emplace_back("canonical", std::move(t));
  res.checks.push_back(c);
}

inline void run_tiling(const Json& j, const RunOptions&, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "domain", "tiles", "eps"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const MSubset D = parse_msubset(f.at("domain"), S, "domain");
  const Json& tj = f.at("tiles");
  if (!tj.is_array() || tj.empty()) throw SchemaError("tiles: expected a nonempty list");
  std::vector<MSubset> tiles;
  for (std::size_t i = 0; i < tj.size(); ++i) tiles.push_back(parse_msubset(tj[i], S, "tiles[" + std::to_string(i) + "]"));
  const Rational eps = rational_of(f.at("eps"), "eps");
  const auto w = greedy_tiler(S, D, tiles, eps);
  res.checks.push_back({"greedy tiler returns a witness", w.has_value(), w ? "witness found" : "no placement reaches eps"});
  if (!w) return;
  const auto r = check_tiling(S, D, *w, eps);
  CsvTable t({"tile", "|F_j|", "centers", "covered"});
  for (std::size_t k = 0; k < w->tiles.size(); ++k)
    t.add_row({std::to_string(k + 1), std::to_string(w->tiles[k].size()), std::to_string(w->centers[k].size()),
               std::to_string(w->tiles[k].size() * w->centers[k].size())});
  res.tables.emplace_back("tiles", std::move(t));
  CsvTable s({"d", "u", "b", "eps", "eps d - (d - u)", "eps b - (b - u)"});
  s.add_row({std::to_string(r.d), std::to_string(r.u), std::to_string(r.b), format_rational(eps), format_real(r.margin2()),
             format_real(r.margin3())});
  res.tables.emplace_back("summary", std::move(s));
  res.checks.push_back({"witness is an eps-tiling", r.passed(),
                        "d=" + std::to_string(r.d) + " u=" + std::to_string(r.u) + " b=" + std::to_string(r.b)});
  if (r.passed()) {
    res.checks.push_back({"|1/d - 1/b| < 2 eps / b", reciprocal_size_check(r), "exact rational comparison"});
    res.checks.push_back({"u <= b and b - u <= eps b", covered_mass_check(r), "exact rational comparison"});
  }
}

inline void run_semidirect_defect(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "x", "sweep", "probes"});
  const MElement x = parse_melement(f.at("x"), Monoid::semidirect(), "x");
  CsvTable t({"n", "m", "outside", "|G|", "delta"});
  auto row = [&](std::int64_t n, std::int64_t m) {
    const auto d = semidirect_defect(n, m, x, opt.budget);
    t.add_row({std::to_string(n), std::to_string(m), std::to_string(d.outside), std::to_string(d.size),
               format_rational(d.value())});
    return d.value();
  };
  if (f.has("sweep")) {
    Fields s(f.at("sweep"), "sweep", {"from", "to", "at_least"});
    const auto lo = s.get<std::int64_t>("from"), hi = s.get<std::int64_t>("to");
    const Rational bound = rational_of(s.at("at_least"), "sweep.at_least");
    if (lo < 1 || hi < lo) throw SchemaError("sweep: need 1 <= from <= to");
    CheckResult c{"delta_{n,n} >= " + format_rational(bound) + " for n in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]",
                  true, ""};
    Rational least(1);
    for (std::int64_t n = lo; n <= hi; ++n) {
      const Rational v = row(n, n);
      least = std::min(least, v);
      if (v < bound && c.passed) {
        c.passed = false;
        c.detail = "row n=" + std::to_string(n) + ": delta " + format_rational(v);
      }
    }
    if (c.passed) c.detail = "least delta " + format_rational(least);
    res.checks.push_back(c);
  }
  if (f.has("probes")) {
    const Json& p = f.at("probes");
    if (!p.is_array()) throw SchemaError("probes: expected a list");
    for (std::size_t i = 0; i < p.size(); ++i) {
      Fields q(p[i], "probes[" + std::to_string(i) + "]", {"n", "m", "below"});
      const auto n = q.get<std::int64_t>("n"), m = q.get<std::int64_t>("m");
      const Rational bound = rational_of(q.at("below"), q.where("below"));
      const Rational v = row(n, m);
      res.checks.push_back({"delta_{" + std::to_string(n) + "," + std::to_string(m) + "} < " + format_rational(bound),
                            v < bound, "delta " + format_rational(v) + " = " + format_real(to_double(v))});
    }
  }
  res.tables.emplace_back("defects", std::move(t));
}

inline void add_plot(ScenarioResult& res, const Json& j, const std::string& name, const std::string& title,
                     std::vector<PlotSeries> series) {
  if (j.value("plot", false)) res.plots.emplace_back(name, svg_plot(title, series));
}

inline void run_integral(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "function", "net", "prefix", "expect"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const auto fn = parse_set_function(f.at("function"), S, opt, "function");
  const auto net = f.has("net") ? parse_net(f.at("net"), S, "net") : box_net(S);
  const auto est = integral(fn, net, prefix_of(f, opt, 16));
  res.tables.emplace_back("integral", est.csv(opt.log_base));
  add_plot(res, j, "integral", res.title, {{fn.name(), ratio_points(est)}});
  if (f.has("expect")) check_estimate(fn.name(), est, parse_expectation(f.at("expect"), "expect"), res.checks);
}

inline void run_fubini(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "keep", "function", "prefix", "expect"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const auto pi = MonoidHom::projection(S, f.get<std::vector<std::size_t>>("keep"));
  const auto sigma = find_good_section(pi);
  if (!sigma) throw SchemaError("keep: the projection has no good section");
  const auto fn = parse_set_function(f.at("function"), S, opt, "function");
  const std::size_t prefix = prefix_of(f, opt, 16);
  const auto rep = fubini_check(fn, *sigma, box_net(S), box_net(pi.target()), box_net(pi.kernel().monoid), prefix);
  res.tables.emplace_back("lhs", rep.lhs.csv(opt.log_base));
  res.tables.emplace_back("rhs", rep.rhs.csv(0, "theta"));
  add_plot(res, j, "fubini", res.title, {{"H_S(f)", ratio_points(rep.lhs)}, {"H_C(Theta)", ratio_points(rep.rhs)}});
  if (f.has("expect")) {
    Fields e(f.at("expect"), "expect", {"difference_below"});
    const long double bound = evaluate(expr_text(e.at("difference_below"), e.where("difference_below")));
    res.checks.push_back({"|H_S(f) - H_C(Theta)| < " + fmt(bound), rep.difference() < bound,
                          "H_S tail " + format_real(rep.lhs.tail()) + ", H_C tail " + format_real(rep.rhs.tail()) +
                              ", difference " + format_real(rep.difference()) + " at prefix " + std::to_string(prefix)});
  }
}

inline void run_entropy(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario",
           {"kind", "name", "title", "description", "plot", "monoid", "group", "action", "restrict", "seeds", "net", "prefix"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const AbelianGroup A = parse_group(f.at("group"), "group");
  Action a = parse_action(f.at("action"), S, A, "action");
  if (f.has("restrict")) {
    Fields r(f.at("restrict"), "restrict", {"matrix", "source"});
    const Monoid src = r.has("source") ? parse_monoid(r.at("source"), "restrict.source") : S;
    a = restriction(a, MonoidEmbedding{src, S, parse_matrix(r.at("matrix"), "restrict.matrix")});
  }
  const Monoid& T = a.monoid();
  const auto net = f.has("net") ? parse_net(f.at("net"), T, "net") : box_net(T);
  const std::size_t prefix = prefix_of(f, opt, 12);
  const Json& seeds = f.at("seeds");
  if (!seeds.is_array() || seeds.empty()) throw SchemaError("seeds: expected a nonempty list");
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string where = "seeds[" + std::to_string(i) + "]";
    Fields s(seeds[i], where, {"label", "subset", "subgroup", "probe", "expect"});
    const std::string label = s.get<std::string>("label", "seed" + std::to_string(i + 1));
    if (s.has("subset") == s.has("subgroup")) throw SchemaError(where + ": give exactly one of subset, subgroup");
    std::optional<EntropyEstimate> est;
    if (s.get<bool>("probe", false)) {
      if (!s.has("subset")) throw SchemaError(where + ".probe: needs a subset seed");
      const FiniteSubset X(parse_elements(s.at("subset"), A, s.where("subset")));
      const auto rep = locally_nilpotent_probe(a, X, prefix);
      res.checks.push_back({label + ": alpha(s)(X) = 0 for some s", rep.found,
                            rep.found ? "s = " + to_string(rep.annihilator) : rep.note});
      if (!rep.shifted_estimate) continue;
      est = rep.shifted_estimate;
    } else {
      Seed X = s.has("subset") ? Seed(FiniteSubset(parse_elements(s.at("subset"), A, s.where("subset"))))
                               : Seed(parse_subgroup(s.at("subgroup"), A, s.where("subgroup")));
      est = H_alg_estimate(a, X, net, prefix, opt.budget);
    }
    res.tables.emplace_back(label, est->csv(opt.log_base));
    series.push_back({label, ratio_points(est->estimate)});
    if (s.has("expect")) check_estimate(label, est->estimate, parse_expectation(s.at("expect"), where + ".expect"), res.checks);
  }
  add_plot(res, j, "entropy", res.title, std::move(series));
}

inline void run_addition(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "monoid", "group", "action", "B", "X", "X_B",
                           "X_Q", "net", "prefix", "window", "expect"});
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const AbelianGroup A = parse_group(f.at("group"), "group");
  const Action a = parse_action(f.at("action"), S, A, "action");
  const Subgroup B = parse_subgroup(f.at("B"), A, "B");
  const auto ind = quotient_and_sub_actions(a, B);
  const auto net = f.has("net") ? parse_net(f.at("net"), S, "net") : box_net(S);
  const auto rep = addition_check(a, B, parse_subgroup(f.at("X"), A, "X"), parse_subgroup(f.at("X_B"), A, "X_B"),
                                  parse_subgroup(f.at("X_Q"), ind.quotient.group(), "X_Q"), net, prefix_of(f, opt, 10),
                                  f.get<std::int64_t>("window", 4));
  CsvTable t({"index", "|F|", "|T_F(X)|", "|T_F(X_B)|", "|T_F(X_Q)|", "residual"});
  const double scale = opt.log_base > 0 ? 1.0 / std::log(opt.log_base) : 1.0;
  for (const auto& r : rep.rows)
    t.add_row({std::to_string(r.index), std::to_string(r.size), r.whole.str(), r.sub.str(), r.quotient.str(),
               format_real(r.residual * scale)});
  res.tables.emplace_back("addition", std::move(t));
  add_plot(res, j, "addition", res.title,
           {{"whole", ratio_points(rep.whole.estimate)},
            {"sub", ratio_points(rep.sub.estimate)},
            {"quotient", ratio_points(rep.quotient.estimate)}});
  res.checks.push_back({"generating subgroups certified", rep.whole_certified && rep.sub_certified && rep.quotient_certified,
                        std::string("whole ") + (rep.whole_certified ? "yes" : "no") + ", sub " +
                            (rep.sub_certified ? "yes" : "no") + ", quotient " + (rep.quotient_certified ? "yes" : "no")});
  if (!f.has("expect")) return;
  Fields e(f.at("expect"), "expect", {"whole", "sub", "quotient", "residual_exact", "tolerance"});
  const double tol = e.get<double>("tolerance", 1e-12);
  auto value = [&](const char* key, const EntropyEstimate& est) {
    const long double want = evaluate(expr_text(e.at(key), e.where(key)));
    res.checks.push_back({std::string("ent of the ") + key + " action = " + expr_text(e.at(key), ""),
                          std::fabs(static_cast<long double>(est.tail()) - want) <= tol,
                          "tail " + format_real(est.tail()) + ", expected " + fmt(want) + " within " + fmt(tol)});
  };
  if (e.has("whole")) value("whole", rep.whole);
  if (e.has("sub")) value("sub", rep.sub);
  if (e.has("quotient")) value("quotient", rep.quotient);
  if (e.get<bool>("residual_exact", false)) {
    CheckResult c{"|T_F(X)| = |T_F(X_B)| |T_F(X_Q)| at every index", rep.exact_everywhere(),
                  "residual " + format_real(rep.residual_tail()) + " at the last index"};
    for (const auto& r : rep.rows)
      if (!r.exact_match) {
        c.detail = "row n=" + std::to_string(r.index) + ": " + r.whole.str() + " vs " + r.sub.str() + " * " + r.quotient.str();
        break;
      }
    res.checks.push_back(c);
  }
}

inline void run_bridge(const Json& j, const RunOptions& opt, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "sweep", "monoid", "group", "action", "B",
                           "window", "net", "prefix", "expect"});
  if (f.has("sweep")) {
    Fields s(f.at("sweep"), "sweep", {"max_order", "endomorphisms", "max_k", "seed"});
    const auto rep = ct_sweep(s.get<std::int64_t>("max_order"), s.get<std::size_t>("endomorphisms"),
                              s.get<std::int64_t>("max_k"), s.get<std::uint64_t>("seed", 1));
    CsvTable t({"max order", "groups", "actions", "checks", "failures", "least sample"});
    t.add_row({std::to_string(rep.max_order), std::to_string(rep.groups), std::to_string(rep.actions),
               std::to_string(rep.checks), std::to_string(rep.failures), std::to_string(rep.min_endomorphisms)});
    res.tables.emplace_back("sweep", std::move(t));
    res.checks.push_back({"|T_F(alpha, B)| = [A^ : C_F(alpha^, B^perp)] on every sampled case", rep.passed(),
                          rep.first_failure.value_or(std::to_string(rep.checks) + " cases over " +
                                                     std::to_string(rep.groups) + " groups and " +
                                                     std::to_string(rep.actions) + " actions")});
    return;
  }
  const Monoid S = parse_monoid(f.at("monoid"), "monoid");
  const AbelianGroup A = parse_group(f.at("group"), "group");
  const Action a = parse_action(f.at("action"), S, A, "action");
  const Subgroup B = parse_subgroup(f.at("B"), A, "B");
  const auto net = f.has("net") ? parse_net(f.at("net"), S, "net") : box_net(S);
  const std::size_t prefix = prefix_of(f, opt, 8);
  const auto rep = A.kind() == GroupKind::DirectSum
                       ? bridge_check_windowed(a, B, net, prefix, f.get<std::int64_t>("window", static_cast<std::int64_t>(prefix) + 2))
                       : bridge_check(a, B, net, prefix);
  res.tables.emplace_back("bridge", rep.csv(opt.log_base));
  add_plot(res, j, "bridge", res.title,
           {{"algebraic", ratio_points(rep.algebraic)}, {"topological", ratio_points(rep.topological)}});
  if (!f.has("expect")) return;
  Fields e(f.at("expect"), "expect", {"exact", "ratio", "tail_difference_below", "tolerance"});
  if (e.get<bool>("exact", false)) {
    CheckResult c{"l(T_F(alpha, B)) = log [A^ : C_F(alpha^, B^perp)] at every index", rep.exact_everywhere(),
                  std::to_string(rep.rows.size()) + " rows"};
    for (const auto& r : rep.rows)
      if (!r.exact) {
        c.detail = "row n=" + std::to_string(r.index) + ": " + r.trajectory.str() + " vs " + r.cover.str();
        break;
      }
    res.checks.push_back(c);
  }
  if (e.has("ratio")) {
    Expectation x;
    x.ratio = expr_text(e.at("ratio"), e.where("ratio"));
    x.tolerance = e.get<double>("tolerance", 1e-12);
    check_estimate("algebraic", rep.algebraic, x, res.checks);
    check_estimate("topological", rep.topological, x, res.checks);
  }
  if (e.has("tail_difference_below")) {
    const long double bound = evaluate(expr_text(e.at("tail_difference_below"), e.where("tail_difference_below")));
    res.checks.push_back({"|H_alg - H_top| < " + fmt(bound), rep.tail_difference() < bound,
                          "difference " + format_real(rep.tail_difference())});
  }
}

inline void run_duality_props(const Json& j, const RunOptions&, ScenarioResult& res) {
  Fields f(j, "scenario", {"kind", "name", "title", "description", "plot", "suite", "max_order", "pairs_exhaustive_up_to",
                           "pair_samples", "cases", "seed"});
  const auto suite = f.get<std::string>("suite");
  const auto seed = f.get<std::uint64_t>("seed", 1);
  if (suite == "duality") {
    const auto rep = duality_sweep(f.get<std::int64_t>("max_order"), f.get<std::int64_t>("pairs_exhaustive_up_to", 32),
                                   f.get<std::size_t>("pair_samples", 100), seed);
    CsvTable t({"max order", "groups", "subgroups", "pairs", "failures"});
    t.add_row({std::to_string(rep.max_order), std::to_string(rep.groups), std::to_string(rep.subgroups),
               std::to_string(rep.pairs), std::to_string(rep.failures)});
    res.tables.emplace_back("duality", std::move(t));
    res.checks.push_back({"(B^perp)^perp = B, |B| |B^perp| = |A|, (B1 + B2)^perp = B1^perp cap B2^perp", rep.passed(),
                          rep.first_failure.value_or(std::to_string(rep.subgroups) + " subgroups and " +
                                                     std::to_string(rep.pairs) + " pairs over " +
                                                     std::to_string(rep.groups) + " groups")});
    return;
  }
  if (suite == "lemmas") {
    const auto cases = f.get<std::size_t>("cases", 200);
    if (cases < 1) throw SchemaError("cases: must be >= 1");
    // no timing column: tables are byte-identical across runs
    CsvTable t({"property", "cases", "passed"});
    for (const auto& r : lemma_property_suite(cases, seed)) {
      t.add_row({r.name, std::to_string(r.cases), r.passed() ? "yes" : "no"});
      res.checks.push_back({r.name, r.passed(), r.counterexample.value_or(std::to_string(r.cases) + " cases")});
    }
    res.tables.emplace_back("properties", std::move(t));
    return;
  }
  throw SchemaError("suite: expected duality or lemmas");
}

inline const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"folner-verify", run_folner_verify}, {"canonical-net", run_canonical_net}, {"tiling", run_tiling},
      {"semidirect-defect", run_semidirect_defect}, {"integral", run_integral}, {"fubini", run_fubini},
      {"entropy", run_entropy}, {"addition", run_addition}, {"bridge", run_bridge},
      {"duality-props", run_duality_props}};
  return r;
}

}  // namespace detail

/// Validates and runs one scenario. Schema problems and invalid inputs raise
/// SchemaError; budgets raise BudgetExceeded or WindowEscape.
inline ScenarioResult run_scenario(const Json& doc, const RunOptions& opt = {}) {
  if (!doc.is_object()) throw SchemaError("scenario: expected an object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw SchemaError("scenario: missing key \"kind\"");
  if (!doc.contains("name") || !doc["name"].is_string()) throw SchemaError("scenario: missing key \"name\"");
  const auto kind = doc["kind"].get<std::string>();
  const auto& r = detail::runners();
  auto it = r.find(kind);
  if (it == r.end()) throw SchemaError("scenario: unknown kind \"" + kind + "\"");
  const auto name = doc["name"].get<std::string>();
  if (name.empty() || name.find_first_of("/\\ ") != std::string::npos)
    throw SchemaError("scenario: name must be a nonempty file-name-safe word");
  if (doc.contains("plot") && !doc["plot"].is_boolean()) throw SchemaError("scenario.plot: expected true or false");
  ScenarioResult res;
  res.kind = kind;
  res.name = name;
  res.title = doc.value("title", name);
  try {
    it->second(doc, opt, res);
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const WindowEscape&) {
    throw;
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid scenario input: ") + e.what());
  }
  return res;
}

}  // namespace amenact
