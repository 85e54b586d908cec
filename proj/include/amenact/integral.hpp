// Nonnegative set functions on finite subsets of a monoid, their ratio
// limits f(F_i)/|F_i| along Folner nets, and the fiber transform used to
// compare an integral over S with an iterated one over C and N.
#pragma once

#include "amenact/folner.hpp"

#include <random>

namespace amenact {

enum class Provenance { TrajectoryLength, CoverCount, CardinalityOfImage, Constant, User };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::TrajectoryLength:
      return "trajectory-length";
    case Provenance::CoverCount:
      return "cover-count";
    case Provenance::CardinalityOfImage:
      return "cardinality-of-image";
    case Provenance::Constant:
      return "constant";
    default:
      return "user";
  }
}

/// How an exact integer, when present, relates to the real value.
enum class ExactKind { None, Count, LogOfCount };

struct SetValue {
  double value = 0;
  std::optional<BigCount> exact;
};

class SetFunction {
 public:
  using Eval = std::function<double(const MSubset&)>;
  using Exact = std::function<BigCount(const MSubset&)>;

  SetFunction() = default;

  /// A real-valued evaluator. Probed on {1} at construction; negative
  /// values are rejected there and at every later evaluation.
  SetFunction(Monoid S, Provenance p, std::string name, Eval f) : impl_(std::make_shared<Impl>()) {
    impl_->monoid = std::move(S);
    impl_->provenance = p;
    impl_->name = std::move(name);
    impl_->eval = std::move(f);
    probe();
  }

  /// F -> n(F) or F -> log n(F) for an exact integer evaluator n.
  static SetFunction exact(Monoid S, Provenance p, std::string name, ExactKind kind, Exact n) {
    if (kind == ExactKind::None) throw InvalidArgument("exact set function needs a kind");
    SetFunction f;
    f.impl_ = std::make_shared<Impl>();
    f.impl_->monoid = std::move(S);
    f.impl_->provenance = p;
    f.impl_->name = std::move(name);
    f.impl_->kind = kind;
    f.impl_->exact = std::move(n);
    f.probe();
    return f;
  }

  static SetFunction cardinality(const Monoid& S) {
    return exact(S, Provenance::User, "card", ExactKind::Count,
                 [](const MSubset& F) { return BigCount(F.size()); });
  }

  static SetFunction constant(const Monoid& S, double a) {
    return SetFunction(S, Provenance::Constant, "constant", [a](const MSubset&) { return a; });
  }

  const Monoid& monoid() const { return impl_->monoid; }
  Provenance provenance() const { return impl_->provenance; }
  const std::string& name() const { return impl_->name; }
  ExactKind exact_kind() const { return impl_->kind; }

  SetValue evaluate(const MSubset& F) const {
    for (const auto& s : F) impl_->monoid.require(s);
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->memo.find(F.elements());
      if (it != impl_->memo.end()) return it->second;
    }
    SetValue v;
    if (impl_->kind == ExactKind::None) {
      v.value = impl_->eval(F);
    } else {
      v.exact = impl_->exact(F);
      if (*v.exact < 0) throw InvalidArgument("set function " + impl_->name + " is negative");
      v.value = impl_->kind == ExactKind::Count ? v.exact->convert_to<double>() : log_count(*v.exact);
    }
    if (!(v.value >= 0)) throw InvalidArgument("set function " + impl_->name + " is negative or undefined");
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->memo.emplace(F.elements(), v);
    return v;
  }

  double operator()(const MSubset& F) const { return evaluate(F).value; }

 private:
  void probe() const { evaluate(MSubset{impl_->monoid.identity()}); }

  struct Impl {
    Monoid monoid;
    Provenance provenance = Provenance::User;
    std::string name;
    ExactKind kind = ExactKind::None;
    Eval eval;
    Exact exact;
    std::mutex mu;
    std::map<std::vector<MElement>, SetValue> memo;
  };
  std::shared_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Ratio tables
// ---------------------------------------------------------------------------

struct IntegralRow {
  std::size_t index = 0;
  std::size_t size = 0;
  double value = 0;
  double ratio = 0;
  std::optional<BigCount> exact;
};

struct IntegralEstimate {
  std::string function, net;
  ExactKind kind = ExactKind::None;
  std::vector<IntegralRow> rows;
  /// Set when a budget stopped the evaluation; rows hold the completed prefix.
  std::optional<std::string> truncated;

  double tail() const { return rows.empty() ? 0.0 : rows.back().ratio; }

  /// max - min of the ratios over the last quartile (at least two rows).
  double oscillation() const {
    if (rows.size() < 2) return 0.0;
    const std::size_t q = std::max<std::size_t>(2, (rows.size() + 3) / 4);
    double lo = rows.back().ratio, hi = lo;
    for (std::size_t k = rows.size() - q; k < rows.size(); ++k) {
      lo = std::min(lo, rows[k].ratio);
      hi = std::max(hi, rows[k].ratio);
    }
    return hi - lo;
  }

  bool converged(double tol = 1e-2) const { return oscillation() < tol; }

  /// Columns index, |F|, f, ratio; values in natural log scaled to log base
  /// `log_base` when the function is a logarithm.
  CsvTable csv(double log_base = 0, const std::string& value_column = "f") const {
    const double scale = kind == ExactKind::LogOfCount && log_base > 0 ? 1.0 / std::log(log_base) : 1.0;
    const bool counts = kind == ExactKind::LogOfCount;
    std::vector<std::string> header{"index", "|F|", value_column, "ratio"};
    if (counts) header.insert(header.begin() + 2, "count");
    CsvTable t(header);
    for (const auto& r : rows) {
      std::vector<std::string> row{std::to_string(r.index), std::to_string(r.size)};
      if (counts) row.push_back(r.exact ? r.exact->str() : "");
      row.push_back(format_real(r.value * scale));
      row.push_back(format_real(r.ratio * scale));
      t.add_row(std::move(row));
    }
    return t;
  }
};

/// f(F_i)/|F_i| for i = 1..prefix. Indices are evaluated in parallel and
/// stored in index order. A budget failure at index i either propagates
/// (reporting i-1 completed indices) or, with `allow_truncation`, ends the
/// table there.
inline IntegralEstimate integral(const SetFunction& f, const FolnerNet& net, std::size_t prefix,
                                 bool allow_truncation = false, unsigned threads = 0) {
  if (prefix < 2) throw InvalidArgument("prefix must be >= 2");
  if (!(f.monoid() == net.monoid()))
    throw MismatchError("set function on " + f.monoid().describe() + " but net on " + net.monoid().describe());
  IntegralEstimate est;
  est.function = f.name();
  est.net = net.name();
  est.kind = f.exact_kind();
  std::vector<std::optional<IntegralRow>> rows(prefix);
  std::vector<std::string> failure(prefix);
  try {
    parallel_for(
        prefix,
        [&](std::size_t k) {
          const std::size_t i = k + 1;
          const MSubset F = net.at(i);
          try {
            const SetValue v = f.evaluate(F);
            rows[k] = IntegralRow{i, F.size(), v.value, v.value / static_cast<double>(F.size()), v.exact};
          } catch (const BudgetExceeded& e) {
            throw BudgetExceeded(std::string(e.what()) + " at index " + std::to_string(i) + " (|F| = " +
                                     std::to_string(F.size()) + ")",
                                 i - 1);
          }
        },
        threads);
  } catch (const BudgetExceeded& e) {
    if (!allow_truncation) throw;
    est.truncated = e.what();
  }
  for (auto& r : rows) {
    if (!r) break;
    est.rows.push_back(std::move(*r));
  }
  return est;
}

/// f^F: X -> f(X F).
inline SetFunction shifted(const SetFunction& f, const MSubset& F) {
  const Monoid S = f.monoid();
  for (const auto& s : F) S.require(s);
  if (f.exact_kind() != ExactKind::None)
    return SetFunction::exact(S, f.provenance(), f.name() + "^F", f.exact_kind(), [f, F, S](const MSubset& X) {
      return *f.evaluate(set_product(S, X, F)).exact;
    });
  return SetFunction(S, f.provenance(), f.name() + "^F", [f, F, S](const MSubset& X) { return f(set_product(S, X, F)); });
}

/// F -> |pi(F)|.
inline SetFunction card_pi(const MonoidHom& pi) {
  return SetFunction::exact(pi.source(), Provenance::CardinalityOfImage, "card_pi", ExactKind::Count,
                            [pi](const MSubset& F) { return BigCount(pi.apply(F).size()); });
}

/// f o pi for a set function f on the target of pi.
inline SetFunction pull_back(const SetFunction& f, const MonoidHom& pi) {
  if (!(f.monoid() == pi.target())) throw MismatchError("set function is not defined on the target");
  if (f.exact_kind() != ExactKind::None)
    return SetFunction::exact(pi.source(), f.provenance(), f.name() + " o pi", f.exact_kind(),
                              [f, pi](const MSubset& F) { return *f.evaluate(pi.apply(F)).exact; });
  return SetFunction(pi.source(), f.provenance(), f.name() + " o pi",
                     [f, pi](const MSubset& F) { return f(pi.apply(F)); });
}

// ---------------------------------------------------------------------------
// The fiber transform
// ---------------------------------------------------------------------------

/// X -> f(X sigma(Y)) on the kernel N, with X embedded into S.
inline SetFunction fiber_function(const SetFunction& f, const Section& sigma, const MSubset& Y) {
  const Monoid& S = f.monoid();
  if (!(S == sigma.hom.source())) throw MismatchError("set function and section live on different monoids");
  const auto K = sigma.hom.kernel();
  std::vector<MElement> sy;
  for (const auto& y : Y) sy.push_back(sigma(y));
  auto lift = [K, sy, S](const MSubset& X) {
    std::vector<MElement> out;
    for (const auto& x : X) {
      const MElement ex = K.embed(x);
      for (const auto& s : sy) out.push_back(S.mul(ex, s));
    }
    return MSubset(std::move(out));
  };
  if (f.exact_kind() != ExactKind::None)
    return SetFunction::exact(K.monoid, f.provenance(), f.name() + "^sigma(Y)", f.exact_kind(),
                              [f, lift](const MSubset& X) { return *f.evaluate(lift(X)).exact; });
  return SetFunction(K.monoid, f.provenance(), f.name() + "^sigma(Y)", [f, lift](const MSubset& X) { return f(lift(X)); });
}

/// Theta(Y): tail of the ratio table of X -> f(X sigma(Y)) along the net of N.
inline IntegralEstimate theta(const SetFunction& f, const Section& sigma, const MSubset& Y, const FolnerNet& N_net,
                              std::size_t prefix, unsigned threads = 0) {
  require_good(sigma);
  return integral(fiber_function(f, sigma, Y), N_net, prefix, false, threads);
}

/// Theta as a set function on C.
inline SetFunction theta_function(const SetFunction& f, const Section& sigma, const FolnerNet& N_net,
                                  std::size_t prefix) {
  require_good(sigma);
  return SetFunction(sigma.hom.target(), Provenance::User, "theta(" + f.name() + ")",
                     [f, sigma, N_net, prefix](const MSubset& Y) {
                       return integral(fiber_function(f, sigma, Y), N_net, prefix, false, 1).tail();
                     });
}

struct FubiniReport {
  IntegralEstimate lhs;  // along the net of S
  IntegralEstimate rhs;  // Theta along the net of C
  double difference() const { return std::abs(lhs.tail() - rhs.tail()); }
};

inline FubiniReport fubini_check(const SetFunction& f, const Section& sigma, const FolnerNet& S_net,
                                 const FolnerNet& C_net, const FolnerNet& N_net, std::size_t prefix) {
  require_good(sigma);
  if (sigma(sigma.hom.target().identity()) != sigma.hom.source().identity())
    throw NotGoodSection("section must send 1 to 1");
  FubiniReport r;
  r.lhs = integral(f, S_net, prefix);
  r.rhs = integral(theta_function(f, sigma, N_net, prefix), C_net, prefix);
  return r;
}

// ---------------------------------------------------------------------------
// Axiom sampling
// ---------------------------------------------------------------------------

struct AxiomViolation {
  std::string axiom;
  MSubset F, G;
  MElement s;
  double lhs = 0, rhs = 0;
};

struct AxiomReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<AxiomViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Random F, F' inside the window of S and s in the window; checks that f is
/// increasing, subadditive, left subinvariant and bounded on singletons by
/// f({1}). Comparisons are exact when f carries exact integers.
inline AxiomReport sample_axioms(const SetFunction& f, std::size_t trials, std::int64_t window,
                                 std::uint64_t seed = 1, std::size_t max_set = 4) {
  if (trials < 1) throw InvalidArgument("need at least one trial");
  const Monoid& S = f.monoid();
  const std::vector<MElement> W = S.window(window);
  std::mt19937_64 rng(seed);
  auto pick = [&] { return W[rng() % W.size()]; };
  auto random_set = [&] {
    std::vector<MElement> v;
    const std::size_t k = 1 + rng() % max_set;
    for (std::size_t i = 0; i < k; ++i) v.push_back(pick());
    return MSubset(std::move(v));
  };
  // a <= b, exactly when possible
  auto le = [&](const SetValue& a, const SetValue& b) {
    if (a.exact && b.exact) return *a.exact <= *b.exact;
    return a.value <= b.value + 1e-9 * std::max(1.0, std::abs(b.value));
  };
  auto le_sum = [&](const SetValue& a, const SetValue& b, const SetValue& c) {
    if (a.exact && b.exact && c.exact) {
      if (f.exact_kind() == ExactKind::LogOfCount) return *a.exact <= *b.exact * *c.exact;
      return *a.exact <= *b.exact + *c.exact;
    }
    return a.value <= b.value + c.value + 1e-9 * std::max(1.0, std::abs(b.value + c.value));
  };
  AxiomReport rep;
  rep.seed = seed;
  rep.trials = trials;
  const SetValue one = f.evaluate(MSubset{S.identity()});
  for (std::size_t t = 0; t < trials; ++t) {
    const MSubset F = random_set(), G = random_set();
    const MElement s = pick();
    const MSubset U = set_union(F, G);
    const SetValue fF = f.evaluate(F), fG = f.evaluate(G), fU = f.evaluate(U);
    if (!le(fF, fU)) rep.violations.push_back({"increasing", F, G, s, fF.value, fU.value});
    if (!le_sum(fU, fF, fG)) rep.violations.push_back({"subadditive", F, G, s, fU.value, fF.value + fG.value});
    const SetValue fsF = f.evaluate(left_translate(S, s, F));
    if (!le(fsF, fF)) rep.violations.push_back({"left-subinvariant", F, G, s, fsF.value, fF.value});
    const SetValue fs = f.evaluate(MSubset{s});
    if (!le(fs, one)) rep.violations.push_back({"bounded-on-singletons", F, G, s, fs.value, one.value});
  }
  return rep;
}

}  // namespace amenact
