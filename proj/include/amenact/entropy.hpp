// Algebraic entropy of actions: trajectory-length set functions, their
// ratio limits, induced actions on subgroups and quotients, weak
// conjugation, and the additivity and vanishing checks built on them.
#pragma once

#include "amenact/action.hpp"
#include "amenact/integral.hpp"

namespace amenact {

inline std::string describe_seed(const Seed& X) {
  if (const auto* B = std::get_if<Subgroup>(&X)) {
    if (B->is_coordinatewise()) return "coordinatewise subgroup";
    std::string s = "<";
    const auto g = B->generators();
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? " " : "") + to_string(g[i].data);
    return s + ">";
  }
  const auto& F = std::get<FiniteSubset>(X);
  std::string s = "{";
  std::size_t k = 0;
  for (const auto& x : F) {
    if (k == 8) {
      s += " ...";
      break;
    }
    s += (k++ ? " " : "") + to_string(x.data);
  }
  return s + "}";
}

/// f_X: F -> log |T_F(alpha, X)|.
inline SetFunction trajectory_length(const Action& a, const Seed& X, std::size_t budget = kDefaultElementBudget) {
  if (const auto* F = std::get_if<FiniteSubset>(&X)) {
    if (F->empty()) throw InvalidArgument("trajectory seed must be nonempty");
    for (const auto& x : *F) a.group().require(x);
  } else {
    a.group().require_same(std::get<Subgroup>(X).group());
  }
  return SetFunction::exact(a.monoid(), Provenance::TrajectoryLength, "f_X", ExactKind::LogOfCount,
                            [a, X, budget](const MSubset& F) { return seed_trajectory_size(a, F, X, budget); });
}

struct EntropyEstimate {
  IntegralEstimate estimate;
  std::string seed;
  double tail() const { return estimate.tail(); }
  double oscillation() const { return estimate.oscillation(); }
  const std::string& net() const { return estimate.net; }

  /// Columns index, |F|, |T_F(X)|, ratio.
  CsvTable csv(double log_base = 0) const {
    const double scale = log_base > 0 ? 1.0 / std::log(log_base) : 1.0;
    CsvTable t({"index", "|F|", "|T_F(X)|", "ratio"});
    for (const auto& r : estimate.rows)
      t.add_row({std::to_string(r.index), std::to_string(r.size), r.exact ? r.exact->str() : "",
                 format_real(r.ratio * scale)});
    return t;
  }
};

inline EntropyEstimate H_alg_estimate(const Action& a, const Seed& X, const FolnerNet& net, std::size_t prefix,
                                      std::size_t budget = kDefaultElementBudget, bool allow_truncation = false) {
  EntropyEstimate e;
  e.seed = describe_seed(X);
  e.estimate = integral(trajectory_length(a, X, budget), net, prefix, allow_truncation);
  return e;
}

// ---------------------------------------------------------------------------
// Generation certificates and ent
// ---------------------------------------------------------------------------

/// Checks on a window that T_W(alpha, X) contains the subgroup `target`:
/// for finite targets the whole subgroup, for coordinatewise targets in a
/// direct sum every e_i (x) r with i in the index window and r a basis row
/// of the base subgroup. W is the window of S of the same size.
inline bool generates_on_window(const Action& a, const Subgroup& X, const Subgroup& target, std::int64_t window) {
  const MSubset W(a.monoid().window(window));
  const Subgroup T = subgroup_trajectory(a, W, X);
  if (!target.is_coordinatewise()) return T.contains(target);
  const AbelianGroup& A = a.group();
  for (const auto& i : A.index().window(window))
    for (const auto& r : target.base_lattice().generators()) {
      const GroupElement g = A.single(i, r);
      if (!T.contains(g)) return false;
    }
  return true;
}

struct EntReport {
  double value = 0;
  bool certified = false;  // value = H_alg(alpha, X) for a generating X
  std::vector<EntropyEstimate> estimates;
  std::string note;
};

/// ent(alpha): certified through a generating subgroup when one is given and
/// its window certificate holds, otherwise the maximum over `family` as a
/// lower bound.
inline EntReport ent_estimate(const Action& a, const std::optional<Subgroup>& generator,
                              const std::vector<Subgroup>& family, const FolnerNet& net, std::size_t prefix,
                              std::int64_t certificate_window = 4, std::size_t budget = kDefaultElementBudget) {
  const AbelianGroup& A = a.group();
  if (!A.is_torsion()) throw InvalidArgument("ent is computed on torsion groups only; " + A.describe() + " is not");
  EntReport r;
  if (generator) {
    auto e = H_alg_estimate(a, *generator, net, prefix, budget);
    if (generates_on_window(a, *generator, Subgroup::whole(A), certificate_window)) {
      r.value = e.tail();
      r.certified = true;
      r.note = "generating subgroup certified on window " + std::to_string(certificate_window);
      r.estimates.push_back(std::move(e));
      return r;
    }
    r.estimates.push_back(std::move(e));
  }
  for (const auto& X : family) r.estimates.push_back(H_alg_estimate(a, X, net, prefix, budget));
  if (r.estimates.empty()) throw InvalidArgument("no seeds supplied");
  for (const auto& e : r.estimates) r.value = std::max(r.value, e.tail());
  r.note = "lower bound: maximum over the supplied seeds";
  return r;
}

// ---------------------------------------------------------------------------
// Restriction, sub- and quotient actions
// ---------------------------------------------------------------------------

/// An injective homomorphism T -> S, t -> M t, between commutative families.
struct MonoidEmbedding {
  Monoid source, target;
  IntMatrix M;  // target.dim() x source.dim()

  MElement apply(const MElement& t) const {
    source.require(t);
    MElement s = M.apply(t);
    for (std::size_t j = 0; j < s.size(); ++j)
      if (target.coords()[j].kind == CoordKind::Mod) s[j] = floor_mod(s[j], target.coords()[j].modulus);
    return s;
  }
  MSubset apply(const MSubset& F) const {
    std::vector<MElement> out;
    for (const auto& t : F) out.push_back(apply(t));
    return MSubset(std::move(out));
  }
};

/// The T-action t -> alpha(embed(t)).
inline Action restriction(const Action& a, const MonoidEmbedding& e) {
  if (!(e.target == a.monoid())) throw MismatchError("embedding does not land in the acting monoid");
  if (e.M.rows != e.target.dim() || e.M.cols != e.source.dim()) throw MismatchError("embedding matrix shape");
  if (e.source.is_semidirect() || e.target.is_semidirect()) throw UnsupportedError("restriction needs commutative families");
  // injectivity on the free part: the columns are independent over Z
  bool all_free = true;
  for (const auto& c : e.source.coords()) all_free = all_free && c.kind != CoordKind::Mod;
  if (all_free) {
    Echelon cols(std::vector<std::int64_t>(e.target.dim(), 0));
    for (std::size_t k = 0; k < e.source.dim(); ++k) {
      Coords col(e.target.dim());
      for (std::size_t j = 0; j < col.size(); ++j) col[j] = e.M(j, k);
      cols.insert(col);
    }
    if (cols.basis().size() != e.source.dim()) throw InvalidArgument("embedding is not injective");
  }
  std::vector<Endomorphism> gens;
  for (std::size_t k = 0; k < e.source.dim(); ++k) {
    MElement s(e.target.dim());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = e.M(j, k);
    MElement sn = s;
    for (std::size_t j = 0; j < sn.size(); ++j)
      if (e.target.coords()[j].kind == CoordKind::Mod) sn[j] = floor_mod(sn[j], e.target.coords()[j].modulus);
    if (!e.target.contains(sn))
      throw InvalidArgument("generator " + std::to_string(k) + " maps to " + to_string(s) + ", outside the acting monoid");
    gens.push_back(a.at(sn));
  }
  return Action::from_generators(e.source, a.group(), std::move(gens));
}

/// alpha restricted to an invariant subgroup B: the same ambient action with
/// seeds required to lie in B.
struct SubAction {
  Action ambient;
  Subgroup carrier;

  void require_seed(const Subgroup& X) const {
    if (!carrier.contains(X)) throw InvalidArgument("seed is not contained in the invariant subgroup");
  }
};

struct InducedActions {
  SubAction sub;
  Action quotient;
  Quotient projection;
};

/// Induced endomorphism of A/B; B must be invariant under phi.
inline Endomorphism induced_on_quotient(const Endomorphism& phi, const Quotient& q) {
  if (phi.is_matrix()) return Endomorphism::matrix(q.group, q.project_base * phi.matrix() * q.lift_base);
  Endomorphism r = Endomorphism::identity(q.group);
  for (const auto& st : phi.steps())
    r = Endomorphism::shift(q.group, st.translation, q.project_base * st.base * q.lift_base, st.truncating) * r;
  return r;
}

inline InducedActions quotient_and_sub_actions(const Action& a, const Subgroup& B) {
  a.group().require_same(B.group());
  if (auto v = a.invariance_violation(B))
    throw NotInvariant("subgroup is not invariant under generator " + std::to_string(v->first) +
                       (B.is_coordinatewise() ? std::string() : " at element " + to_string(v->second.data)));
  Quotient q = quotient_group(a.group(), B);
  std::vector<Endomorphism> gens;
  for (const auto& g : a.generators()) gens.push_back(induced_on_quotient(g, q));
  Action qa = Action::from_generators(a.monoid(), q.group, std::move(gens));
  return InducedActions{SubAction{a, B}, std::move(qa), std::move(q)};
}

struct AdditionRow {
  std::size_t index = 0, size = 0;
  BigCount whole, sub, quotient;  // |T_F| for alpha, alpha_B, alpha_{A/B}
  bool exact_match = false;       // whole = sub * quotient
  double residual = 0;            // log whole - log sub - log quotient
};

struct AdditionReport {
  EntropyEstimate whole, sub, quotient;
  bool whole_certified = false, sub_certified = false, quotient_certified = false;
  std::vector<AdditionRow> rows;
  double residual_tail() const { return rows.empty() ? 0.0 : rows.back().residual; }
  bool exact_everywhere() const {
    return std::all_of(rows.begin(), rows.end(), [](const AdditionRow& r) { return r.exact_match; });
  }
};

/// ent(alpha) against ent(alpha_B) + ent(alpha_{A/B}) with generating
/// subgroups X (of A), X_B (inside B) and X_Q (of A/B).
inline AdditionReport addition_check(const Action& a, const Subgroup& B, const Subgroup& X, const Subgroup& X_B,
                                     const Subgroup& X_Q, const FolnerNet& net, std::size_t prefix,
                                     std::int64_t certificate_window = 4) {
  if (!a.group().is_torsion()) throw InvalidArgument("addition check needs a torsion group");
  const InducedActions ind = quotient_and_sub_actions(a, B);
  ind.sub.require_seed(X_B);
  ind.quotient.group().require_same(X_Q.group());
  AdditionReport rep;
  rep.whole = H_alg_estimate(a, X, net, prefix);
  rep.sub = H_alg_estimate(a, X_B, net, prefix);
  rep.quotient = H_alg_estimate(ind.quotient, X_Q, net, prefix);
  rep.whole_certified = generates_on_window(a, X, Subgroup::whole(a.group()), certificate_window);
  rep.sub_certified = generates_on_window(a, X_B, B, certificate_window);
  rep.quotient_certified =
      generates_on_window(ind.quotient, X_Q, Subgroup::whole(ind.quotient.group()), certificate_window);
  for (std::size_t k = 0; k < rep.whole.estimate.rows.size(); ++k) {
    const auto& w = rep.whole.estimate.rows[k];
    const auto& s = rep.sub.estimate.rows[k];
    const auto& q = rep.quotient.estimate.rows[k];
    AdditionRow r;
    r.index = w.index;
    r.size = w.size;
    r.whole = *w.exact;
    r.sub = *s.exact;
    r.quotient = *q.exact;
    r.exact_match = r.whole == r.sub * r.quotient;
    r.residual = r.exact_match ? 0.0 : w.value - s.value - q.value;
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Weak conjugation
// ---------------------------------------------------------------------------

/// A group isomorphism A -> B given by an integer matrix on base coordinates
/// (termwise on direct sums over the same index monoid).
struct GroupIso {
  AbelianGroup source, target;
  IntMatrix M, Minv;

  static GroupIso make(AbelianGroup source, AbelianGroup target, IntMatrix M) {
    if (source.kind() != target.kind()) throw InvalidArgument("isomorphism between different group families");
    if (source.kind() == GroupKind::DirectSum && !(source.index() == target.index()))
      throw InvalidArgument("direct sums over different index monoids");
    if (!is_compatible_matrix(M, source.moduli(), target.moduli()))
      throw InvalidArgument("matrix is not a homomorphism");
    const std::size_t k = source.base_dim();
    if (target.base_dim() != k && source.kind() != GroupKind::FiniteProduct)
      throw InvalidArgument("isomorphism must preserve the rank");
    IntMatrix inv(k, target.base_dim());
    for (std::size_t j = 0; j < target.base_dim(); ++j) {
      Coords e(target.base_dim(), 0);
      e[j] = 1;
      auto x = solve_linear(M, source.moduli(), target.moduli(), e);
      if (!x) throw InvalidArgument("matrix is not surjective");
      for (std::size_t i = 0; i < k; ++i) inv(i, j) = (*x)[i];
    }
    GroupIso g{std::move(source), std::move(target), std::move(M), std::move(inv)};
    // two-sided inverse on unit vectors of both sides
    for (std::size_t j = 0; j < k; ++j) {
      Coords e(k, 0);
      e[j] = 1;
      Coords back = g.Minv.apply(g.M.apply(e));
      g.source_base_reduce(back);
      if (back != e) throw InvalidArgument("matrix is not injective");
    }
    return g;
  }

  GroupElement apply(const GroupElement& x) const { return Quotient::map_terms(source, target, M, x); }
  FiniteSubset apply(const FiniteSubset& X) const {
    std::vector<GroupElement> v;
    for (const auto& x : X) v.push_back(apply(x));
    return FiniteSubset(std::move(v));
  }
  Subgroup apply(const Subgroup& B) const {
    if (B.is_coordinatewise()) throw UnsupportedError("isomorphism images of coordinatewise subgroups");
    std::vector<GroupElement> g;
    for (const auto& b : B.generators()) g.push_back(apply(b));
    return Subgroup::generated(target, g);
  }

  /// xi phi xi^{-1} as an endomorphism of the target.
  Endomorphism conjugate(const Endomorphism& phi) const {
    if (phi.is_matrix()) return Endomorphism::matrix(target, M * phi.matrix() * Minv);
    Endomorphism r = Endomorphism::identity(target);
    for (const auto& st : phi.steps()) r = Endomorphism::shift(target, st.translation, M * st.base * Minv, st.truncating) * r;
    return r;
  }

 private:
  void source_base_reduce(Coords& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (source.moduli()[i] > 0) v[i] = floor_mod(v[i], source.moduli()[i]);
  }
};

/// A monoid isomorphism S -> T, s -> N s, with N invertible over Z.
struct MonoidIso {
  Monoid source, target;
  IntMatrix N, Ninv;

  static MonoidIso make(Monoid source, Monoid target, IntMatrix N) {
    if (source.is_semidirect() || target.is_semidirect()) throw UnsupportedError("isomorphisms of commutative families");
    const std::size_t d = source.dim();
    if (target.dim() != d || N.rows != d || N.cols != d) throw InvalidArgument("isomorphism must preserve the rank");
    std::vector<std::int64_t> free(d, 0);
    IntMatrix inv(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      Coords e(d, 0);
      e[j] = 1;
      auto x = solve_linear(N, free, free, e);
      if (!x) throw InvalidArgument("monoid map is not invertible over Z");
      for (std::size_t i = 0; i < d; ++i) inv(i, j) = (*x)[i];
    }
    MonoidIso m{std::move(source), std::move(target), std::move(N), std::move(inv)};
    for (std::size_t j = 0; j < d; ++j) {
      Coords e(d, 0);
      e[j] = 1;
      if (!m.target.contains(m.normalize(m.target, m.N.apply(e))) || !m.source.contains(m.normalize(m.source, m.Ninv.apply(e))))
        throw InvalidArgument("monoid map is not onto");
    }
    return m;
  }

  MElement apply(const MElement& s) const { return normalize(target, N.apply(s)); }
  MElement inverse(const MElement& t) const { return normalize(source, Ninv.apply(t)); }
  MSubset apply(const MSubset& F) const {
    std::vector<MElement> v;
    for (const auto& s : F) v.push_back(apply(s));
    return MSubset(std::move(v));
  }

 private:
  static MElement normalize(const Monoid& S, MElement s) {
    for (std::size_t j = 0; j < s.size(); ++j)
      if (S.coords()[j].kind == CoordKind::Mod) s[j] = floor_mod(s[j], S.coords()[j].modulus);
    return s;
  }
};

/// beta(t) = xi alpha(eta^{-1}(t)) xi^{-1}, so that xi alpha(s) = beta(eta(s)) xi.
inline Action conjugate_action(const Action& a, const GroupIso& xi, const MonoidIso& eta) {
  a.group().require_same(xi.source);
  if (!(eta.source == a.monoid())) throw MismatchError("monoid isomorphism does not start at the acting monoid");
  std::vector<Endomorphism> gens;
  for (std::size_t k = 0; k < eta.target.dim(); ++k) {
    MElement e(eta.target.dim(), 0);
    e[k] = 1;
    gens.push_back(xi.conjugate(a.at(eta.inverse(e))));
  }
  return Action::from_generators(eta.target, xi.target, std::move(gens));
}

// ---------------------------------------------------------------------------
// Local nilpotency
// ---------------------------------------------------------------------------

struct NilpotencyReport {
  bool group_family = false;  // S is a group: no weakly locally nilpotent action on A != 0
  bool zero_group = false;
  bool found = false;
  MElement annihilator;  // s with alpha(s)(X) = 0
  std::optional<EntropyEstimate> shifted_estimate;
  std::string note;
};

/// Searches the window of S = N^d for s with alpha(s)(x) = 0 for all x in X;
/// when found, evaluates H_alg(alpha, X) along the translated boxes F_i s,
/// where every trajectory is {0}.
inline NilpotencyReport locally_nilpotent_probe(const Action& a, const FiniteSubset& X, std::size_t prefix,
                                                std::int64_t window = 16) {
  NilpotencyReport r;
  const Monoid& S = a.monoid();
  const AbelianGroup& A = a.group();
  if (A.order() && *A.order() == 1) {
    r.zero_group = true;
    r.found = true;
    r.annihilator = S.identity();
    r.note = "zero group: every action is nilpotent";
    return r;
  }
  if (S.is_group()) {
    r.group_family = true;
    r.note = "no group admits a weakly locally nilpotent action on a nonzero group";
    return r;
  }
  for (const auto& c : S.coords())
    if (c.kind != CoordKind::Nat) throw InvalidArgument("the nilpotency probe needs S = N^d");
  std::vector<MElement> cand = S.window(window);
  std::stable_sort(cand.begin(), cand.end(), [](const MElement& p, const MElement& q) {
    std::int64_t a1 = 0, a2 = 0;
    for (auto v : p) a1 += v;
    for (auto v : q) a2 += v;
    return a1 < a2;
  });
  for (const auto& s : cand) {
    const Endomorphism phi = a.at(s);
    bool kills = true;
    for (const auto& x : X)
      if (!A.is_zero(phi.apply(x))) {
        kills = false;
        break;
      }
    if (!kills) continue;
    r.found = true;
    r.annihilator = s;
    r.shifted_estimate = H_alg_estimate(a, X, translate_net(box_net(S), MSubset{s}), prefix);
    r.note = "alpha(s) annihilates the seed";
    return r;
  }
  r.note = "no annihilating element in the window";
  return r;
}

}  // namespace amenact
