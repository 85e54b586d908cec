#pragma once

#include <functional>
#include <chrono>
#include <optional>

#include "amenact/entropy.hpp"
#include "amenact/folner.hpp"
#include "amenact/integral.hpp"
#include "amenact/sampling.hpp"

namespace amenact {

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::optional<std::string> counterexample;
  double seconds = 0;
  bool passed() const { return !counterexample; }
};

/// One random case: returns a description of the failure, or nothing.
using PropertyCase = std::function<std::optional<std::string>(Rng&)>;

inline PropertyResult run_property(std::string name, std::size_t cases, std::uint64_t seed, const PropertyCase& body) {
  PropertyResult r;
  r.name = std::move(name);
  Rng rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  for (; r.cases < cases && !r.counterexample; ++r.cases) r.counterexample = body(rng);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace detail {

inline std::string describe_set(const MSubset& F) {
  std::string s = "{";
  for (const auto& x : F) s += (s.size() > 1 ? "," : "") + to_string(x);
  return s + "}";
}

inline std::string describe_set(const FiniteSubset& X) {
  std::string s = "{";
  for (const auto& x : X) s += (s.size() > 1 ? "," : "") + to_string(x.data);
  return s + "}";
}

/// The least eps with F ~_eps G, for sets of equal size.
inline Rational closeness(const MSubset& F, const MSubset& G) {
  return Rational(static_cast<std::int64_t>(sym_diff_size(F, G)), static_cast<std::int64_t>(F.size()));
}

/// G obtained from F by moving up to `moves` elements to unused points of W.
inline MSubset perturb(const MSubset& F, const std::vector<MElement>& W, Rng& rng, std::int64_t moves) {
  std::vector<MElement> v = F.elements();
  for (std::int64_t m = uniform_int(rng, 0, moves); m > 0; --m) {
    const auto& w = W[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(W.size()) - 1))];
    if (std::find(v.begin(), v.end(), w) != v.end()) continue;
    v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(v.size()) - 1))] = w;
  }
  return MSubset(v);
}

inline MSubset random_set_of_size(const std::vector<MElement>& W, Rng& rng, std::size_t k) {
  std::vector<MElement> pool = W;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(k, pool.size()));
  return MSubset(pool);
}

inline const std::vector<std::vector<std::int64_t>>& small_factor_lists() {
  static const std::vector<std::vector<std::int64_t>> f{{2}, {5}, {8}, {2, 2}, {2, 4}, {3, 3}, {2, 6}, {4, 4}, {2, 2, 2}};
  return f;
}

struct SampledAction {
  Action action;
  bool finite_group = false;
  std::string label;
};

/// A random action from a few families: N, Z and N^2 on small finite groups,
/// Bernoulli shifts, the truncating shift, and multiplication on Z.
inline SampledAction random_action(Rng& rng) {
  const auto& fl = small_factor_lists();
  const auto A = AbelianGroup::finite(fl[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(fl.size()) - 1))]);
  switch (uniform_int(rng, 0, 5)) {
    case 0: {
      auto phi = Endomorphism::matrix(A, random_endomorphism_matrix(A.moduli(), rng));
      return {Action::from_generators(Monoid::naturals(), A, {phi}), true, "N on " + A.describe() + " by " + phi.describe()};
    }
    case 1: {
      auto phi = random_automorphism(A, rng);
      return {Action::from_generators(Monoid::integers(), A, {phi}), true, "Z on " + A.describe() + " by " + phi.describe()};
    }
    case 2: {
      auto phi = Endomorphism::matrix(A, random_endomorphism_matrix(A.moduli(), rng));
      return {Action::from_generators(Monoid::naturals(2), A, {phi, phi * phi}), true,
              "N^2 on " + A.describe() + " by " + phi.describe() + " and its square"};
    }
    case 3: {
      const std::int64_t p = uniform_int(rng, 2, 3);
      const auto S = AbelianGroup::direct_sum({p}, Monoid::integers());
      return {Action::from_generators(Monoid::integers(), S, {Endomorphism::shift(S, {1})}), false,
              "Z-shift on " + S.describe()};
    }
    case 4: {
      const auto S = AbelianGroup::direct_sum({2}, Monoid::naturals());
      return {Action::from_generators(Monoid::naturals(), S, {Endomorphism::shift(S, {-1}, true)}), false,
              "truncating shift on " + S.describe()};
    }
    default: {
      const auto Z = AbelianGroup::free(1);
      const std::int64_t k = uniform_int(rng, -3, 3);
      return {Action::from_generators(Monoid::naturals(), Z, {Endomorphism::scalar(Z, k)}), false,
              "multiplication by " + std::to_string(k) + " on Z"};
    }
  }
}

/// A finite subgroup of a torsion group, on a few random generators.
inline Subgroup random_finite_subgroup(const AbelianGroup& A, Rng& rng) {
  std::vector<GroupElement> g;
  for (std::int64_t k = uniform_int(rng, 0, 2); k > 0; --k) g.push_back(random_element(A, rng, 2));
  return Subgroup::generated(A, g);
}

}  // namespace detail

/// F ~_e F' and F' ~_e' F'' give F ~_{e+e'} F''; reflexive and symmetric.
inline PropertyResult property_eps_triangle(std::size_t cases, std::uint64_t seed) {
  return run_property("eps-equivalence triangle law", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const Monoid S = uniform_int(rng, 0, 1) ? Monoid::integers() : Monoid::integers(2);
    const auto W = S.window(4);
    const auto F = detail::random_set_of_size(W, rng, static_cast<std::size_t>(uniform_int(rng, 1, 12)));
    const auto G = detail::perturb(F, W, rng, 3), H = detail::perturb(G, W, rng, 3);
    const Rational e = detail::closeness(F, G), e2 = detail::closeness(G, H);
    if (!eps_equiv(F, F, Rational(0))) return "not reflexive at " + detail::describe_set(F);
    if (!eps_equiv(F, G, e) || !eps_equiv(G, F, e)) return "not symmetric at " + detail::describe_set(F);
    if (!eps_equiv(F, H, e + e2))
      return detail::describe_set(F) + " ~ " + detail::describe_set(G) + " ~ " + detail::describe_set(H);
    return std::nullopt;
  });
}

/// Disjoint unions and right translates preserve ~_eps.
inline PropertyResult property_eps_unions_translates(std::size_t cases, std::uint64_t seed) {
  return run_property("eps-equivalence under disjoint unions and translates", cases, seed,
                      [](Rng& rng) -> std::optional<std::string> {
    // disjoint unions, realized as Z x {0} and Z x {1} inside Z x Z/2
    std::vector<MElement> W0, W1;
    for (std::int64_t i = -6; i <= 6; ++i) {
      W0.push_back({i, 0});
      W1.push_back({i, 1});
    }
    const auto F = detail::random_set_of_size(W0, rng, static_cast<std::size_t>(uniform_int(rng, 1, 8)));
    const auto E = detail::random_set_of_size(W1, rng, static_cast<std::size_t>(uniform_int(rng, 1, 8)));
    const auto F2 = detail::perturb(F, W0, rng, 3), E2 = detail::perturb(E, W1, rng, 3);
    const Rational eps = std::max(detail::closeness(F, F2), detail::closeness(E, E2));
    if (!eps_equiv(set_union(F, E), set_union(F2, E2), eps))
      return "union of " + detail::describe_set(F) + " and " + detail::describe_set(E);
    // right translates in a right cancellative monoid
    const std::vector<Monoid> family{Monoid::naturals(2), Monoid::integers(2), Monoid::semidirect()};
    const Monoid& S = family[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
    const auto V = S.window(3);
    const auto G = detail::random_set_of_size(V, rng, static_cast<std::size_t>(uniform_int(rng, 1, 10)));
    const auto G2 = detail::perturb(G, V, rng, 3);
    const auto& s = V[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(V.size()) - 1))];
    if (!eps_equiv(right_translate(S, G, s), right_translate(S, G2, s), detail::closeness(G, G2)))
      return "translate of " + detail::describe_set(G) + " by " + to_string(s) + " in " + S.describe();
    return std::nullopt;
  });
}

/// |F E sym F| <= sum_e |F e sym F| along box nets, and translated nets are F_i E.
inline PropertyResult property_translated_nets(std::size_t cases, std::uint64_t seed) {
  return run_property("translated Folner nets", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const std::vector<Monoid> family{Monoid::integers(), Monoid::integers(2), Monoid::naturals(2),
                                     Monoid::product({Monoid::integers(), Monoid::finite({3})})};
    const Monoid& S = family[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
    const auto net = box_net(S);
    const auto E = random_msubset(S, rng, 4, 3);
    const auto i = static_cast<std::size_t>(uniform_int(rng, 1, 12));
    const auto F = net.at(i);
    const auto FE = set_product(S, F, E);
    std::size_t bound = 0;
    for (const auto& e : E) bound += sym_diff_size(right_translate(S, F, e), F);
    if (sym_diff_size(FE, F) > bound)
      return "defect bound fails for E=" + detail::describe_set(E) + " at box " + std::to_string(i) + " of " + S.describe();
    if (!(translate_net(net, E).at(i) == FE)) return "translated net differs from F_i E at " + std::to_string(i);
    return std::nullopt;
  });
}

/// F -> log |T_F(X)| is non-negative, increasing, subadditive and right invariant.
inline PropertyResult property_trajectory_axioms(std::size_t cases, std::uint64_t seed) {
  return run_property("trajectory length axioms", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto s = detail::random_action(rng);
    const auto X = random_finite_subset(s.action.group(), rng, s.finite_group ? 4 : 2, uniform_int(rng, 0, 1) == 1);
    const auto rep = sample_axioms(trajectory_length(s.action, X), 4, 2, rng(), 3);
    if (!rep.passed()) return rep.violations.front().axiom + " fails for " + s.label + ", X=" + detail::describe_set(X);
    return std::nullopt;
  });
}

/// T_{FF'}(X) in T_F(T_{F'}(X)) in T_{FF'}(X_{|F'|}) for seeds containing 0,
/// with equality for subgroups. Without 0 the first inclusion fails: identity
/// on Z, F = F' = {0,1}, X = {-1,2} gives 3X against 4X.
inline PropertyResult property_trajectory_composition(std::size_t cases, std::uint64_t seed) {
  return run_property("trajectory composition inclusions", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto s = detail::random_action(rng);
    const Action& a = s.action;
    const std::size_t k = s.finite_group ? 3 : 2;
    const auto F = random_msubset(a.monoid(), rng, k, 2), G = random_msubset(a.monoid(), rng, k, 2);
    const auto FG = set_product(a.monoid(), F, G);
    const auto X = random_finite_subset(a.group(), rng, 3, true);
    const auto inner = trajectory(a, F, trajectory(a, G, X));
    const auto Xm = iterated_sum(a.group(), X, G.size());
    if (!trajectory(a, FG, X).subset_of(inner) || !inner.subset_of(trajectory(a, FG, Xm)))
      return "inclusions fail for " + s.label + ", F=" + detail::describe_set(F) + ", F'=" + detail::describe_set(G) +
             ", X=" + detail::describe_set(X);
    if (a.group().is_torsion()) {
      const auto B = detail::random_finite_subgroup(a.group(), rng);
      if (!(subgroup_trajectory(a, FG, B) == subgroup_trajectory(a, F, subgroup_trajectory(a, G, B))))
        return "subgroup equality fails for " + s.label;
    }
    return std::nullopt;
  });
}

/// T_F(B_m) = T_F(B)_m for m-fold sums.
inline PropertyResult property_trajectory_of_sums(std::size_t cases, std::uint64_t seed) {
  return run_property("trajectories of iterated sums", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto s = detail::random_action(rng);
    const Action& a = s.action;
    const auto F = random_msubset(a.monoid(), rng, 3, 2);
    const auto B = random_finite_subset(a.group(), rng, 2, uniform_int(rng, 0, 1) == 1);
    const auto m = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    if (!(trajectory(a, F, iterated_sum(a.group(), B, m)) == iterated_sum(a.group(), trajectory(a, F, B), m)))
      return "fails for " + s.label + ", m=" + std::to_string(m) + ", B=" + detail::describe_set(B);
    return std::nullopt;
  });
}

/// |T_F(B+C)| <= |T_F(B)| |T_F(C)| and |T_F(-B)| = |T_F(B)|.
inline PropertyResult property_trajectory_sum_bounds(std::size_t cases, std::uint64_t seed) {
  return run_property("trajectory sum and negation bounds", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto s = detail::random_action(rng);
    const Action& a = s.action;
    const auto& A = a.group();
    const auto F = random_msubset(a.monoid(), rng, 3, 2);
    const auto B = random_finite_subset(A, rng, 2, false), C = random_finite_subset(A, rng, 2, false);
    const auto tb = trajectory_size(a, F, B), tc = trajectory_size(a, F, C);
    if (trajectory_size(a, F, minkowski_sum(A, B, C)) > tb * tc)
      return "sum bound fails for " + s.label + ", B=" + detail::describe_set(B) + ", C=" + detail::describe_set(C);
    if (trajectory_size(a, F, negate(A, B)) != tb) return "negation changes the count for " + s.label;
    return std::nullopt;
  });
}

/// Conjugate actions have trajectories of equal size: xi(T_F(alpha, X)) = T_{eta F}(beta, xi X).
inline PropertyResult property_conjugacy(std::size_t cases, std::uint64_t seed) {
  return run_property("conjugate actions share trajectory sizes", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto& fl = detail::small_factor_lists();
    const auto A = AbelianGroup::finite(fl[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(fl.size()) - 1))]);
    const auto phi = random_automorphism(A, rng);
    const bool plane = uniform_int(rng, 0, 1) == 1;
    const Monoid S = plane ? Monoid::integers(2) : Monoid::integers();
    const Action a = plane ? Action::from_generators(S, A, {phi, phi * phi}) : Action::from_generators(S, A, {phi});
    IntMatrix N = IntMatrix::identity(S.dim());
    if (plane) {
      for (int t = 0; t < 3; ++t) {
        IntMatrix E = IntMatrix::identity(2);
        E(static_cast<std::size_t>(t % 2), static_cast<std::size_t>(1 - t % 2)) = uniform_int(rng, -2, 2);
        N = N * E;
      }
    }
    if (uniform_int(rng, 0, 1))
      for (std::size_t j = 0; j < S.dim(); ++j) N(0, j) = -N(0, j);
    const auto eta = MonoidIso::make(S, S, N);
    const auto xi = GroupIso::make(A, A, random_automorphism(A, rng).matrix());
    const Action b = conjugate_action(a, xi, eta);
    const auto F = random_msubset(S, rng, 4, 2);
    const auto X = random_finite_subset(A, rng, 3, false);
    if (!(xi.apply(trajectory(a, F, X)) == trajectory(b, eta.apply(F), xi.apply(X))))
      return "conjugation fails on " + A.describe() + " for F=" + detail::describe_set(F);
    return std::nullopt;
  });
}

/// f(F) / |F| <= f({1}) for trajectory lengths and capped cardinalities.
inline PropertyResult property_integral_bound(std::size_t cases, std::uint64_t seed) {
  return run_property("integral bounded by the singleton value", cases, seed, [](Rng& rng) -> std::optional<std::string> {
    const auto s = detail::random_action(rng);
    const Action& a = s.action;
    const bool long_net = s.finite_group || a.monoid().dim() > 1;
    const auto X = random_finite_subset(a.group(), rng, s.finite_group ? 4 : 2, true);
    const auto f = trajectory_length(a, X);
    const double one = f(MSubset{a.monoid().identity()});
    const auto est = integral(f, box_net(a.monoid()), long_net ? 5 : 4);
    for (const auto& r : est.rows)
      if (r.ratio > one + 1e-12)
        return "ratio " + format_real(r.ratio) + " exceeds f({1}) = " + format_real(one) + " for " + s.label;
    const double cap = static_cast<double>(uniform_int(rng, 1, 20)) / 4.0;
    SetFunction g(a.monoid(), Provenance::User, "capped", [cap](const MSubset& F) {
      return std::min(static_cast<double>(F.size()), cap);
    });
    const double g1 = g(MSubset{a.monoid().identity()});
    for (const auto& r : integral(g, box_net(a.monoid()), 8).rows)
      if (r.ratio > g1 + 1e-12) return "capped cardinality exceeds its singleton value";
    return std::nullopt;
  });
}

/// The full suite with `cases` random cases per property.
inline std::vector<PropertyResult> lemma_property_suite(std::size_t cases = 200, std::uint64_t seed = 1) {
  return {property_eps_triangle(cases, seed),           property_eps_unions_translates(cases, seed + 1),
          property_translated_nets(cases, seed + 2),    property_trajectory_axioms(cases, seed + 3),
          property_trajectory_composition(cases, seed + 4), property_trajectory_of_sums(cases, seed + 5),
          property_trajectory_sum_bounds(cases, seed + 6), property_conjugacy(cases, seed + 7),
          property_integral_bound(cases, seed + 8)};
}

}  // namespace amenact
