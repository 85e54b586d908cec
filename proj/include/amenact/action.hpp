// Left actions of commutative monoids on abelian groups by endomorphisms,
// given by one generator per monoid coordinate, and their trajectories.
#pragma once

#include "amenact/endomorphism.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <variant>

namespace amenact {

class Action {
 public:
  Action() = default;

  /// Validates and builds s -> prod_i g_i^{s_i}. Z coordinates need
  /// invertible generators, Z/n coordinates generators with g^n = id, and all
  /// generators must commute.
  static Action from_generators(Monoid S, AbelianGroup A, std::vector<Endomorphism> gens) {
    if (S.is_semidirect()) throw UnsupportedError("actions of the semidirect family are not supported");
    if (!S.is_cancellative()) throw InvalidArgument("acting monoid must be cancellative");
    if (gens.size() != S.dim())
      throw InvalidArgument("expected " + std::to_string(S.dim()) + " generators, got " + std::to_string(gens.size()));
    Action a;
    a.impl_ = std::make_shared<Impl>();
    a.impl_->monoid = std::move(S);
    a.impl_->group = std::move(A);
    for (const auto& g : gens) a.impl_->group.require_same(g.group());
    a.impl_->gens = std::move(gens);
    a.impl_->inverses.resize(a.impl_->gens.size());
    const Monoid& M = a.impl_->monoid;
    const auto id = Endomorphism::identity(a.impl_->group);
    for (std::size_t i = 0; i < M.dim(); ++i) {
      const auto& c = M.coords()[i];
      const auto& g = a.impl_->gens[i];
      if (c.kind == CoordKind::Int || c.kind == CoordKind::Mod) {
        auto inv = g.inverse();
        if (!inv) throw InvalidArgument("generator " + std::to_string(i) + " is not invertible, but the monoid coordinate is a group");
        a.impl_->inverses[i] = *inv;
      }
      if (c.kind == CoordKind::Mod && !(g.power(static_cast<std::uint64_t>(c.modulus)) == id))
        throw InvalidArgument("generator " + std::to_string(i) + " does not have order dividing " + std::to_string(c.modulus));
    }
    for (std::size_t i = 0; i < M.dim(); ++i)
      for (std::size_t j = i + 1; j < M.dim(); ++j)
        if (!(a.impl_->gens[i] * a.impl_->gens[j] == a.impl_->gens[j] * a.impl_->gens[i]))
          throw InvalidArgument("generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
    return a;
  }

  const Monoid& monoid() const { return impl_->monoid; }
  const AbelianGroup& group() const { return impl_->group; }
  const std::vector<Endomorphism>& generators() const { return impl_->gens; }

  /// alpha(s).
  Endomorphism at(const MElement& s) const {
    impl_->monoid.require(s);
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->cache.find(s);
      if (it != impl_->cache.end()) return it->second;
    }
    Endomorphism r = Endomorphism::identity(impl_->group);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 0) continue;
      const Endomorphism& g = s[i] > 0 ? impl_->gens[i] : impl_->inverses[i];
      r = g.power(static_cast<std::uint64_t>(s[i] > 0 ? s[i] : -s[i])) * r;
    }
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->cache.emplace(s, r);
    return r;
  }

  GroupElement apply(const MElement& s, const GroupElement& x) const { return at(s).apply(x); }

  /// alpha(s)(B) contained in B for every generator.
  std::optional<std::pair<std::size_t, GroupElement>> invariance_violation(const Subgroup& B) const {
    for (std::size_t i = 0; i < impl_->gens.size(); ++i) {
      const auto& g = impl_->gens[i];
      if (B.is_coordinatewise()) {
        if (!g.maps_into(B)) return std::make_pair(i, impl_->group.zero());
        continue;
      }
      for (const auto& b : B.generators())
        if (!B.contains(g.apply(b))) return std::make_pair(i, b);
    }
    return std::nullopt;
  }

 private:
  struct Impl {
    Monoid monoid;
    AbelianGroup group;
    std::vector<Endomorphism> gens, inverses;
    std::mutex mu;
    std::map<MElement, Endomorphism> cache;
  };
  std::shared_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// T_F(alpha, X) = sum_{s in F} alpha(s)(X), materialized.
inline FiniteSubset trajectory(const Action& a, const MSubset& F, const FiniteSubset& X,
                               std::size_t budget = kDefaultElementBudget) {
  if (X.empty()) throw InvalidArgument("trajectory seed must be nonempty");
  const AbelianGroup& A = a.group();
  std::unordered_set<GroupElement, GroupElementHash> cur{A.zero()};
  for (const auto& s : F) {
    const FiniteSubset Y = a.at(s).apply(X);
    std::unordered_set<GroupElement, GroupElementHash> next;
    next.reserve(std::min(budget, cur.size() * Y.size()));
    for (const auto& t : cur)
      for (const auto& y : Y) {
        next.insert(A.add(t, y));
        if (next.size() > budget)
          throw BudgetExceeded("trajectory exceeds the element budget of " + std::to_string(budget));
      }
    cur = std::move(next);
  }
  return FiniteSubset(std::vector<GroupElement>(cur.begin(), cur.end()));
}

namespace detail {

/// Finite subset of Z as sorted disjoint closed intervals.
class IntervalSet {
 public:
  using I128 = __int128;
  IntervalSet() : iv_{{0, 0}} {}

  std::size_t intervals() const { return iv_.size(); }

  BigCount size() const {
    BigCount n = 0;
    for (const auto& [lo, hi] : iv_) n += to_big(hi - lo + 1);
    return n;
  }

  /// this + Y for a finite set Y of integers.
  void add(const std::vector<I128>& Y, std::size_t budget) {
    std::vector<std::pair<I128, I128>> all;
    all.reserve(iv_.size() * Y.size());
    for (auto y : Y)
      for (const auto& [lo, hi] : iv_) all.emplace_back(lo + y, hi + y);
    std::sort(all.begin(), all.end());
    std::vector<std::pair<I128, I128>> merged;
    for (const auto& p : all) {
      if (!merged.empty() && p.first <= merged.back().second + 1) {
        merged.back().second = std::max(merged.back().second, p.second);
      } else {
        merged.push_back(p);
        if (merged.size() > budget) throw BudgetExceeded("interval representation exceeds the budget");
      }
    }
    iv_ = std::move(merged);
  }

  static BigCount to_big(I128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    BigCount r = static_cast<std::uint64_t>(u >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(u);
    return neg ? BigCount(-r) : r;
  }

 private:
  std::vector<std::pair<I128, I128>> iv_;
};

inline constexpr __int128 kIntervalLimit = static_cast<__int128>(1) << 120;

}  // namespace detail

/// |T_F(alpha, X)| for multiplication actions on Z, computed on interval
/// sets in 128-bit arithmetic; nullopt when the action is not of that form.
inline std::optional<BigCount> trajectory_size_on_z(const Action& a, const MSubset& F, const FiniteSubset& X,
                                                    std::size_t budget = kDefaultElementBudget) {
  const AbelianGroup& A = a.group();
  if (A.kind() != GroupKind::FreeZ || A.base_dim() != 1) return std::nullopt;
  for (const auto& g : a.generators())
    if (!g.scalar_on_z()) return std::nullopt;
  const Monoid& S = a.monoid();
  for (const auto& c : S.coords())
    if (c.kind != CoordKind::Nat) return std::nullopt;
  detail::IntervalSet T;
  for (const auto& s : F) {
    __int128 k = 1;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::int64_t e = 0; e < s[i]; ++e) {
        k *= *a.generators()[i].scalar_on_z();
        if (k > detail::kIntervalLimit || k < -detail::kIntervalLimit)
          throw BudgetExceeded("scalar exceeds 128-bit range");
      }
    std::vector<__int128> Y;
    for (const auto& x : X) Y.push_back(k * x.data[0]);
    T.add(Y, budget);
  }
  return T.size();
}

/// |T_F(alpha, X)|, exact. Uses the interval kernel on Z when it applies.
inline BigCount trajectory_size(const Action& a, const MSubset& F, const FiniteSubset& X,
                                std::size_t budget = kDefaultElementBudget) {
  if (X.empty()) throw InvalidArgument("trajectory seed must be nonempty");
  if (auto n = trajectory_size_on_z(a, F, X, budget)) return *n;
  return BigCount(trajectory(a, F, X, budget).size());
}

/// T_F(alpha, B) = <alpha(s)(B) : s in F> for a finitely generated B.
inline Subgroup subgroup_trajectory(const Action& a, const MSubset& F, const Subgroup& B) {
  a.group().require_same(B.group());
  if (B.is_coordinatewise()) {
    Subgroup acc = Subgroup::trivial(a.group());
    for (const auto& s : F) acc = subgroup_join(acc, a.at(s).image(B));
    return acc;
  }
  std::vector<GroupElement> gens;
  const auto bg = B.generators();
  for (const auto& s : F) {
    const Endomorphism phi = a.at(s);
    for (const auto& b : bg) gens.push_back(phi.apply(b));
  }
  return Subgroup::generated(a.group(), gens);
}

/// A trajectory seed: a finite subset or a finite subgroup (taken as a set).
using Seed = std::variant<FiniteSubset, Subgroup>;

inline BigCount seed_trajectory_size(const Action& a, const MSubset& F, const Seed& X,
                                     std::size_t budget = kDefaultElementBudget) {
  if (const auto* B = std::get_if<Subgroup>(&X)) {
    auto o = subgroup_trajectory(a, F, *B).order();
    if (!o) throw InvalidArgument("subgroup seed generates an infinite trajectory");
    return *o;
  }
  return trajectory_size(a, F, std::get<FiniteSubset>(X), budget);
}

}  // namespace amenact
