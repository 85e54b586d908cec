// Discrete abelian groups with exact element arithmetic: free abelian groups
// Z^r, finite products Z/n_1 x ... x Z/n_k and finitely supported direct sums
// of a finite product indexed by a monoid.
#pragma once

#include "amenact/core.hpp"
#include "amenact/lattice.hpp"
#include "amenact/monoid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace amenact {

/// Element of an AbelianGroup. For Z^r and finite products `data` is the
/// coordinate vector. For direct sums it is the concatenation of the nonzero
/// terms (index, value), sorted by index.
struct GroupElement {
  Coords data;
  bool operator==(const GroupElement&) const = default;
  auto operator<=>(const GroupElement&) const = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept { return CoordsHash{}(g.data); }
};

enum class GroupKind { FreeZ, FiniteProduct, DirectSum };

class AbelianGroup {
 public:
  AbelianGroup() = default;

  static AbelianGroup free(std::size_t rank) {
    AbelianGroup g;
    g.kind_ = GroupKind::FreeZ;
    g.moduli_.assign(rank, 0);
    return g;
  }
  static AbelianGroup finite(std::vector<std::int64_t> factors) {
    for (auto n : factors)
      if (n < 1) throw InvalidArgument("finite factor must be >= 1");
    AbelianGroup g;
    g.kind_ = GroupKind::FiniteProduct;
    g.moduli_ = std::move(factors);
    return g;
  }
  /// Finitely supported maps index -> Z/n_1 x ... x Z/n_k.
  static AbelianGroup direct_sum(std::vector<std::int64_t> base, Monoid index) {
    for (auto n : base)
      if (n < 1) throw InvalidArgument("finite factor must be >= 1");
    AbelianGroup g;
    g.kind_ = GroupKind::DirectSum;
    g.moduli_ = std::move(base);
    g.index_ = std::move(index);
    return g;
  }

  GroupKind kind() const noexcept { return kind_; }
  /// Moduli of the base coordinates (0 for Z).
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
  std::size_t base_dim() const noexcept { return moduli_.size(); }
  std::size_t index_dim() const noexcept { return kind_ == GroupKind::DirectSum ? index_.dim() : 0; }
  std::size_t block() const noexcept { return index_dim() + base_dim(); }
  const Monoid& index() const noexcept { return index_; }
  AbelianGroup base_group() const {
    return kind_ == GroupKind::DirectSum ? finite(moduli_) : *this;
  }

  bool is_finite() const {
    if (kind_ == GroupKind::FreeZ) return moduli_.empty();
    if (kind_ == GroupKind::FiniteProduct) return true;
    return base_order() == 1 || index_.is_finite();
  }
  bool is_torsion() const { return kind_ != GroupKind::FreeZ || moduli_.empty(); }

  BigCount base_order() const {
    BigCount n = 1;
    for (auto m : moduli_) n *= m;
    return n;
  }

  std::optional<BigCount> order() const {
    if (!is_finite()) return std::nullopt;
    if (kind_ == GroupKind::DirectSum) {
      BigCount n = 1;
      const std::int64_t k = index_.order();
      for (std::int64_t i = 0; i < k; ++i) n *= base_order();
      return n;
    }
    return base_order();
  }

  GroupElement zero() const {
    return GroupElement{kind_ == GroupKind::DirectSum ? Coords{} : Coords(base_dim(), 0)};
  }

  /// Element of Z^r or of a finite product (reduced).
  GroupElement element(Coords c) const {
    if (kind_ == GroupKind::DirectSum) throw InvalidArgument("direct sum elements are built from terms");
    if (c.size() != base_dim()) throw MismatchError("coordinate count does not match the group");
    reduce_base(c.data());
    return GroupElement{std::move(c)};
  }

  /// e_index (x) value in a direct sum.
  GroupElement single(const MElement& idx, Coords value) const {
    return from_terms({{idx, std::move(value)}});
  }

  using Term = std::pair<MElement, Coords>;

  GroupElement from_terms(std::vector<Term> terms) const {
    if (kind_ != GroupKind::DirectSum) throw InvalidArgument("terms only describe direct sum elements");
    std::map<MElement, Coords> acc;
    for (auto& [i, v] : terms) {
      index_.require(i);
      if (v.size() != base_dim()) throw MismatchError("base value has the wrong length");
      auto it = acc.find(i);
      if (it == acc.end()) {
        acc.emplace(i, v);
      } else {
        for (std::size_t j = 0; j < v.size(); ++j) it->second[j] += v[j];
      }
    }
    GroupElement g;
    for (auto& [i, v] : acc) {
      reduce_base(v.data());
      if (is_zero_value(v.data())) continue;
      g.data.insert(g.data.end(), i.begin(), i.end());
      g.data.insert(g.data.end(), v.begin(), v.end());
    }
    return g;
  }

  std::vector<Term> terms(const GroupElement& g) const {
    std::vector<Term> out;
    if (kind_ != GroupKind::DirectSum) {
      out.emplace_back(MElement{}, g.data);
      return out;
    }
    const std::size_t b = block(), d = index_dim();
    for (std::size_t p = 0; p < g.data.size(); p += b)
      out.emplace_back(MElement(g.data.begin() + static_cast<std::ptrdiff_t>(p),
                                g.data.begin() + static_cast<std::ptrdiff_t>(p + d)),
                       Coords(g.data.begin() + static_cast<std::ptrdiff_t>(p + d),
                              g.data.begin() + static_cast<std::ptrdiff_t>(p + b)));
    return out;
  }

  std::size_t support_size(const GroupElement& g) const {
    return kind_ == GroupKind::DirectSum ? g.data.size() / block() : 1;
  }

  bool is_zero(const GroupElement& g) const {
    return kind_ == GroupKind::DirectSum ? g.data.empty() : is_zero_value(g.data.data());
  }

  bool contains(const GroupElement& g) const {
    if (kind_ != GroupKind::DirectSum) {
      if (g.data.size() != base_dim()) return false;
      for (std::size_t j = 0; j < base_dim(); ++j)
        if (moduli_[j] > 0 && (g.data[j] < 0 || g.data[j] >= moduli_[j])) return false;
      return true;
    }
    if (g.data.size() % block() != 0) return false;
    const MElement* prev = nullptr;
    MElement idx;
    for (const auto& [i, v] : terms(g)) {
      if (!index_.contains(i) || is_zero_value(v.data())) return false;
      if (prev && !(*prev < i)) return false;
      for (std::size_t j = 0; j < base_dim(); ++j)
        if (v[j] < 0 || v[j] >= moduli_[j]) return false;
      idx = i;
      prev = &idx;
    }
    return true;
  }

  void require(const GroupElement& g) const {
    if (!contains(g)) throw MismatchError("element " + to_string(g.data) + " is not in " + describe());
  }

  GroupElement add(const GroupElement& a, const GroupElement& b) const {
    if (kind_ != GroupKind::DirectSum) {
      Coords c(base_dim());
      for (std::size_t j = 0; j < c.size(); ++j) c[j] = mul_add(a.data[j], 1, b.data[j]);
      reduce_base(c.data());
      return GroupElement{std::move(c)};
    }
    const std::size_t bl = block(), d = index_dim();
    GroupElement r;
    r.data.reserve(a.data.size() + b.data.size());
    std::size_t i = 0, j = 0;
    auto cmp_index = [&](std::size_t p, std::size_t q) {
      return std::lexicographical_compare(a.data.begin() + static_cast<std::ptrdiff_t>(p),
                                          a.data.begin() + static_cast<std::ptrdiff_t>(p + d),
                                          b.data.begin() + static_cast<std::ptrdiff_t>(q),
                                          b.data.begin() + static_cast<std::ptrdiff_t>(q + d));
    };
    auto eq_index = [&](std::size_t p, std::size_t q) {
      return std::equal(a.data.begin() + static_cast<std::ptrdiff_t>(p),
                        a.data.begin() + static_cast<std::ptrdiff_t>(p + d),
                        b.data.begin() + static_cast<std::ptrdiff_t>(q));
    };
    while (i < a.data.size() || j < b.data.size()) {
      if (j >= b.data.size() || (i < a.data.size() && cmp_index(i, j))) {
        r.data.insert(r.data.end(), a.data.begin() + static_cast<std::ptrdiff_t>(i),
                      a.data.begin() + static_cast<std::ptrdiff_t>(i + bl));
        i += bl;
      } else if (i >= a.data.size() || !eq_index(i, j)) {
        r.data.insert(r.data.end(), b.data.begin() + static_cast<std::ptrdiff_t>(j),
                      b.data.begin() + static_cast<std::ptrdiff_t>(j + bl));
        j += bl;
      } else {
        const std::size_t start = r.data.size();
        r.data.insert(r.data.end(), a.data.begin() + static_cast<std::ptrdiff_t>(i),
                      a.data.begin() + static_cast<std::ptrdiff_t>(i + d));
        bool nonzero = false;
        for (std::size_t c = 0; c < base_dim(); ++c) {
          std::int64_t v = floor_mod(a.data[i + d + c] + b.data[j + d + c], moduli_[c]);
          nonzero |= v != 0;
          r.data.push_back(v);
        }
        if (!nonzero) r.data.resize(start);
        i += bl;
        j += bl;
      }
    }
    return r;
  }

  GroupElement neg(const GroupElement& a) const {
    GroupElement r = a;
    if (kind_ != GroupKind::DirectSum) {
      for (auto& x : r.data) x = -x;
      reduce_base(r.data.data());
      return r;
    }
    const std::size_t bl = block(), d = index_dim();
    for (std::size_t p = 0; p < r.data.size(); p += bl)
      for (std::size_t c = 0; c < base_dim(); ++c) r.data[p + d + c] = floor_mod(-r.data[p + d + c], moduli_[c]);
    return r;
  }

  GroupElement sub(const GroupElement& a, const GroupElement& b) const { return add(a, neg(b)); }

  GroupElement scale(const GroupElement& a, std::int64_t k) const {
    if (kind_ != GroupKind::DirectSum) {
      Coords c(base_dim());
      for (std::size_t j = 0; j < c.size(); ++j) c[j] = mul_add(0, a.data[j], k);
      reduce_base(c.data());
      return GroupElement{std::move(c)};
    }
    std::vector<Term> ts = terms(a);
    for (auto& [i, v] : ts)
      for (std::size_t c = 0; c < v.size(); ++c) v[c] = floor_mod(mul_add(0, v[c], k), moduli_[c]);
    return from_terms(std::move(ts));
  }

  /// All elements of a finite group in canonical order.
  std::vector<GroupElement> enumerate(std::size_t budget = kDefaultElementBudget) const {
    auto n = order();
    if (!n) throw InvalidArgument("cannot enumerate an infinite group");
    if (*n > budget) throw BudgetExceeded("group of order " + n->str() + " exceeds the element budget");
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (auto m : moduli_) ranges.emplace_back(0, m - 1);
    auto values = Monoid::box(ranges);
    if (kind_ != GroupKind::DirectSum) {
      std::vector<GroupElement> out;
      for (auto& v : values) out.push_back(GroupElement{std::move(v)});
      return out;
    }
    std::vector<GroupElement> out{zero()};
    for (const auto& idx : index_.window(1)) {
      std::vector<GroupElement> next;
      for (const auto& g : out)
        for (const auto& v : values) next.push_back(add(g, single(idx, v)));
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string describe() const {
    auto base = [&] {
      if (moduli_.empty()) return std::string("0");
      std::string s;
      for (std::size_t i = 0; i < moduli_.size(); ++i) {
        if (i) s += " x ";
        s += moduli_[i] == 0 ? "Z" : "Z/" + std::to_string(moduli_[i]);
      }
      return s;
    };
    switch (kind_) {
      case GroupKind::FreeZ:
        return moduli_.empty() ? "0" : "Z^" + std::to_string(moduli_.size());
      case GroupKind::FiniteProduct:
        return base();
      case GroupKind::DirectSum:
        return "(" + base() + ")^(" + index_.describe() + ")";
    }
    return "?";
  }

  bool operator==(const AbelianGroup& o) const {
    return kind_ == o.kind_ && moduli_ == o.moduli_ && (kind_ != GroupKind::DirectSum || index_ == o.index_);
  }

  void require_same(const AbelianGroup& o) const {
    if (!(*this == o)) throw MismatchError("groups differ: " + describe() + " vs " + o.describe());
  }

  void reduce_base(std::int64_t* v) const {
    for (std::size_t j = 0; j < base_dim(); ++j)
      if (moduli_[j] > 0) v[j] = floor_mod(v[j], moduli_[j]);
  }
  bool is_zero_value(const std::int64_t* v) const {
    for (std::size_t j = 0; j < base_dim(); ++j)
      if (v[j] != 0) return false;
    return true;
  }

 private:
  GroupKind kind_ = GroupKind::FiniteProduct;
  std::vector<std::int64_t> moduli_;
  Monoid index_;
};

// ---------------------------------------------------------------------------
// Finite subsets
// ---------------------------------------------------------------------------

class FiniteSubset {
 public:
  FiniteSubset() = default;
  explicit FiniteSubset(std::vector<GroupElement> elems) : elems_(std::move(elems)) { normalize(); }

  static FiniteSubset of(const AbelianGroup& A, const std::vector<Coords>& coords) {
    std::vector<GroupElement> v;
    for (const auto& c : coords) v.push_back(A.element(c));
    return FiniteSubset(std::move(v));
  }

  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  const std::vector<GroupElement>& elements() const noexcept { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  bool contains(const GroupElement& g) const { return std::binary_search(elems_.begin(), elems_.end(), g); }
  bool contains_zero(const AbelianGroup& A) const { return contains(A.zero()); }
  bool operator==(const FiniteSubset&) const = default;

  bool subset_of(const FiniteSubset& o) const {
    return std::includes(o.elems_.begin(), o.elems_.end(), elems_.begin(), elems_.end());
  }

 private:
  void normalize() {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }
  std::vector<GroupElement> elems_;
};

inline FiniteSubset minkowski_sum(const AbelianGroup& A, const FiniteSubset& X, const FiniteSubset& Y) {
  for (const auto& x : X) A.require(x);
  for (const auto& y : Y) A.require(y);
  std::unordered_set<GroupElement, GroupElementHash> acc;
  acc.reserve(X.size() * Y.size());
  for (const auto& x : X)
    for (const auto& y : Y) acc.insert(A.add(x, y));
  return FiniteSubset(std::vector<GroupElement>(acc.begin(), acc.end()));
}

/// W_m = W + ... + W (m summands); W_1 = W.
inline FiniteSubset iterated_sum(const AbelianGroup& A, const FiniteSubset& W, std::size_t m) {
  if (m == 0) return FiniteSubset({A.zero()});
  FiniteSubset r = W;
  for (std::size_t i = 1; i < m; ++i) r = minkowski_sum(A, r, W);
  return r;
}

inline FiniteSubset negate(const AbelianGroup& A, const FiniteSubset& X) {
  std::vector<GroupElement> v;
  for (const auto& x : X) v.push_back(A.neg(x));
  return FiniteSubset(std::move(v));
}

inline FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<GroupElement> v(a.elements());
  v.insert(v.end(), b.begin(), b.end());
  return FiniteSubset(std::move(v));
}

/// l(X) = log |X|.
inline double ell(const FiniteSubset& X) {
  if (X.empty()) throw InvalidArgument("log size of the empty set");
  return std::log(static_cast<double>(X.size()));
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

/// Subgroup of an AbelianGroup, either generated by finitely many elements
/// (canonical form: Hermite normal form over the union of the supports) or,
/// in a direct sum, the subgroup B0^(S) of all elements with every value in a
/// fixed subgroup B0 of the base.
class Subgroup {
 public:
  Subgroup() = default;

  static Subgroup generated(const AbelianGroup& A, const std::vector<GroupElement>& gens) {
    Subgroup s;
    s.group_ = A;
    for (const auto& g : gens) A.require(g);
    std::vector<MElement> frame;
    if (A.kind() == GroupKind::DirectSum) {
      for (const auto& g : gens)
        for (const auto& [i, v] : A.terms(g)) frame.push_back(i);
      std::sort(frame.begin(), frame.end());
      frame.erase(std::unique(frame.begin(), frame.end()), frame.end());
    }
    s.set_frame(std::move(frame));
    for (const auto& g : gens) s.ech_.insert(s.embed(g));
    return s;
  }

  static Subgroup generated(const AbelianGroup& A, const std::vector<Coords>& gens) {
    std::vector<GroupElement> g;
    for (const auto& c : gens) g.push_back(A.element(c));
    return generated(A, g);
  }

  static Subgroup trivial(const AbelianGroup& A) { return generated(A, std::vector<GroupElement>{}); }

  /// Whole group (finite products, Z^r, and direct sums).
  static Subgroup whole(const AbelianGroup& A) {
    if (A.kind() == GroupKind::DirectSum) return coordinatewise(A, full_lattice(A.moduli()));
    return generated(A, unit_vectors(A));
  }

  /// B0^(S) inside a direct sum; B0 given as a lattice over the base moduli.
  static Subgroup coordinatewise(const AbelianGroup& A, Echelon base) {
    if (A.kind() != GroupKind::DirectSum) throw InvalidArgument("coordinatewise subgroups live in direct sums");
    if (base.moduli() != A.moduli()) throw MismatchError("base subgroup frame differs");
    Subgroup s;
    s.group_ = A;
    s.coordinatewise_ = true;
    s.ech_ = std::move(base);
    return s;
  }

  /// k * A for a direct sum or finite product.
  static Subgroup multiples(const AbelianGroup& A, std::int64_t k) {
    Echelon b(A.moduli());
    for (std::size_t j = 0; j < A.base_dim(); ++j) {
      Coords v(A.base_dim(), 0);
      v[j] = k;
      b.insert(std::move(v));
    }
    if (A.kind() == GroupKind::DirectSum) return coordinatewise(A, std::move(b));
    std::vector<GroupElement> g;
    for (auto& r : b.generators()) g.push_back(A.element(r));
    return generated(A, g);
  }

  const AbelianGroup& group() const noexcept { return group_; }
  bool is_coordinatewise() const noexcept { return coordinatewise_; }
  /// Base subgroup B0 of a coordinatewise subgroup.
  const Echelon& base_lattice() const noexcept { return ech_; }
  /// Canonical lattice of a generated subgroup over its frame.
  const Echelon& lattice() const noexcept { return ech_; }
  const std::vector<MElement>& frame() const noexcept { return frame_; }

  std::vector<GroupElement> generators() const {
    if (coordinatewise_) throw UnsupportedError("coordinatewise subgroups are not finitely generated");
    std::vector<GroupElement> out;
    for (const auto& r : ech_.generators()) out.push_back(unembed(r));
    return out;
  }

  std::optional<BigCount> order() const {
    if (coordinatewise_) {
      auto o = ech_.subgroup_order();
      if (o && *o == 1) return BigCount(1);
      if (group_.index().is_finite()) {
        BigCount n = 1;
        for (std::int64_t i = 0; i < group_.index().order(); ++i) n *= *o;
        return n;
      }
      return std::nullopt;
    }
    return ech_.subgroup_order();
  }

  double log_order() const {
    auto o = order();
    if (!o) return std::numeric_limits<double>::infinity();
    return log_count(*o);
  }

  bool is_finite() const { return order().has_value(); }

  /// Canonical representative of the coset x + B.
  GroupElement canonical_rep(const GroupElement& x) const {
    group_.require(x);
    const AbelianGroup& A = group_;
    if (coordinatewise_) {
      auto ts = A.terms(x);
      for (auto& [i, v] : ts) v = ech_.reduce(v);
      return A.from_terms(std::move(ts));
    }
    if (A.kind() != GroupKind::DirectSum) {
      Coords r = ech_.reduce(x.data);
      A.reduce_base(r.data());
      return GroupElement{std::move(r)};
    }
    // split x into the framed part (reduced) and the rest (kept)
    std::vector<AbelianGroup::Term> outside;
    Coords framed(ech_.dim(), 0);
    for (auto& [i, v] : A.terms(x)) {
      auto it = std::lower_bound(frame_.begin(), frame_.end(), i);
      if (it != frame_.end() && *it == i) {
        const std::size_t p = static_cast<std::size_t>(it - frame_.begin()) * A.base_dim();
        std::copy(v.begin(), v.end(), framed.begin() + static_cast<std::ptrdiff_t>(p));
      } else {
        outside.emplace_back(i, v);
      }
    }
    framed = ech_.reduce(framed);
    GroupElement r = unembed(framed);
    if (outside.empty()) return r;
    return A.add(r, A.from_terms(std::move(outside)));
  }

  bool contains(const GroupElement& x) const { return group_.is_zero(canonical_rep(x)); }

  bool contains(const Subgroup& o) const {
    if (o.coordinatewise_) {
      if (!coordinatewise_) return o.ech_.subgroup_order() == BigCount(1);
      for (const auto& r : o.ech_.basis())
        if (!ech_.contains(r)) return false;
      return true;
    }
    for (const auto& g : o.generators())
      if (!contains(g)) return false;
    return true;
  }

  bool operator==(const Subgroup& o) const {
    if (!(group_ == o.group_)) return false;
    return contains(o) && o.contains(*this);
  }

  /// All elements of a finite subgroup.
  std::vector<GroupElement> elements(std::size_t budget = kDefaultElementBudget) const {
    auto n = order();
    if (!n) throw InvalidArgument("cannot enumerate an infinite subgroup");
    if (*n > budget) throw BudgetExceeded("subgroup of order " + n->str() + " exceeds the element budget");
    std::vector<GroupElement> acc{group_.zero()};
    std::unordered_set<GroupElement, GroupElementHash> seen(acc.begin(), acc.end());
    for (const auto& g : generators()) {
      std::vector<GroupElement> next = acc;
      for (const auto& a : acc) {
        GroupElement cur = group_.add(a, g);
        while (seen.insert(cur).second) {
          next.push_back(cur);
          cur = group_.add(cur, g);
        }
      }
      acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    return acc;
  }

  FiniteSubset as_set(std::size_t budget = kDefaultElementBudget) const { return FiniteSubset(elements(budget)); }

 private:
  static std::vector<GroupElement> unit_vectors(const AbelianGroup& A) {
    std::vector<GroupElement> g;
    for (std::size_t j = 0; j < A.base_dim(); ++j) {
      Coords v(A.base_dim(), 0);
      v[j] = 1;
      g.push_back(A.element(v));
    }
    return g;
  }

  void set_frame(std::vector<MElement> frame) {
    frame_ = std::move(frame);
    std::vector<std::int64_t> mod;
    if (group_.kind() == GroupKind::DirectSum) {
      for (std::size_t i = 0; i < frame_.size(); ++i) mod.insert(mod.end(), group_.moduli().begin(), group_.moduli().end());
    } else {
      mod = group_.moduli();
    }
    ech_ = Echelon(std::move(mod));
  }

  Coords embed(const GroupElement& g) const {
    if (group_.kind() != GroupKind::DirectSum) return g.data;
    Coords v(ech_.dim(), 0);
    for (const auto& [i, val] : group_.terms(g)) {
      auto it = std::lower_bound(frame_.begin(), frame_.end(), i);
      if (it == frame_.end() || *it != i) throw std::logic_error("element outside subgroup frame");
      const std::size_t p = static_cast<std::size_t>(it - frame_.begin()) * group_.base_dim();
      std::copy(val.begin(), val.end(), v.begin() + static_cast<std::ptrdiff_t>(p));
    }
    return v;
  }

  GroupElement unembed(const Coords& v) const {
    if (group_.kind() != GroupKind::DirectSum) {
      Coords r = v;
      group_.reduce_base(r.data());
      return GroupElement{std::move(r)};
    }
    std::vector<AbelianGroup::Term> ts;
    const std::size_t k = group_.base_dim();
    for (std::size_t f = 0; f < frame_.size(); ++f)
      ts.emplace_back(frame_[f], Coords(v.begin() + static_cast<std::ptrdiff_t>(f * k),
                                        v.begin() + static_cast<std::ptrdiff_t>((f + 1) * k)));
    return group_.from_terms(std::move(ts));
  }

  AbelianGroup group_;
  bool coordinatewise_ = false;
  std::vector<MElement> frame_;
  Echelon ech_;
};

inline Subgroup subgroup_join(const Subgroup& B, const Subgroup& C) {
  B.group().require_same(C.group());
  if (B.is_coordinatewise() || C.is_coordinatewise()) {
    if (B.is_coordinatewise() && C.is_coordinatewise()) {
      Echelon e = B.base_lattice();
      e.absorb(C.base_lattice());
      return Subgroup::coordinatewise(B.group(), std::move(e));
    }
    const Subgroup& cw = B.is_coordinatewise() ? B : C;
    const Subgroup& gen = B.is_coordinatewise() ? C : B;
    if (cw.contains(gen)) return cw;
    throw UnsupportedError("join of a coordinatewise and a generated subgroup");
  }
  std::vector<GroupElement> g = B.generators();
  auto h = C.generators();
  g.insert(g.end(), h.begin(), h.end());
  return Subgroup::generated(B.group(), g);
}

/// l(Y, B): log of the number of cosets y + B met by Y.
inline double rel_ell(const FiniteSubset& Y, const Subgroup& B) {
  std::unordered_set<GroupElement, GroupElementHash> reps;
  for (const auto& y : Y) reps.insert(B.canonical_rep(y));
  return std::log(static_cast<double>(reps.size()));
}

inline std::size_t coset_count(const FiniteSubset& Y, const Subgroup& B) {
  std::unordered_set<GroupElement, GroupElementHash> reps;
  for (const auto& y : Y) reps.insert(B.canonical_rep(y));
  return reps.size();
}

// ---------------------------------------------------------------------------
// Quotients
// ---------------------------------------------------------------------------

/// A/B with a projection and a set-theoretic section, both induced by integer
/// matrices on the base coordinates (applied termwise in direct sums).
struct Quotient {
  AbelianGroup group;
  IntMatrix project_base;  // quotient coords x base coords
  IntMatrix lift_base;     // base coords x quotient coords
  AbelianGroup source;

  GroupElement project(const GroupElement& x) const { return map_terms(source, group, project_base, x); }
  GroupElement lift(const GroupElement& q) const { return map_terms(group, source, lift_base, q); }

  FiniteSubset project(const FiniteSubset& X) const {
    std::vector<GroupElement> v;
    for (const auto& x : X) v.push_back(project(x));
    return FiniteSubset(std::move(v));
  }

  static GroupElement map_terms(const AbelianGroup& from, const AbelianGroup& to, const IntMatrix& M,
                                const GroupElement& x) {
    from.require(x);
    if (from.kind() != GroupKind::DirectSum) return to.element(M.apply(x.data));
    auto ts = from.terms(x);
    for (auto& [i, v] : ts) v = M.apply(v);
    return to.from_terms(std::move(ts));
  }
};

namespace detail {

/// Quotient of Z^k (mod moduli) by a lattice via Smith normal form.
struct LatticeQuotient {
  std::vector<std::int64_t> moduli;  // 0 = free
  IntMatrix project;
  IntMatrix lift;
};

inline LatticeQuotient lattice_quotient(const Echelon& L) {
  const std::size_t k = L.dim();
  auto rows = L.basis();
  IntMatrix A(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) A(i, j) = rows[i][j];
  SmithForm snf = smith_normal_form(A);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < k; ++i)
    if (snf.diagonal[i] != 1) keep.push_back(i);
  LatticeQuotient q;
  q.project = IntMatrix(keep.size(), k);
  q.lift = IntMatrix(k, keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    const std::size_t i = keep[a];
    q.moduli.push_back(snf.diagonal[i]);
    for (std::size_t j = 0; j < k; ++j) {
      q.project(a, j) = snf.V(j, i);
      q.lift(j, a) = snf.Vinv(i, j);
    }
  }
  return q;
}

}  // namespace detail

inline Quotient quotient_group(const AbelianGroup& A, const Subgroup& B) {
  A.require_same(B.group());
  Quotient q;
  q.source = A;
  switch (A.kind()) {
    case GroupKind::FiniteProduct: {
      auto lq = detail::lattice_quotient(B.lattice());
      q.group = AbelianGroup::finite(lq.moduli);
      q.project_base = lq.project;
      q.lift_base = lq.lift;
      return q;
    }
    case GroupKind::DirectSum: {
      if (!B.is_coordinatewise()) {
        if (B.order() == BigCount(1)) return quotient_group(A, Subgroup::coordinatewise(A, Echelon(A.moduli())));
        throw UnsupportedError("direct sums are only divided by coordinatewise subgroups");
      }
      auto lq = detail::lattice_quotient(B.base_lattice());
      q.group = AbelianGroup::direct_sum(lq.moduli, A.index());
      q.project_base = lq.project;
      q.lift_base = lq.lift;
      return q;
    }
    case GroupKind::FreeZ: {
      auto lq = detail::lattice_quotient(B.lattice());
      const bool any_free = std::any_of(lq.moduli.begin(), lq.moduli.end(), [](auto m) { return m == 0; });
      const bool any_finite = std::any_of(lq.moduli.begin(), lq.moduli.end(), [](auto m) { return m != 0; });
      if (any_free && any_finite)
        throw UnsupportedError("quotient of Z^r with both free and torsion part is not representable");
      if (any_free) {
        // coordinate sublattice: the quotient is free
        q.group = AbelianGroup::free(lq.moduli.size());
      } else {
        q.group = AbelianGroup::finite(lq.moduli);
      }
      q.project_base = lq.project;
      q.lift_base = lq.lift;
      return q;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace amenact
