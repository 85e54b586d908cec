// Endomorphisms of the supported abelian groups: integer matrices on Z^r and
// on finite products, and index translations composed with a base matrix on
// direct sums (Bernoulli-type shifts, optionally truncating).
#pragma once

#include "amenact/abelian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace amenact {

/// Integer matrix M defines a homomorphism of Z^k/(n) -> Z^m/(m) iff every
/// column j, multiplied by n_j, vanishes modulo the target moduli.
inline bool is_compatible_matrix(const IntMatrix& M, const std::vector<std::int64_t>& source,
                                 const std::vector<std::int64_t>& target) {
  if (M.rows != target.size() || M.cols != source.size()) return false;
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t j = 0; j < M.cols; ++j) {
      if (source[j] == 0) continue;
      const __int128 v = static_cast<__int128>(source[j]) * M(i, j);
      if (target[i] == 0) {
        if (v != 0) return false;
      } else if (v % target[i] != 0) {
        return false;
      }
    }
  return true;
}

/// Solves M x = y for x in Z^k/(source) with y in Z^m/(target); nullopt if y
/// is not in the image.
inline std::optional<Coords> solve_linear(const IntMatrix& M, const std::vector<std::int64_t>& source,
                                          const std::vector<std::int64_t>& target, const Coords& y) {
  const std::size_t m = target.size(), k = source.size();
  std::vector<std::int64_t> mod(target);
  mod.insert(mod.end(), source.begin(), source.end());
  Echelon big(mod);
  for (std::size_t i = 0; i < k; ++i) {
    Coords v(m + k, 0);
    for (std::size_t r = 0; r < m; ++r) v[r] = M(r, i);
    v[m + i] = 1;
    big.insert(std::move(v));
  }
  Coords w(m + k, 0);
  std::copy(y.begin(), y.end(), w.begin());
  w = big.reduce(w);
  for (std::size_t r = 0; r < m; ++r)
    if (w[r] != 0) return std::nullopt;
  Coords x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = source[i] ? floor_mod(-w[m + i], source[i]) : -w[m + i];
  return x;
}

class Endomorphism {
 public:
  /// One step of a direct-sum endomorphism: x_i -> D x_i placed at index i+t;
  /// a truncating step drops terms whose new index leaves the monoid.
  struct ShiftStep {
    MElement translation;
    IntMatrix base;
    bool truncating = false;
    bool operator==(const ShiftStep&) const = default;
  };

  Endomorphism() = default;

  static Endomorphism matrix(const AbelianGroup& A, IntMatrix M) {
    if (A.kind() == GroupKind::DirectSum)
      throw InvalidArgument("direct sums use shift endomorphisms");
    if (!is_compatible_matrix(M, A.moduli(), A.moduli()))
      throw InvalidArgument("matrix is not compatible with " + A.describe());
    Endomorphism e;
    e.group_ = A;
    e.matrix_ = reduce(A.moduli(), std::move(M));
    return e;
  }

  static Endomorphism scalar(const AbelianGroup& A, std::int64_t k) {
    if (A.kind() == GroupKind::DirectSum) {
      IntMatrix D = IntMatrix::identity(A.base_dim());
      for (std::size_t i = 0; i < D.rows; ++i) D(i, i) = k;
      return shift(A, A.index().identity(), D);
    }
    IntMatrix M = IntMatrix::identity(A.base_dim());
    for (std::size_t i = 0; i < M.rows; ++i) M(i, i) = k;
    return matrix(A, std::move(M));
  }

  static Endomorphism identity(const AbelianGroup& A) { return scalar(A, 1); }
  static Endomorphism zero(const AbelianGroup& A) { return scalar(A, 0); }

  /// Index translation by t with base matrix D on a direct sum.
  static Endomorphism shift(const AbelianGroup& A, MElement t, IntMatrix D, bool truncating = false) {
    if (A.kind() != GroupKind::DirectSum) throw InvalidArgument("shifts act on direct sums");
    if (!A.index().is_commutative()) throw UnsupportedError("shifts need a commutative index monoid");
    if (t.size() != A.index_dim()) throw MismatchError("translation does not match the index monoid");
    if (!truncating && !A.index().contains(normalize_index(A.index(), t)))
      throw InvalidArgument("translation " + to_string(t) + " leaves the index monoid; use a truncating shift");
    if (!is_compatible_matrix(D, A.moduli(), A.moduli()))
      throw InvalidArgument("base matrix is not compatible with the base group");
    Endomorphism e;
    e.group_ = A;
    e.steps_.push_back(ShiftStep{std::move(t), reduce(A.moduli(), std::move(D)), truncating});
    return e;
  }

  static Endomorphism shift(const AbelianGroup& A, MElement t, bool truncating = false) {
    return shift(A, std::move(t), IntMatrix::identity(A.base_dim()), truncating);
  }

  const AbelianGroup& group() const noexcept { return group_; }
  bool is_matrix() const noexcept { return group_.kind() != GroupKind::DirectSum; }
  const IntMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<ShiftStep>& steps() const noexcept { return steps_; }

  /// The scalar k when this is multiplication by k on Z.
  std::optional<std::int64_t> scalar_on_z() const {
    if (group_.kind() == GroupKind::FreeZ && group_.base_dim() == 1) return matrix_(0, 0);
    return std::nullopt;
  }

  GroupElement apply(const GroupElement& x) const {
    if (is_matrix()) {
      Coords y = matrix_.apply(x.data);
      group_.reduce_base(y.data());
      return GroupElement{std::move(y)};
    }
    auto terms = group_.terms(x);
    const Monoid& I = group_.index();
    for (const auto& st : steps_) {
      std::vector<AbelianGroup::Term> next;
      next.reserve(terms.size());
      for (auto& [i, v] : terms) {
        MElement j = normalize_index(I, add_index(i, st.translation));
        if (!I.contains(j)) {
          if (st.truncating) continue;
          throw std::logic_error("non-truncating shift left the index monoid");
        }
        next.emplace_back(std::move(j), st.base.apply(v));
      }
      terms = std::move(next);
    }
    return group_.from_terms(std::move(terms));
  }

  FiniteSubset apply(const FiniteSubset& X) const {
    std::vector<GroupElement> v;
    v.reserve(X.size());
    for (const auto& x : X) v.push_back(apply(x));
    return FiniteSubset(std::move(v));
  }

  /// this o g (apply g first).
  Endomorphism operator*(const Endomorphism& g) const {
    group_.require_same(g.group_);
    Endomorphism r;
    r.group_ = group_;
    if (is_matrix()) {
      r.matrix_ = reduce(group_.moduli(), matrix_ * g.matrix_);
      return r;
    }
    r.steps_ = g.steps_;
    for (const auto& st : steps_) r.push_step(st);
    return r;
  }

  Endomorphism power(std::uint64_t k) const {
    Endomorphism r = identity(group_), b = *this;
    while (k) {
      if (k & 1) r = b * r;
      k >>= 1;
      if (k) b = b * b;
    }
    return r;
  }

  std::optional<Endomorphism> inverse() const {
    if (is_matrix()) {
      const auto& mod = group_.moduli();
      const std::size_t k = mod.size();
      IntMatrix inv(k, k);
      for (std::size_t j = 0; j < k; ++j) {
        Coords e(k, 0);
        e[j] = 1;
        auto x = solve_linear(matrix_, mod, mod, e);
        if (!x) return std::nullopt;
        for (std::size_t i = 0; i < k; ++i) inv(i, j) = (*x)[i];
      }
      // surjective; on a finite group that already forces injectivity, on Z^r
      // the solved matrix must be a two-sided inverse
      Endomorphism r = matrix(group_, std::move(inv));
      if (!((*this * r) == identity(group_)) || !((r * *this) == identity(group_))) return std::nullopt;
      return r;
    }
    const Monoid& I = group_.index();
    if (!I.is_group()) return std::nullopt;
    Endomorphism r;
    r.group_ = group_;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      if (it->truncating) return std::nullopt;
      Endomorphism base = matrix(AbelianGroup::finite(group_.moduli()), it->base);
      auto bi = base.inverse();
      if (!bi) return std::nullopt;
      MElement t = it->translation;
      for (auto& c : t) c = -c;
      r.push_step(ShiftStep{normalize_index(I, t), bi->matrix_, false});
    }
    return r;
  }

  /// Structural equality after normalization; exact for matrices, and for
  /// shift chains compared on the images of unit terms in a window.
  bool operator==(const Endomorphism& o) const {
    if (!(group_ == o.group_)) return false;
    if (is_matrix()) return matrix_ == o.matrix_;
    if (steps_ == o.steps_) return true;
    for (const auto& x : probe_elements(group_))
      if (apply(x) != o.apply(x)) return false;
    return true;
  }

  /// Sample used for checks of identities between direct-sum endomorphisms:
  /// e_i (x) u for unit vectors u and indices i in a window.
  static std::vector<GroupElement> probe_elements(const AbelianGroup& A, std::int64_t window = 4) {
    std::vector<GroupElement> out;
    if (A.kind() != GroupKind::DirectSum) {
      for (std::size_t j = 0; j < A.base_dim(); ++j) {
        Coords v(A.base_dim(), 0);
        v[j] = 1;
        out.push_back(A.element(v));
      }
      return out;
    }
    for (const auto& i : A.index().window(window))
      for (std::size_t j = 0; j < A.base_dim(); ++j) {
        Coords v(A.base_dim(), 0);
        v[j] = 1;
        GroupElement g = A.single(i, v);
        if (!A.is_zero(g)) out.push_back(std::move(g));
      }
    return out;
  }

  Subgroup image(const Subgroup& B) const {
    group_.require_same(B.group());
    if (B.is_coordinatewise()) {
      const Monoid& I = group_.index();
      Echelon e = B.base_lattice();
      for (const auto& st : steps_) {
        if (st.truncating || !I.is_group()) throw UnsupportedError("image of a coordinatewise subgroup under a non-surjective shift");
        e = amenact::image(st.base, e, group_.moduli());
      }
      return Subgroup::coordinatewise(group_, std::move(e));
    }
    std::vector<GroupElement> g;
    for (const auto& b : B.generators()) g.push_back(apply(b));
    return Subgroup::generated(group_, g);
  }

  /// phi(B) contained in B.
  bool maps_into(const Subgroup& B) const {
    if (B.is_coordinatewise()) {
      for (const auto& st : steps_)
        for (const auto& r : B.base_lattice().basis())
          if (!B.base_lattice().contains(st.base.apply(r))) return false;
      return true;
    }
    for (const auto& b : B.generators())
      if (!B.contains(apply(b))) return false;
    return true;
  }

  std::string describe() const {
    if (is_matrix()) {
      std::string s = "[";
      for (std::size_t i = 0; i < matrix_.rows; ++i) {
        if (i) s += ";";
        for (std::size_t j = 0; j < matrix_.cols; ++j) s += (j ? "," : "") + std::to_string(matrix_(i, j));
      }
      return s + "]";
    }
    std::string s;
    for (const auto& st : steps_) {
      if (!s.empty()) s += " then ";
      s += std::string(st.truncating ? "truncating " : "") + "shift " + to_string(st.translation);
    }
    return s.empty() ? "id" : s;
  }

 private:
  static IntMatrix reduce(const std::vector<std::int64_t>& mod, IntMatrix M) {
    for (std::size_t i = 0; i < M.rows; ++i)
      if (mod[i] > 0)
        for (std::size_t j = 0; j < M.cols; ++j) M(i, j) = floor_mod(M(i, j), mod[i]);
    return M;
  }

  static MElement add_index(const MElement& i, const MElement& t) {
    MElement j(i.size());
    for (std::size_t c = 0; c < i.size(); ++c) j[c] = mul_add(i[c], 1, t[c]);
    return j;
  }

  static MElement normalize_index(const Monoid& I, MElement j) {
    for (std::size_t c = 0; c < j.size(); ++c)
      if (I.coords()[c].kind == CoordKind::Mod) j[c] = floor_mod(j[c], I.coords()[c].modulus);
    return j;
  }

  void push_step(const ShiftStep& st) {
    if (!steps_.empty()) {
      ShiftStep& last = steps_.back();
      const Monoid& I = group_.index();
      bool mergeable = true;
      for (std::size_t c = 0; c < st.translation.size(); ++c)
        if (I.coords()[c].kind == CoordKind::Nat && last.translation[c] < 0 && st.translation[c] > 0)
          mergeable = false;
      if (!(last.truncating || st.truncating)) mergeable = true;
      if (mergeable) {
        last.translation = normalize_index(I, add_index(last.translation, st.translation));
        last.base = reduce(group_.moduli(), st.base * last.base);
        last.truncating = last.truncating || st.truncating;
        return;
      }
    }
    steps_.push_back(st);
  }

  AbelianGroup group_;
  IntMatrix matrix_;
  std::vector<ShiftStep> steps_;
};

}  // namespace amenact
