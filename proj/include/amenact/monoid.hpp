// Finitely described cancellative monoids: commutative coordinate families
// (N, Z, Z/n and products of these) and the semidirect product Z^2 x| Z.
#pragma once

#include "amenact/core.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace amenact {

using MElement = Coords;

enum class CoordKind {
  Nat,     // (N, +)
  Int,     // (Z, +)
  Mod,     // (Z/n, +)
  Capped,  // ({0..k}, min(k, x+y)); not cancellative, codomain use only
};

struct CoordSpec {
  CoordKind kind = CoordKind::Nat;
  std::int64_t modulus = 0;  // Mod: n; Capped: k
  bool operator==(const CoordSpec&) const = default;
};

using Mat2 = std::array<std::int64_t, 4>;  // row-major [[a,b],[c,d]]

inline Mat2 mat2_mul(const Mat2& x, const Mat2& y) {
  auto dot = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return checked_narrow(static_cast<__int128>(a) * b + static_cast<__int128>(c) * d);
  };
  return {dot(x[0], y[0], x[1], y[2]), dot(x[0], y[1], x[1], y[3]), dot(x[2], y[0], x[3], y[2]),
          dot(x[2], y[1], x[3], y[3])};
}

class Monoid {
 public:
  Monoid() = default;

  static Monoid naturals(std::size_t d = 1) { return uniform(CoordSpec{CoordKind::Nat, 0}, d); }
  static Monoid integers(std::size_t d = 1) { return uniform(CoordSpec{CoordKind::Int, 0}, d); }
  static Monoid finite(std::vector<std::int64_t> factors) {
    Monoid m;
    for (auto n : factors) {
      if (n < 1) throw InvalidArgument("finite factor must be >= 1");
      m.coords_.push_back({CoordKind::Mod, n});
    }
    return m;
  }
  static Monoid product(const std::vector<Monoid>& parts) {
    Monoid m;
    for (const auto& p : parts) {
      if (p.semidirect_) throw UnsupportedError("products with the semidirect family are not supported");
      m.coords_.insert(m.coords_.end(), p.coords_.begin(), p.coords_.end());
    }
    return m;
  }
  /// Z^2 x|_M Z with (a1,c1)*(a2,c2) = (a1 + M^{c1} a2, c1 + c2); M unimodular.
  static Monoid semidirect(Mat2 M = {1, 1, 0, 1}) {
    const std::int64_t det = M[0] * M[3] - M[1] * M[2];
    if (det != 1 && det != -1) throw InvalidArgument("semidirect twist must be unimodular");
    Monoid m;
    m.semidirect_ = true;
    m.twist_ = M;
    m.twist_inv_ = {det * M[3], -det * M[1], -det * M[2], det * M[0]};
    m.coords_ = {{CoordKind::Int, 0}, {CoordKind::Int, 0}, {CoordKind::Int, 0}};
    return m;
  }
  /// ({0,...,k}, min(k, x+y)). Admitted only as the codomain of a homomorphism.
  static Monoid capped(std::int64_t k) {
    if (k < 1) throw InvalidArgument("cap must be >= 1");
    Monoid m;
    m.coords_.push_back({CoordKind::Capped, k});
    return m;
  }

  /// The monoid (Z x {0}) u ({0} x N_+) with (x,n)+(y,m) = (x+y,0) if n=m=0,
  /// (0,n+m) otherwise. It is not cancellative, so construction always fails.
  static Monoid collapsing_half_plane() {
    // (1,0) + (0,1) = (0,1) = (0,0) + (0,1) but (1,0) != (0,0)
    throw InvalidArgument("monoid is not cancellative: (1,0)+(0,1) = (0,0)+(0,1)");
  }

  Monoid opposite() const {
    Monoid m = *this;
    m.opposite_ = !m.opposite_;
    return m;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<CoordSpec>& coords() const noexcept { return coords_; }
  bool is_semidirect() const noexcept { return semidirect_; }
  bool is_opposite() const noexcept { return opposite_; }
  const Mat2& twist() const noexcept { return twist_; }

  bool is_commutative() const noexcept { return !semidirect_; }
  bool is_cancellative() const noexcept {
    return std::none_of(coords_.begin(), coords_.end(),
                        [](const CoordSpec& c) { return c.kind == CoordKind::Capped; });
  }
  bool is_group() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](const CoordSpec& c) {
      return c.kind == CoordKind::Int || c.kind == CoordKind::Mod;
    });
  }
  bool is_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](const CoordSpec& c) {
      return c.kind == CoordKind::Mod || c.kind == CoordKind::Capped;
    });
  }
  /// |S| for finite monoids.
  std::int64_t order() const {
    if (!is_finite()) throw InvalidArgument("monoid is infinite");
    std::int64_t n = 1;
    for (const auto& c : coords_) n = mul_add(0, n, c.kind == CoordKind::Mod ? c.modulus : c.modulus + 1);
    return n;
  }

  MElement identity() const { return MElement(dim(), 0); }

  bool contains(const MElement& s) const {
    if (s.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      const auto& c = coords_[i];
      switch (c.kind) {
        case CoordKind::Nat:
          if (s[i] < 0) return false;
          break;
        case CoordKind::Int:
          break;
        case CoordKind::Mod:
          if (s[i] < 0 || s[i] >= c.modulus) return false;
          break;
        case CoordKind::Capped:
          if (s[i] < 0 || s[i] > c.modulus) return false;
          break;
      }
    }
    return true;
  }

  void require(const MElement& s) const {
    if (!contains(s)) throw MismatchError("element " + to_string(s) + " is not in " + describe());
  }

  MElement mul(const MElement& a, const MElement& b) const {
    return opposite_ ? raw_mul(b, a) : raw_mul(a, b);
  }

  std::optional<MElement> inverse(const MElement& a) const {
    if (semidirect_) {
      // (v,c)^{-1} = (-M^{-c} v, -c)
      Mat2 P = twist_power(-a[2]);
      return MElement{-(P[0] * a[0] + P[1] * a[1]), -(P[2] * a[0] + P[3] * a[1]), -a[2]};
    }
    MElement r(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const auto& c = coords_[i];
      switch (c.kind) {
        case CoordKind::Int:
          r[i] = -a[i];
          break;
        case CoordKind::Mod:
          r[i] = floor_mod(-a[i], c.modulus);
          break;
        default:
          if (a[i] != 0) return std::nullopt;
          r[i] = 0;
      }
    }
    return r;
  }

  /// M^c for the semidirect twist.
  Mat2 twist_power(std::int64_t c) const {
    Mat2 base = c >= 0 ? twist_ : twist_inv_;
    std::uint64_t e = static_cast<std::uint64_t>(c >= 0 ? c : -c);
    Mat2 r{1, 0, 0, 1};
    while (e) {
      if (e & 1) r = mat2_mul(r, base);
      base = mat2_mul(base, base);
      e >>= 1;
    }
    return r;
  }

  /// Standard generating elements (unit vectors; for the semidirect family
  /// (1,0,0), (0,1,0), (0,0,1)).
  std::vector<MElement> generators() const {
    std::vector<MElement> g;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (coords_[i].kind == CoordKind::Mod && coords_[i].modulus == 1) continue;
      MElement e(dim(), 0);
      e[i] = 1;
      g.push_back(std::move(e));
    }
    return g;
  }

  /// Window of side `size` used for bounded searches: [0,size) on N and Z/n
  /// coordinates (truncated to the modulus), [-size,size] on Z.
  std::vector<MElement> window(std::int64_t size) const {
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (const auto& c : coords_) {
      switch (c.kind) {
        case CoordKind::Nat:
          ranges.emplace_back(0, size - 1);
          break;
        case CoordKind::Int:
          ranges.emplace_back(-size, size);
          break;
        case CoordKind::Mod:
          ranges.emplace_back(0, c.modulus - 1);
          break;
        case CoordKind::Capped:
          ranges.emplace_back(0, c.modulus);
          break;
      }
    }
    return box(ranges);
  }

  /// All elements with coordinates in the given inclusive ranges, in
  /// lexicographic order.
  static std::vector<MElement> box(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges) {
    std::vector<MElement> out;
    for (const auto& [lo, hi] : ranges)
      if (hi < lo) return out;
    MElement cur(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) cur[i] = ranges[i].first;
    for (;;) {
      out.push_back(cur);
      std::size_t i = ranges.size();
      while (i > 0) {
        --i;
        if (cur[i] < ranges[i].second) {
          ++cur[i];
          for (std::size_t j = i + 1; j < ranges.size(); ++j) cur[j] = ranges[j].first;
          goto next;
        }
      }
      return out;
    next:;
    }
  }

  std::string describe() const {
    if (semidirect_) {
      std::string s = "Z^2 x| Z [" + std::to_string(twist_[0]) + "," + std::to_string(twist_[1]) + ";" +
                      std::to_string(twist_[2]) + "," + std::to_string(twist_[3]) + "]";
      return opposite_ ? s + "^op" : s;
    }
    if (coords_.empty()) return "{1}";
    std::string s;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += " x ";
      switch (coords_[i].kind) {
        case CoordKind::Nat:
          s += "N";
          break;
        case CoordKind::Int:
          s += "Z";
          break;
        case CoordKind::Mod:
          s += "Z/" + std::to_string(coords_[i].modulus);
          break;
        case CoordKind::Capped:
          s += "min(" + std::to_string(coords_[i].modulus) + ",+)";
          break;
      }
    }
    return opposite_ ? "(" + s + ")^op" : s;
  }

  bool operator==(const Monoid& o) const {
    return coords_ == o.coords_ && semidirect_ == o.semidirect_ && opposite_ == o.opposite_ &&
           (!semidirect_ || twist_ == o.twist_);
  }

 private:
  static Monoid uniform(CoordSpec c, std::size_t d) {
    Monoid m;
    m.coords_.assign(d, c);
    return m;
  }

  MElement raw_mul(const MElement& a, const MElement& b) const {
    if (semidirect_) {
      Mat2 P = twist_power(a[2]);
      return MElement{checked_narrow(static_cast<__int128>(a[0]) + static_cast<__int128>(P[0]) * b[0] +
                                     static_cast<__int128>(P[1]) * b[1]),
                      checked_narrow(static_cast<__int128>(a[1]) + static_cast<__int128>(P[2]) * b[0] +
                                     static_cast<__int128>(P[3]) * b[1]),
                      mul_add(a[2], 1, b[2])};
    }
    MElement r(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const auto& c = coords_[i];
      std::int64_t v = mul_add(a[i], 1, b[i]);
      if (c.kind == CoordKind::Mod) v = floor_mod(v, c.modulus);
      if (c.kind == CoordKind::Capped) v = std::min(v, c.modulus);
      r[i] = v;
    }
    return r;
  }

  std::vector<CoordSpec> coords_;
  bool semidirect_ = false;
  bool opposite_ = false;
  Mat2 twist_{1, 0, 0, 1};
  Mat2 twist_inv_{1, 0, 0, 1};
};

// ---------------------------------------------------------------------------
// Finite subsets
// ---------------------------------------------------------------------------

/// Finite subset of a monoid, stored sorted and deduplicated.
class MSubset {
 public:
  MSubset() = default;
  explicit MSubset(std::vector<MElement> elems) : elems_(std::move(elems)) { normalize(); }
  MSubset(std::initializer_list<MElement> elems) : elems_(elems) { normalize(); }

  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  const std::vector<MElement>& elements() const noexcept { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  bool contains(const MElement& s) const { return std::binary_search(elems_.begin(), elems_.end(), s); }
  bool operator==(const MSubset&) const = default;

 private:
  void normalize() {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }
  std::vector<MElement> elems_;
};

inline bool contains_identity(const Monoid& S, const MSubset& F) { return F.contains(S.identity()); }

inline MSubset set_product(const Monoid& S, const MSubset& F, const MSubset& E) {
  for (const auto& f : F) S.require(f);
  for (const auto& e : E) S.require(e);
  std::vector<MElement> out;
  out.reserve(F.size() * E.size());
  for (const auto& f : F)
    for (const auto& e : E) out.push_back(S.mul(f, e));
  return MSubset(std::move(out));
}

inline MSubset right_translate(const Monoid& S, const MSubset& F, const MElement& s) {
  std::vector<MElement> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(S.mul(f, s));
  return MSubset(std::move(out));
}

inline MSubset left_translate(const Monoid& S, const MElement& s, const MSubset& F) {
  std::vector<MElement> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(S.mul(s, f));
  return MSubset(std::move(out));
}

inline std::size_t sym_diff_size(const MSubset& a, const MSubset& b) {
  std::size_t common = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return a.size() + b.size() - 2 * common;
}

inline std::size_t difference_size(const MSubset& a, const MSubset& b) {
  std::size_t n = 0;
  for (const auto& x : a)
    if (!b.contains(x)) ++n;
  return n;
}

inline MSubset set_union(const MSubset& a, const MSubset& b) {
  std::vector<MElement> v(a.elements());
  v.insert(v.end(), b.begin(), b.end());
  return MSubset(std::move(v));
}

/// |Fs symmetric-difference F| / |F| as an exact rational.
inline Rational sym_diff_ratio_exact(const Monoid& S, const MSubset& F, const MElement& s) {
  if (F.empty()) throw InvalidArgument("defect of the empty set");
  return Rational(static_cast<std::int64_t>(sym_diff_size(right_translate(S, F, s), F)),
                  static_cast<std::int64_t>(F.size()));
}

inline double sym_diff_ratio(const Monoid& S, const MSubset& F, const MElement& s) {
  return to_double(sym_diff_ratio_exact(S, F, s));
}

/// F ~_eps F': |F| = |F'| and |F sym F'| <= eps |F|.
inline bool eps_equiv(const MSubset& F, const MSubset& G, const Rational& eps) {
  if (F.size() != G.size()) return false;
  return Rational(static_cast<std::int64_t>(sym_diff_size(F, G))) <= eps * static_cast<std::int64_t>(F.size());
}

/// d_E(D) = {s in D : sE not contained in D}.
inline MSubset boundary(const Monoid& S, const MSubset& D, const MSubset& E) {
  std::vector<MElement> out;
  for (const auto& s : D)
    for (const auto& e : E)
      if (!D.contains(S.mul(s, e))) {
        out.push_back(s);
        break;
      }
  return MSubset(std::move(out));
}

// ---------------------------------------------------------------------------
// Homomorphisms, kernels and sections
// ---------------------------------------------------------------------------

/// Surjective homomorphism between supported families. Commutative sources
/// use coordinate selection: target coordinate t is the image of source
/// coordinate select[t]; source coordinates not selected are dropped. The
/// semidirect family supports the projection (v,c) -> c onto Z.
class MonoidHom {
 public:
  static MonoidHom coordinate_map(Monoid source, Monoid target, std::vector<std::size_t> select) {
    if (source.is_semidirect() || target.is_semidirect())
      throw UnsupportedError("coordinate maps need commutative families");
    if (select.size() != target.dim()) throw InvalidArgument("one source coordinate per target coordinate");
    std::vector<char> used(source.dim(), 0);
    for (std::size_t t = 0; t < select.size(); ++t) {
      const std::size_t j = select[t];
      if (j >= source.dim() || used[j]) throw InvalidArgument("source coordinates must be distinct");
      used[j] = 1;
      const auto& sc = source.coords()[j];
      const auto& tc = target.coords()[t];
      bool ok = false;
      switch (tc.kind) {
        case CoordKind::Nat:
          ok = sc.kind == CoordKind::Nat;
          break;
        case CoordKind::Int:
          ok = sc.kind == CoordKind::Int;
          break;
        case CoordKind::Mod:
          ok = sc.kind == CoordKind::Nat || sc.kind == CoordKind::Int ||
               (sc.kind == CoordKind::Mod && sc.modulus % tc.modulus == 0);
          break;
        case CoordKind::Capped:
          ok = sc.kind == CoordKind::Nat;
          break;
      }
      if (!ok) throw InvalidArgument("no surjective coordinate map " + source.describe() + " -> " + target.describe());
    }
    if (!source.is_cancellative()) throw InvalidArgument("source monoid must be cancellative");
    MonoidHom h;
    h.source_ = std::move(source);
    h.target_ = std::move(target);
    h.select_ = std::move(select);
    return h;
  }

  /// The product projection onto the listed coordinates (identity on each).
  static MonoidHom projection(const Monoid& source, std::vector<std::size_t> keep) {
    std::vector<CoordSpec> tc;
    for (auto j : keep) tc.push_back(source.coords().at(j));
    Monoid target;
    std::vector<Monoid> parts;
    for (const auto& c : tc) {
      switch (c.kind) {
        case CoordKind::Nat:
          parts.push_back(Monoid::naturals(1));
          break;
        case CoordKind::Int:
          parts.push_back(Monoid::integers(1));
          break;
        case CoordKind::Mod:
          parts.push_back(Monoid::finite({c.modulus}));
          break;
        case CoordKind::Capped:
          throw InvalidArgument("capped coordinates cannot be projected");
      }
    }
    target = Monoid::product(parts);
    return coordinate_map(source, target, std::move(keep));
  }

  static MonoidHom semidirect_projection(const Monoid& source) {
    if (!source.is_semidirect()) throw InvalidArgument("source is not a semidirect product");
    MonoidHom h;
    h.source_ = source;
    h.target_ = Monoid::integers(1);
    h.semidirect_ = true;
    return h;
  }

  static MonoidHom identity(const Monoid& S) {
    std::vector<std::size_t> sel(S.dim());
    for (std::size_t i = 0; i < sel.size(); ++i) sel[i] = i;
    if (S.is_semidirect()) throw UnsupportedError("identity on the semidirect family is not a coordinate map");
    return coordinate_map(S, S, sel);
  }

  const Monoid& source() const noexcept { return source_; }
  const Monoid& target() const noexcept { return target_; }
  bool is_semidirect_projection() const noexcept { return semidirect_; }
  const std::vector<std::size_t>& selection() const noexcept { return select_; }

  MElement apply(const MElement& s) const {
    source_.require(s);
    if (semidirect_) return MElement{s[2]};
    MElement r(target_.dim());
    for (std::size_t t = 0; t < r.size(); ++t) {
      const auto& tc = target_.coords()[t];
      std::int64_t v = s[select_[t]];
      if (tc.kind == CoordKind::Mod) v = floor_mod(v, tc.modulus);
      if (tc.kind == CoordKind::Capped) v = std::min(v, tc.modulus);
      r[t] = v;
    }
    return r;
  }

  MSubset apply(const MSubset& F) const {
    std::vector<MElement> out;
    for (const auto& s : F) out.push_back(apply(s));
    return MSubset(std::move(out));
  }

  bool is_identity_image(const MElement& s) const { return apply(s) == target_.identity(); }

  /// The kernel N = pi^{-1}(1) as an abstract monoid together with its
  /// embedding into the source and the inverse on the image.
  struct Kernel {
    Monoid monoid;
    std::function<MElement(const MElement&)> embed;
    std::function<MElement(const MElement&)> unembed;
  };

  Kernel kernel() const {
    if (semidirect_) {
      return Kernel{Monoid::integers(2), [](const MElement& v) { return MElement{v[0], v[1], 0}; },
                    [](const MElement& s) {
                      if (s[2] != 0) throw InvalidArgument("element " + to_string(s) + " is not in the kernel");
                      return MElement{s[0], s[1]};
                    }};
    }
    // per source coordinate: scale factor into the source (0 = trivial)
    std::vector<Monoid> parts;
    std::vector<std::pair<std::size_t, std::int64_t>> slots;  // (source coord, scale)
    std::vector<std::int64_t> tgt_of(source_.dim(), -1);
    for (std::size_t t = 0; t < select_.size(); ++t) tgt_of[select_[t]] = static_cast<std::int64_t>(t);
    for (std::size_t j = 0; j < source_.dim(); ++j) {
      const auto& sc = source_.coords()[j];
      if (tgt_of[j] < 0) {
        parts.push_back(single(sc));
        slots.emplace_back(j, 1);
        continue;
      }
      const auto& tc = target_.coords()[static_cast<std::size_t>(tgt_of[j])];
      if (tc.kind == CoordKind::Mod) {
        if (sc.kind == CoordKind::Mod) {
          if (sc.modulus / tc.modulus > 1) {
            parts.push_back(Monoid::finite({sc.modulus / tc.modulus}));
            slots.emplace_back(j, tc.modulus);
          }
        } else {
          parts.push_back(single(sc));
          slots.emplace_back(j, tc.modulus);
        }
      }
      // Nat->Nat, Int->Int, Nat->Capped: trivial kernel coordinate
    }
    const std::size_t d = source_.dim();
    auto embed = [slots, d](const MElement& v) { return place_slots(slots, d, v); };
    auto unembed = [slots, d](const MElement& s) {
      MElement v(slots.size(), 0);
      for (std::size_t i = 0; i < slots.size(); ++i) v[i] = s[slots[i].first] / slots[i].second;
      if (place_slots(slots, d, v) != s) throw InvalidArgument("element " + to_string(s) + " is not in the kernel");
      return v;
    };
    return Kernel{Monoid::product(parts), embed, unembed};
  }

 private:
  static MElement place_slots(const std::vector<std::pair<std::size_t, std::int64_t>>& slots, std::size_t d,
                              const MElement& v) {
    MElement s(d, 0);
    for (std::size_t i = 0; i < slots.size(); ++i) s[slots[i].first] = v[i] * slots[i].second;
    return s;
  }

  static Monoid single(const CoordSpec& c) {
    switch (c.kind) {
      case CoordKind::Nat:
        return Monoid::naturals(1);
      case CoordKind::Int:
        return Monoid::integers(1);
      default:
        return Monoid::finite({c.modulus});
    }
  }

  Monoid source_, target_;
  std::vector<std::size_t> select_;
  bool semidirect_ = false;
};

/// A section sigma: C -> S of a surjective homomorphism.
struct Section {
  MonoidHom hom;
  std::function<MElement(const MElement&)> map;
  std::string name;

  MElement operator()(const MElement& c) const { return map(c); }
};

/// Fiber pi^{-1}(c) inside the canonical window of `bound` (exact when the
/// fiber is finite along every coordinate).
inline MSubset fiber(const MonoidHom& pi, const MElement& c, std::int64_t bound) {
  if (bound < 1) throw InvalidArgument("fiber window must be >= 1");
  pi.target().require(c);
  const Monoid& S = pi.source();
  if (pi.is_semidirect_projection()) {
    std::vector<MElement> out;
    for (std::int64_t a = -bound; a <= bound; ++a)
      for (std::int64_t b = -bound; b <= bound; ++b) out.push_back({a, b, c[0]});
    return MSubset(std::move(out));
  }
  std::vector<std::vector<std::int64_t>> choices(S.dim());
  std::vector<std::int64_t> tgt_of(S.dim(), -1);
  for (std::size_t t = 0; t < pi.selection().size(); ++t) tgt_of[pi.selection()[t]] = static_cast<std::int64_t>(t);
  for (std::size_t j = 0; j < S.dim(); ++j) {
    const auto& sc = S.coords()[j];
    std::int64_t lo = 0, hi = 0;
    switch (sc.kind) {
      case CoordKind::Nat:
        lo = 0;
        hi = bound - 1;
        break;
      case CoordKind::Int:
        lo = -bound;
        hi = bound;
        break;
      default:
        lo = 0;
        hi = sc.modulus - 1;
    }
    if (tgt_of[j] < 0) {
      for (std::int64_t v = lo; v <= hi; ++v) choices[j].push_back(v);
      continue;
    }
    const auto& tc = pi.target().coords()[static_cast<std::size_t>(tgt_of[j])];
    const std::int64_t cv = c[static_cast<std::size_t>(tgt_of[j])];
    switch (tc.kind) {
      case CoordKind::Nat:
      case CoordKind::Int:
        choices[j].push_back(cv);
        break;
      case CoordKind::Mod:
        for (std::int64_t v = lo; v <= hi; ++v)
          if (floor_mod(v, tc.modulus) == cv) choices[j].push_back(v);
        break;
      case CoordKind::Capped:
        if (cv < tc.modulus)
          choices[j].push_back(cv);
        else
          for (std::int64_t v = std::max(lo, cv); v <= hi; ++v) choices[j].push_back(v);
        break;
    }
  }
  std::vector<MElement> out{MElement{}};
  for (std::size_t j = 0; j < S.dim(); ++j) {
    std::vector<MElement> next;
    for (const auto& p : out)
      for (auto v : choices[j]) {
        MElement q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return MSubset(std::move(out));
}

namespace detail {

/// Symbolic decision of N s = [s] = s N.
inline bool good_symbolic(const MonoidHom& pi, const MElement& s) {
  if (pi.is_semidirect_projection()) return true;  // group onto group
  const Monoid& S = pi.source();
  std::vector<std::int64_t> tgt_of(S.dim(), -1);
  for (std::size_t t = 0; t < pi.selection().size(); ++t) tgt_of[pi.selection()[t]] = static_cast<std::int64_t>(t);
  for (std::size_t j = 0; j < S.dim(); ++j) {
    const auto& sc = S.coords()[j];
    if (sc.kind != CoordKind::Nat) continue;  // group coordinates never obstruct
    if (tgt_of[j] < 0) {
      if (s[j] != 0) return false;  // N_j = N, fiber = N, N + s_j = N iff s_j = 0
      continue;
    }
    const auto& tc = pi.target().coords()[static_cast<std::size_t>(tgt_of[j])];
    if (tc.kind == CoordKind::Mod && s[j] >= tc.modulus) return false;
    if (tc.kind == CoordKind::Capped && s[j] >= tc.modulus) return false;
  }
  return true;
}

/// Searches the window for x in [s] with x not in N s (or not in s N).
inline std::optional<MElement> good_falsifier(const MonoidHom& pi, const MElement& s, std::int64_t window) {
  const Monoid& S = pi.source();
  const MElement c = pi.apply(s);
  for (const auto& x : S.window(window)) {
    if (pi.apply(x) != c) continue;
    if (S.is_group()) {
      // in a group x = n s with n = x s^{-1}; n is in N because pi(n) = 1
      continue;
    }
    // commutative: n = x - s coordinatewise must lie in S and in N
    MElement n(S.dim());
    bool ok = true;
    for (std::size_t j = 0; j < S.dim(); ++j) {
      const auto& sc = S.coords()[j];
      n[j] = x[j] - s[j];
      if (sc.kind == CoordKind::Mod) n[j] = floor_mod(n[j], sc.modulus);
      if (sc.kind == CoordKind::Nat && n[j] < 0) ok = false;
    }
    if (!ok || !pi.is_identity_image(n)) return x;
  }
  return std::nullopt;
}

}  // namespace detail

inline constexpr std::int64_t kGoodnessWindow = 1000;

/// Decides N s = pi^{-1}(pi(s)) = s N. The symbolic rule is backed by a
/// bounded-window search that must agree with it.
inline bool is_good_element(const MonoidHom& pi, const MElement& s) {
  pi.source().require(s);
  const bool symbolic = detail::good_symbolic(pi, s);
  if (symbolic) {
    const std::int64_t w = pi.source().dim() <= 1 ? kGoodnessWindow : 12;
    if (auto x = detail::good_falsifier(pi, s, w))
      throw std::logic_error("goodness rule contradicted by " + to_string(*x));
  }
  return symbolic;
}

/// Canonical section: minimal representatives on selected coordinates and
/// the identity elsewhere; for the semidirect projection c -> (0,0,c).
inline Section canonical_section(const MonoidHom& pi) {
  if (pi.is_semidirect_projection())
    return Section{pi, [](const MElement& c) { return MElement{0, 0, c[0]}; }, "c -> (0,0,c)"};
  const std::size_t d = pi.source().dim();
  auto sel = pi.selection();
  auto src = pi.source();
  return Section{pi,
                 [sel, d, src](const MElement& c) {
                   MElement s(d, 0);
                   for (std::size_t t = 0; t < sel.size(); ++t) {
                     std::int64_t v = c[t];
                     const auto& sc = src.coords()[sel[t]];
                     if (sc.kind == CoordKind::Mod) v = floor_mod(v, sc.modulus);
                     s[sel[t]] = v;
                   }
                   return s;
                 },
                 "minimal representatives"};
}

/// A good section with sigma(1) = 1 when one exists.
inline std::optional<Section> find_good_section(const MonoidHom& pi) {
  Section sigma = canonical_section(pi);
  const Monoid& C = pi.target();
  std::vector<MElement> probe = C.is_finite() ? C.window(1) : C.window(8);
  for (const auto& c : probe) {
    const MElement s = sigma(c);
    if (pi.apply(s) != c) throw std::logic_error("canonical section is not a section");
    if (!is_good_element(pi, s)) return std::nullopt;
  }
  // On N coordinates goodness forces the minimal representative, and on group
  // coordinates every representative is good, so the canonical section is
  // the only candidate that needs checking.
  return sigma;
}

/// Checks sigma(c) is good on the window of C used by the callers.
inline void require_good(const Section& sigma, std::int64_t window = 8) {
  const Monoid& C = sigma.hom.target();
  for (const auto& c : C.window(window))
    if (!is_good_element(sigma.hom, sigma(c)))
      throw NotGoodSection("section value " + to_string(sigma(c)) + " at " + to_string(c) + " is not good");
}

/// The unique h with n s = s h, for s good and n in N (given in S).
inline MElement fiber_conjugation(const MonoidHom& pi, const MElement& s, const MElement& n) {
  if (!is_good_element(pi, s)) throw NotGoodSection("element " + to_string(s) + " is not semi-good");
  if (!pi.is_identity_image(n)) throw InvalidArgument("element " + to_string(n) + " is not in the kernel");
  const Monoid& S = pi.source();
  if (S.is_commutative()) return n;
  const MElement si = *S.inverse(s);
  return S.mul(S.mul(si, n), s);
}

}  // namespace amenact
