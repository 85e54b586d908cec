// Right Folner nets: boxes, canonically indexed boxes, translates, products,
// split extensions, and defect diagnostics.
#pragma once

#include "amenact/monoid.hpp"
#include "amenact/parallel.hpp"
#include "amenact/report.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace amenact {

/// A net indexed by the positive integers, generated on demand and memoized.
class FolnerNet {
 public:
  using Generator = std::function<MSubset(std::size_t)>;

  FolnerNet() = default;
  FolnerNet(Monoid S, std::string name, Generator gen) : impl_(std::make_shared<Impl>()) {
    impl_->monoid = std::move(S);
    impl_->name = std::move(name);
    impl_->gen = std::move(gen);
  }

  const Monoid& monoid() const { return impl_->monoid; }
  const std::string& name() const { return impl_->name; }

  /// F_i for i >= 1.
  MSubset at(std::size_t i) const {
    if (i == 0) throw InvalidArgument("net indices start at 1");
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->memo.find(i);
      if (it != impl_->memo.end()) return it->second;
    }
    MSubset F = impl_->gen(i);
    if (F.empty()) throw std::logic_error("net " + impl_->name + " produced an empty set at index " + std::to_string(i));
    for (const auto& s : F) impl_->monoid.require(s);
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->memo.emplace(i, std::move(F)).first->second;
  }

  /// The same sets regarded inside a larger monoid with the same coordinates.
  FolnerNet in(const Monoid& G) const {
    if (G.dim() != monoid().dim() || G.is_semidirect() != monoid().is_semidirect())
      throw MismatchError("cannot regard a net of " + monoid().describe() + " inside " + G.describe());
    FolnerNet self = *this;
    return FolnerNet(G, name() + " in " + G.describe(), [self](std::size_t i) { return self.at(i); });
  }

 private:
  struct Impl {
    Monoid monoid;
    std::string name;
    Generator gen;
    std::mutex mu;
    std::map<std::size_t, MSubset> memo;
  };
  std::shared_ptr<Impl> impl_;
};

namespace detail {

inline void require_box_family(const Monoid& S) {
  if (S.is_semidirect()) throw UnsupportedError("box nets are not defined for the semidirect family");
  if (!S.is_cancellative()) throw UnsupportedError("box nets need a cancellative monoid");
}

/// [0,m) on N and Z coordinates, the whole factor on Z/n coordinates.
inline MSubset corner_box(const Monoid& S, std::int64_t m) {
  std::vector<std::pair<std::int64_t, std::int64_t>> r;
  for (const auto& c : S.coords()) {
    if (c.kind == CoordKind::Mod)
      r.emplace_back(0, c.modulus - 1);
    else
      r.emplace_back(0, m - 1);
  }
  return MSubset(Monoid::box(r));
}

}  // namespace detail

/// [0,n)^d on N^d, [-n,n]^d on Z^d, the whole group on finite factors, and
/// the coordinatewise product for mixed families.
inline FolnerNet box_net(const Monoid& S) {
  detail::require_box_family(S);
  return FolnerNet(S, "boxes", [S](std::size_t i) {
    const auto n = static_cast<std::int64_t>(i);
    std::vector<std::pair<std::int64_t, std::int64_t>> r;
    for (const auto& c : S.coords()) {
      switch (c.kind) {
        case CoordKind::Nat:
          r.emplace_back(0, n - 1);
          break;
        case CoordKind::Int:
          r.emplace_back(-n, n);
          break;
        default:
          r.emplace_back(0, c.modulus - 1);
      }
    }
    return MSubset(Monoid::box(r));
  });
}

// ---------------------------------------------------------------------------
// Defects
// ---------------------------------------------------------------------------

struct DefectRow {
  std::size_t index = 0;
  std::size_t size = 0;
  std::string element;  // "E" for the whole test set
  Rational ratio;
};

struct DefectReport {
  std::vector<DefectRow> rows;
  std::vector<Rational> max_defect;  // per index, over single elements
  bool tail_nonincreasing = true;    // max defect over the last quartile

  Rational tail() const { return max_defect.empty() ? Rational(0) : max_defect.back(); }

  CsvTable csv() const {
    CsvTable t({"index", "|F|", "element", "ratio"});
    for (const auto& r : rows)
      t.add_row({std::to_string(r.index), std::to_string(r.size), r.element, format_real(to_double(r.ratio))});
    return t;
  }
};

inline Rational defect_ratio(const Monoid& S, const MSubset& F, const MElement& s) {
  return sym_diff_ratio_exact(S, F, s);
}

/// |F E sym-diff F| / |F|.
inline Rational set_defect_ratio(const Monoid& S, const MSubset& F, const MSubset& E) {
  const MSubset FE = set_product(S, F, E);
  return Rational(static_cast<std::int64_t>(sym_diff_size(FE, F)), static_cast<std::int64_t>(F.size()));
}

inline DefectReport verify_folner(const FolnerNet& net, const MSubset& test, std::size_t prefix) {
  if (prefix < 2) throw InvalidArgument("prefix must be >= 2");
  const Monoid& S = net.monoid();
  for (const auto& s : test) S.require(s);
  std::vector<std::vector<DefectRow>> per(prefix);
  std::vector<Rational> maxd(prefix, Rational(0));
  parallel_for(prefix, [&](std::size_t k) {
    const std::size_t i = k + 1;
    const MSubset F = net.at(i);
    for (const auto& s : test) {
      Rational r = defect_ratio(S, F, s);
      maxd[k] = std::max(maxd[k], r);
      per[k].push_back({i, F.size(), to_string(s), r});
    }
    if (!test.empty()) per[k].push_back({i, F.size(), "E", set_defect_ratio(S, F, test)});
  });
  DefectReport rep;
  for (auto& v : per)
    for (auto& r : v) rep.rows.push_back(std::move(r));
  rep.max_defect = maxd;
  const std::size_t start = prefix - std::max<std::size_t>(2, (prefix + 3) / 4);
  for (std::size_t k = start + 1; k < prefix; ++k)
    if (maxd[k] > maxd[k - 1]) rep.tail_nonincreasing = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Canonically indexed nets
// ---------------------------------------------------------------------------

/// F_{(E,n)}: the smallest box [0,m)^k (whole factor on finite coordinates)
/// with F s ~_{1/n} F for every s in E. Boxes are searched in increasing m.
class CanonicalNet {
 public:
  explicit CanonicalNet(Monoid S, std::size_t budget = kDefaultSearchBudget) : impl_(std::make_shared<Impl>()) {
    detail::require_box_family(S);
    impl_->monoid = std::move(S);
    impl_->budget = budget;
  }

  const Monoid& monoid() const { return impl_->monoid; }

  /// The box side m for index (E, n).
  std::int64_t side(const MSubset& E, std::size_t n) const {
    if (n == 0) throw InvalidArgument("canonical precision must be >= 1");
    const Monoid& S = impl_->monoid;
    for (const auto& s : E) S.require(s);
    const auto key = std::make_pair(E.elements(), n);
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->sides.find(key);
      if (it != impl_->sides.end()) return it->second;
    }
    BigCount finite_part = 1;
    std::size_t infinite = 0;
    for (const auto& c : S.coords()) {
      if (c.kind == CoordKind::Mod)
        finite_part *= c.modulus;
      else
        ++infinite;
    }
    std::int64_t found = -1;
    for (std::int64_t m = 1; m <= static_cast<std::int64_t>(impl_->budget); ++m) {
      const BigCount size = pow_count(m, infinite) * finite_part;
      bool ok = true;
      for (const auto& s : E) {
        // |F cap F s| for a box F and a translate s: product of overlaps
        BigCount overlap = finite_part;
        for (std::size_t j = 0; j < S.dim(); ++j) {
          if (S.coords()[j].kind == CoordKind::Mod) continue;
          const std::int64_t shift = s[j] < 0 ? -s[j] : s[j];
          overlap *= std::max<std::int64_t>(0, m - shift);
        }
        if (2 * (size - overlap) * n > size) {
          ok = false;
          break;
        }
      }
      if (ok) {
        found = m;
        break;
      }
    }
    if (found < 0)
      throw BudgetExceeded("no box of side <= " + std::to_string(impl_->budget) + " satisfies precision " +
                           std::to_string(n));
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->sides.emplace(key, found);
    return found;
  }

  MSubset at(const MSubset& E, std::size_t n) const { return detail::corner_box(impl_->monoid, side(E, n)); }

  /// Linearization along a fixed E: index i maps to (E u {1}, i).
  FolnerNet linear(const MSubset& E) const {
    std::vector<MElement> e = E.elements();
    e.push_back(impl_->monoid.identity());
    const MSubset Ep(std::move(e));
    CanonicalNet self = *this;
    return FolnerNet(impl_->monoid, "canonical boxes", [self, Ep](std::size_t i) { return self.at(Ep, i); });
  }

  /// Linearization along E = {1} u generators.
  FolnerNet linear() const { return linear(MSubset(impl_->monoid.generators())); }

 private:
  struct Impl {
    Monoid monoid;
    std::size_t budget = kDefaultSearchBudget;
    std::mutex mu;
    std::map<std::pair<std::vector<MElement>, std::size_t>, std::int64_t> sides;
  };
  std::shared_ptr<Impl> impl_;
};

inline CanonicalNet canonical_net(const Monoid& S, std::size_t budget = kDefaultSearchBudget) {
  return CanonicalNet(S, budget);
}

inline FolnerNet translate_net(const FolnerNet& net, const MSubset& E) {
  if (E.empty()) throw InvalidArgument("translating set must be nonempty");
  const Monoid S = net.monoid();
  for (const auto& s : E) S.require(s);
  return FolnerNet(S, net.name() + " * E", [net, E, S](std::size_t i) { return set_product(S, net.at(i), E); });
}

// ---------------------------------------------------------------------------
// Doubly indexed nets
// ---------------------------------------------------------------------------

/// A net indexed by pairs (i, j) of positive integers with the product order.
/// `diagonal()` is the cofinal subnet i = j.
class DoubleNet {
 public:
  using Generator = std::function<MSubset(std::size_t, std::size_t)>;

  DoubleNet(Monoid S, std::string name, Generator gen) : S_(std::move(S)), name_(std::move(name)), gen_(std::move(gen)) {}

  const Monoid& monoid() const { return S_; }
  const std::string& name() const { return name_; }
  MSubset at(std::size_t i, std::size_t j) const { return gen_(i, j); }

  FolnerNet diagonal() const {
    auto gen = gen_;
    return FolnerNet(S_, name_ + " (diagonal)", [gen](std::size_t k) { return gen(k, k); });
  }

  /// Pairs with max(i, j) = k, first index descending to the diagonal; with
  /// `upper_only` only pairs with i >= j.
  static std::vector<std::pair<std::size_t, std::size_t>> layer(std::size_t k, bool upper_only = false) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 1; j <= k; ++j) out.emplace_back(k, j);
    if (!upper_only)
      for (std::size_t i = 1; i < k; ++i) out.emplace_back(i, k);
    return out;
  }

 private:
  Monoid S_;
  std::string name_;
  Generator gen_;
};

/// (H_i x K_j) on H x K.
inline DoubleNet product_net(const FolnerNet& H, const FolnerNet& K) {
  const Monoid S = Monoid::product({H.monoid(), K.monoid()});
  return DoubleNet(S, H.name() + " x " + K.name(), [H, K](std::size_t i, std::size_t j) {
    const MSubset A = H.at(i), B = K.at(j);
    std::vector<MElement> out;
    out.reserve(A.size() * B.size());
    for (const auto& a : A)
      for (const auto& b : B) {
        MElement s = a;
        s.insert(s.end(), b.begin(), b.end());
        out.push_back(std::move(s));
      }
    return MSubset(std::move(out));
  });
}

// ---------------------------------------------------------------------------
// Split extensions
// ---------------------------------------------------------------------------

/// The net F = N_{(zeta u X, m)} sigma(C_{(Y, n)}) on S for a good section
/// sigma of pi: S -> C with kernel N. zeta collects the corrections
/// z_{c,x} with sigma(c) x = z sigma(c) and z_{c,y} with
/// sigma(c) sigma(y) = z sigma(cy), for c in C_{(Y,n)}, x in X, y in Y.
class SplitExtensionNet {
 public:
  struct Piece {
    MSubset set;     // in S
    MSubset n_part;  // in N
    MSubset c_part;  // in C
    MSubset zeta;    // in N
  };

  explicit SplitExtensionNet(Section sigma, std::size_t budget = kDefaultSearchBudget)
      : sigma_(std::move(sigma)),
        kernel_(sigma_.hom.kernel()),
        N_(kernel_.monoid, budget),
        C_(sigma_.hom.target(), budget) {
    require_good(sigma_);
  }

  const Monoid& monoid() const { return sigma_.hom.source(); }
  const Monoid& kernel_monoid() const { return kernel_.monoid; }
  const MonoidHom::Kernel& kernel() const { return kernel_; }
  const Section& section() const { return sigma_; }

  Piece at(const MSubset& X, std::size_t m, const MSubset& Y, std::size_t n) const {
    if (m < n) throw InvalidArgument("split extension indices need m >= n");
    const Monoid& S = monoid();
    const Monoid& C = sigma_.hom.target();
    for (const auto& y : Y) C.require(y);
    for (const auto& x : X) kernel_.monoid.require(x);
    const MSubset Cbar = C_.at(Y, n);
    std::vector<MElement> zeta;
    for (const auto& c : Cbar) {
      const MElement sc = sigma_(c);
      for (const auto& x : X) zeta.push_back(kernel_.unembed(conjugate(sc, kernel_.embed(x))));
      for (const auto& y : Y) zeta.push_back(kernel_.unembed(cocycle(c, y)));
    }
    std::vector<MElement> zx = zeta;
    zx.insert(zx.end(), X.begin(), X.end());
    const MSubset Nbar = N_.at(MSubset(std::move(zx)), m);
    std::vector<MElement> out;
    out.reserve(Nbar.size() * Cbar.size());
    for (const auto& a : Nbar) {
      const MElement ea = kernel_.embed(a);
      for (const auto& c : Cbar) out.push_back(S.mul(ea, sigma_(c)));
    }
    MSubset F(std::move(out));
    if (F.size() != Nbar.size() * Cbar.size())
      throw std::logic_error("split extension product is not injective");
    return Piece{std::move(F), Nbar, Cbar, MSubset(std::move(zeta))};
  }

  /// Diagonal linearization: X = {1} u gens(N), Y = {1} u gens(C), m = n = k.
  FolnerNet diagonal() const {
    std::vector<MElement> xs = kernel_.monoid.generators(), ys = sigma_.hom.target().generators();
    xs.push_back(kernel_.monoid.identity());
    ys.push_back(sigma_.hom.target().identity());
    const MSubset X(std::move(xs)), Y(std::move(ys));
    SplitExtensionNet self = *this;
    return FolnerNet(monoid(), "split extension (diagonal)",
                     [self, X, Y](std::size_t k) { return self.at(X, k, Y, k).set; });
  }

 private:
  /// z with s x = z s.
  MElement conjugate(const MElement& s, const MElement& x) const {
    const Monoid& S = monoid();
    if (S.is_commutative()) return x;
    return S.mul(S.mul(s, x), *S.inverse(s));
  }

  /// z with sigma(c) sigma(y) = z sigma(c y).
  MElement cocycle(const MElement& c, const MElement& y) const {
    const Monoid& S = monoid();
    const MElement lhs = S.mul(sigma_(c), sigma_(y));
    const MElement scy = sigma_(sigma_.hom.target().mul(c, y));
    MElement z;
    if (S.is_commutative()) {
      z.resize(S.dim());
      for (std::size_t j = 0; j < S.dim(); ++j) {
        z[j] = lhs[j] - scy[j];
        if (S.coords()[j].kind == CoordKind::Mod) z[j] = floor_mod(z[j], S.coords()[j].modulus);
      }
      if (!S.contains(z) || S.mul(z, scy) != lhs)
        throw NotGoodSection("no kernel element z with sigma(c) sigma(y) = z sigma(cy) at c=" + to_string(c) +
                             ", y=" + to_string(y));
    } else {
      z = S.mul(lhs, *S.inverse(scy));
    }
    if (!sigma_.hom.is_identity_image(z)) throw std::logic_error("correction element is not in the kernel");
    return z;
  }

  Section sigma_;
  MonoidHom::Kernel kernel_;
  CanonicalNet N_, C_;
};

inline SplitExtensionNet split_extension_net(const Section& sigma, std::size_t budget = kDefaultSearchBudget) {
  return SplitExtensionNet(sigma, budget);
}

// ---------------------------------------------------------------------------
// The semidirect product Z^2 x| Z
// ---------------------------------------------------------------------------

struct SemidirectDefect {
  std::int64_t outside = 0;  // |G x \ G|
  std::int64_t size = 0;     // |G|
  Rational value() const { return Rational(outside, size); }
};

/// delta_{n,m}(x) = |G x \ G| / |G| for G = [0,m)^2 x [0,n) in Z^2 x| Z with
/// the twist (v1, v2) -> (v1 + v2, v2), by enumeration of G x.
inline SemidirectDefect semidirect_defect(std::int64_t n, std::int64_t m, const MElement& x,
                                          std::size_t budget = kDefaultElementBudget) {
  if (n < 1 || m < 1) throw InvalidArgument("box sides must be >= 1");
  const Monoid S = Monoid::semidirect();
  S.require(x);
  const __int128 size = static_cast<__int128>(m) * m * n;
  if (size > static_cast<__int128>(budget)) throw BudgetExceeded("semidirect box exceeds the element budget");
  auto inside = [&](const MElement& g) { return g[0] >= 0 && g[0] < m && g[1] >= 0 && g[1] < m && g[2] >= 0 && g[2] < n; };
  SemidirectDefect d;
  d.size = static_cast<std::int64_t>(size);
  for (std::int64_t c = 0; c < n; ++c)
    for (std::int64_t a = 0; a < m; ++a)
      for (std::int64_t b = 0; b < m; ++b)
        if (!inside(S.mul(MElement{a, b, c}, x))) ++d.outside;
  return d;
}

}  // namespace amenact
