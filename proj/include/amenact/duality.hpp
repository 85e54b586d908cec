// Pontryagin duality for finite abelian groups and windowed duals of direct
// sums: annihilators, dual endomorphisms, open subgroups given by congruence
// conditions, cotrajectories, topological entropy through subgroup indices,
// and the comparison of trajectories with cotrajectories of annihilators.
#pragma once

#include "amenact/entropy.hpp"
#include "amenact/sampling.hpp"

#include <numeric>

namespace amenact {

inline constexpr std::size_t kDefaultDualBound = 1u << 16;

namespace detail {

inline std::int64_t lcm_of(const std::vector<std::int64_t>& n) {
  std::int64_t l = 1;
  for (auto x : n) l = std::lcm(l, x);
  return l;
}

inline void require_finite_product(const AbelianGroup& A, std::size_t bound) {
  if (A.kind() != GroupKind::FiniteProduct)
    throw UnsupportedError("duality is implemented for finite products, not " + A.describe());
  if (*A.order() > BigCount(bound))
    throw BudgetExceeded("|A| = " + A.order()->str() + " exceeds the duality bound " + std::to_string(bound));
}

/// Kernel of x -> M x from Z^k/(source) to Z^m/(target) as a lattice over
/// the source moduli: the Hermite rows of <(M e_i, e_i)> with no target part.
inline Echelon kernel_lattice(const IntMatrix& M, const std::vector<std::int64_t>& source,
                              const std::vector<std::int64_t>& target) {
  const std::size_t m = target.size(), k = source.size();
  std::vector<std::int64_t> mod(target);
  mod.insert(mod.end(), source.begin(), source.end());
  Echelon big(mod);
  for (std::size_t i = 0; i < k; ++i) {
    Coords v(m + k, 0);
    for (std::size_t r = 0; r < m; ++r) v[r] = target[r] ? floor_mod(M(r, i), target[r]) : M(r, i);
    v[m + i] = 1;
    big.insert(std::move(v));
  }
  Echelon ker(source);
  for (const auto& row : big.basis())
    if (std::all_of(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(m), [](auto x) { return x == 0; }))
      ker.insert(Coords(row.begin() + static_cast<std::ptrdiff_t>(m), row.end()));
  return ker;
}

/// |M(Z^k/(source))| inside the finite group Z^m/(target).
inline BigCount image_order(const IntMatrix& M, const std::vector<std::int64_t>& target) {
  Echelon im(target);
  for (std::size_t i = 0; i < M.cols; ++i) {
    Coords c(M.rows);
    for (std::size_t r = 0; r < M.rows; ++r) c[r] = floor_mod(M(r, i), target[r]);
    im.insert(std::move(c));
  }
  return *im.subgroup_order();
}

/// Adds v (consumed) to the upper triangular basis H (row-major k x k, a
/// pivot in every column) of a lattice containing diag(n) Z^k.
inline void hermite_add(const std::vector<std::int64_t>& n, std::int64_t* H, std::int64_t* v) {
  const std::size_t k = n.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (v[j] == 0) continue;
    std::int64_t* p = H + j * k;
    const std::int64_t q = floor_div(v[j], p[j]);
    if (q != 0)
      for (std::size_t i = j; i < k; ++i) v[i] -= q * p[i];
    if (v[j] == 0) continue;
    std::int64_t x = 0, y = 0;
    const std::int64_t d = p[j], a = v[j];
    const std::int64_t g = ext_gcd(d, a, x, y);
    const std::int64_t ad = a / g, dd = d / g;
    for (std::size_t i = j; i < k; ++i) {
      const std::int64_t pi = p[i], vi = v[i];
      p[i] = x * pi + y * vi;
      v[i] = ad * pi - dd * vi;
    }
    // n_i e_i is in the lattice, so entries right of the pivot live mod n_i
    for (std::size_t i = j + 1; i < k; ++i) {
      p[i] = floor_mod(p[i], n[i]);
      v[i] = floor_mod(v[i], n[i]);
    }
  }
}

/// Reduces the entries right of each pivot modulo the pivot below them.
inline void hermite_canonicalize(std::size_t k, std::int64_t* H) {
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = r + 1; c < k; ++c) {
      if (H[r * k + c] >= 0 && H[r * k + c] < H[c * k + c]) continue;
      const std::int64_t q = floor_div(H[r * k + c], H[c * k + c]);
      if (q != 0)
        for (std::size_t i = c; i < k; ++i) H[r * k + i] -= q * H[c * k + i];
    }
}

inline std::int64_t div_exact(__int128 a, std::int64_t d) {
  if (d == 1) return checked_narrow(a);
  if (a >= std::numeric_limits<std::int64_t>::min() && a <= std::numeric_limits<std::int64_t>::max()) {
    const auto a64 = static_cast<std::int64_t>(a);
    const std::int64_t q = a64 / d;
    if (q * d != a64) throw std::logic_error("lattice does not contain the relations");
    return q;
  }
  if (a % d != 0) throw std::logic_error("lattice does not contain the relations");
  return checked_narrow(a / d);
}

/// Annihilator of L / Lambda in Z^k / Lambda, Lambda = diag(n), from a
/// triangular basis H of L (row-major k x k). Writing D = Y H, the columns of
/// Y = D H^{-1} span the annihilator; they are written as the rows of out.
/// An upper triangular H gives a lower triangular out and vice versa.
/// Off-diagonal entries of out are reduced modulo n.
inline void perp_triangular(const std::vector<std::int64_t>& n, const std::int64_t* H, bool upper,
                            std::int64_t* out) {
  const std::size_t k = n.size();
  thread_local std::vector<std::int64_t> Y;
  Y.assign(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::int64_t* y = Y.data() + i * k;
    if (upper) {
      for (std::size_t l = i; l < k; ++l) {
        __int128 acc = i == l ? n[i] : 0;
        for (std::size_t j = i; j < l; ++j) acc -= static_cast<__int128>(y[j]) * H[j * k + l];
        y[l] = div_exact(acc, H[l * k + l]);
      }
    } else {
      for (std::size_t l = i + 1; l-- > 0;) {
        __int128 acc = i == l ? n[i] : 0;
        for (std::size_t j = l + 1; j <= i; ++j) acc -= static_cast<__int128>(y[j]) * H[j * k + l];
        y[l] = div_exact(acc, H[l * k + l]);
      }
    }
  }
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t y = Y[i * k + l];
      out[l * k + i] = i == l || (y >= 0 && y < n[i]) ? y : floor_mod(y, n[i]);
    }
}

/// Canonical upper triangular basis of the annihilator of the lattice with
/// upper triangular basis H.
inline void perp_hermite(const std::vector<std::int64_t>& n, const std::int64_t* H, std::int64_t* out) {
  const std::size_t k = n.size();
  thread_local std::vector<std::int64_t> lower;
  lower.assign(k * k, 0);
  perp_triangular(n, H, true, lower.data());
  std::fill(out, out + k * k, 0);
  for (std::size_t j = 0; j < k; ++j) out[j * k + j] = n[j];
  for (std::size_t l = 0; l < k; ++l) hermite_add(n, out, lower.data() + l * k);
  hermite_canonicalize(k, out);
}

inline Echelon perp_lattice(const Echelon& L) {
  const std::size_t k = L.dim();
  std::vector<std::int64_t> H(k * k, 0), P(k * k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    if (!L.has_pivot(j)) throw std::logic_error("lattice of a finite group misses a pivot");
    std::copy(L.pivot_row(j), L.pivot_row(j) + k, H.begin() + static_cast<std::ptrdiff_t>(j * k));
  }
  perp_hermite(L.moduli(), H.data(), P.data());
  Echelon out(L.moduli());
  for (std::size_t j = 0; j < k; ++j) {
    const auto row = P.begin() + static_cast<std::ptrdiff_t>(j * k);
    out.insert(Coords(row, row + static_cast<std::ptrdiff_t>(k)));
  }
  return out;
}

inline IntMatrix dual_matrix(const IntMatrix& M, const std::vector<std::int64_t>& n) {
  IntMatrix D(M.cols, M.rows);
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t j = 0; j < M.cols; ++j) D(j, i) = floor_mod(M(i, j) * n[j] / n[i], n[j]);
  return D;
}

inline Subgroup subgroup_of_lattice(const AbelianGroup& A, const Echelon& L) {
  std::vector<GroupElement> g;
  for (auto& r : L.generators()) g.push_back(A.element(std::move(r)));
  return Subgroup::generated(A, g);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Finite duals
// ---------------------------------------------------------------------------

/// <x, chi> = sum_i x_i chi_i / n_i mod 1 on prod Z/n_i; the dual has the
/// same factors.
inline Rational pairing(const AbelianGroup& A, const GroupElement& x, const GroupElement& chi) {
  detail::require_finite_product(A, std::numeric_limits<std::size_t>::max());
  A.require(x);
  A.require(chi);
  const auto& n = A.moduli();
  const std::int64_t N = detail::lcm_of(n);
  __int128 s = 0;
  for (std::size_t i = 0; i < n.size(); ++i) s += static_cast<__int128>(x.data[i]) * chi.data[i] * (N / n[i]);
  return Rational(floor_mod(static_cast<std::int64_t>(s % N), N), N);
}

inline AbelianGroup dual_group(const AbelianGroup& A, std::size_t bound = kDefaultDualBound) {
  detail::require_finite_product(A, bound);
  return AbelianGroup::finite(A.moduli());
}

/// B^perp through the Hermite basis of B.
inline Subgroup annihilator(const Subgroup& B, std::size_t bound = kDefaultDualBound) {
  const AbelianGroup& A = B.group();
  detail::require_finite_product(A, bound);
  return detail::subgroup_of_lattice(A, detail::perp_lattice(B.lattice()));
}

/// B^perp as the kernel of chi -> (<b, chi>)_b over the generators b of B.
inline Subgroup annihilator_by_congruences(const Subgroup& B, std::size_t bound = kDefaultDualBound) {
  const AbelianGroup& A = B.group();
  detail::require_finite_product(A, bound);
  const auto& n = A.moduli();
  const std::int64_t N = detail::lcm_of(n);
  const auto gens = B.generators();
  IntMatrix M(gens.size(), n.size());
  for (std::size_t r = 0; r < gens.size(); ++r)
    for (std::size_t i = 0; i < n.size(); ++i) M(r, i) = gens[r].data[i] * (N / n[i]) % N;
  return detail::subgroup_of_lattice(A, detail::kernel_lattice(M, n, std::vector<std::int64_t>(gens.size(), N)));
}

/// B^perp by testing every character.
inline Subgroup annihilator_by_enumeration(const Subgroup& B, std::size_t bound = kDefaultDualBound) {
  const AbelianGroup& A = B.group();
  detail::require_finite_product(A, bound);
  const auto gens = B.generators();
  std::vector<GroupElement> perp;
  for (const auto& chi : A.enumerate(bound)) {
    bool ok = true;
    for (const auto& b : gens)
      if (pairing(A, b, chi).numerator() != 0) {
        ok = false;
        break;
      }
    if (ok) perp.push_back(chi);
  }
  return Subgroup::generated(A, perp);
}

/// phi^(chi) = chi o phi: the pairing adjoint M^(j,i) = M(i,j) n_j / n_i.
inline Endomorphism dual_endomorphism(const Endomorphism& phi, std::size_t bound = kDefaultDualBound) {
  const AbelianGroup& A = phi.group();
  detail::require_finite_product(A, bound);
  return Endomorphism::matrix(A, detail::dual_matrix(phi.matrix(), A.moduli()));
}

/// Intersection of two subgroups of a finite product.
inline Subgroup subgroup_intersection(const Subgroup& U, const Subgroup& V) {
  const AbelianGroup& A = U.group();
  A.require_same(V.group());
  detail::require_finite_product(A, std::numeric_limits<std::size_t>::max());
  const Quotient p = quotient_group(A, U), q = quotient_group(A, V);
  const std::size_t k = A.base_dim(), a = p.group.base_dim(), b = q.group.base_dim();
  IntMatrix M(a + b, k);
  std::vector<std::int64_t> target(p.group.moduli());
  target.insert(target.end(), q.group.moduli().begin(), q.group.moduli().end());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < a; ++r) M(r, j) = p.project_base(r, j);
    for (std::size_t r = 0; r < b; ++r) M(a + r, j) = q.project_base(r, j);
  }
  return detail::subgroup_of_lattice(A, detail::kernel_lattice(M, A.moduli(), target));
}

// ---------------------------------------------------------------------------
// Subgroup lattices and small groups
// ---------------------------------------------------------------------------

/// Calls fn(H) for every subgroup of Z^k/(n) with H its Hermite basis
/// (row-major k x k): row j has pivot d_j | n_j at column j and entries right
/// of the diagonal reduced modulo the pivot of their column. Every lattice
/// between diag(n) Z^k and Z^k has exactly one such basis.
template <class Fn>
void for_each_subgroup_lattice(const std::vector<std::int64_t>& n, Fn&& fn) {
  const std::size_t k = n.size();
  std::vector<std::int64_t> H(k * k, 0);
  if (k == 0) {
    fn(static_cast<const std::int64_t*>(H.data()));
    return;
  }
  std::vector<std::int64_t> v(k);
  // n_j e_j lies in L iff (n_j/d_j) (row j right of the pivot) lies in the
  // span of the rows below
  auto closes = [&](std::size_t j) {
    const std::int64_t q = n[j] / H[j * k + j];
    for (std::size_t l = j + 1; l < k; ++l) v[l] = q * H[j * k + l];
    for (std::size_t l = j + 1; l < k; ++l) {
      if (v[l] == 0) continue;
      const std::int64_t d = H[l * k + l];
      if (v[l] % d != 0) return false;
      const std::int64_t c = v[l] / d;
      for (std::size_t m = l; m < k; ++m) v[m] -= c * H[l * k + m];
    }
    return true;
  };
  std::function<void(std::size_t)> row = [&](std::size_t j) {
    for (std::int64_t d = 1; d <= n[j]; ++d) {
      if (n[j] % d != 0) continue;
      H[j * k + j] = d;
      // odometer over the entries right of the pivot
      std::size_t free = 0;
      for (std::size_t l = j + 1; l < k; ++l) {
        H[j * k + l] = 0;
        if (H[l * k + l] > 1) ++free;
      }
      while (true) {
        if (closes(j)) {
          if (j == 0)
            fn(static_cast<const std::int64_t*>(H.data()));
          else
            row(j - 1);
        }
        if (free == 0) break;
        std::size_t l = k;
        while (l-- > j + 1) {
          if (H[l * k + l] == 1) continue;
          if (++H[j * k + l] < H[l * k + l]) break;
          H[j * k + l] = 0;
        }
        if (l == j) break;
      }
      for (std::size_t l = j + 1; l < k; ++l) H[j * k + l] = 0;
    }
  };
  row(k - 1);
}

inline Echelon lattice_of_hermite(const std::vector<std::int64_t>& n, const std::int64_t* H) {
  const std::size_t k = n.size();
  Echelon L(n);
  for (std::size_t j = 0; j < k; ++j) L.insert(Coords(H + j * k, H + (j + 1) * k));
  return L;
}

inline std::vector<Subgroup> all_subgroups(const AbelianGroup& A, std::size_t budget = kDefaultSearchBudget) {
  detail::require_finite_product(A, std::numeric_limits<std::size_t>::max());
  std::vector<Subgroup> out;
  for_each_subgroup_lattice(A.moduli(), [&](const std::int64_t* H) {
    if (out.size() == budget) throw BudgetExceeded("more than " + std::to_string(budget) + " subgroups", out.size());
    out.push_back(detail::subgroup_of_lattice(A, lattice_of_hermite(A.moduli(), H)));
  });
  return out;
}

/// Invariant factors n_1 | n_2 | ... (each > 1) of every abelian group of
/// order n, one list per isomorphism class.
inline std::vector<std::vector<std::int64_t>> abelian_groups_of_order(std::int64_t n) {
  if (n < 1) throw InvalidArgument("group order must be positive");
  std::vector<std::pair<std::int64_t, int>> pf;
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) n /= p, ++e;
      pf.emplace_back(p, e);
    }
  if (n > 1) pf.emplace_back(n, 1);
  std::vector<std::vector<std::vector<int>>> parts(pf.size());
  std::function<void(int, int, std::vector<int>&, std::vector<std::vector<int>>&)> partitions =
      [&](int rest, int cap, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
        if (rest == 0) {
          out.push_back(cur);
          return;
        }
        for (int x = std::min(rest, cap); x >= 1; --x) {
          cur.push_back(x);
          partitions(rest - x, x, cur, out);
          cur.pop_back();
        }
      };
  for (std::size_t i = 0; i < pf.size(); ++i) {
    std::vector<int> cur;
    partitions(pf[i].second, pf[i].second, cur, parts[i]);
  }
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::size_t> pick(pf.size(), 0);
  while (true) {
    std::size_t len = 0;
    for (std::size_t i = 0; i < pf.size(); ++i) len = std::max(len, parts[i][pick[i]].size());
    std::vector<std::int64_t> f(len, 1);  // f[0] largest
    for (std::size_t i = 0; i < pf.size(); ++i) {
      const auto& lam = parts[i][pick[i]];
      for (std::size_t r = 0; r < lam.size(); ++r)
        for (int e = 0; e < lam[r]; ++e) f[r] *= pf[i].first;
    }
    std::reverse(f.begin(), f.end());
    out.push_back(std::move(f));
    std::size_t i = 0;
    while (i < pf.size() && ++pick[i] == parts[i].size()) pick[i++] = 0;
    if (i == pf.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Open subgroups and windowed duals
// ---------------------------------------------------------------------------

/// U = ker C inside a finite carrier Z^k/(carrier), with C valued in
/// Z^m/(target). Carriers are finite duals or window groups.
struct OpenSubgroup {
  std::vector<std::int64_t> carrier;
  IntMatrix C;
  std::vector<std::int64_t> target;

  static OpenSubgroup whole(std::vector<std::int64_t> carrier) {
    const std::size_t k = carrier.size();
    return OpenSubgroup{std::move(carrier), IntMatrix(0, k), {}};
  }

  /// A subgroup of a finite dual, described as the kernel of its quotient map.
  static OpenSubgroup of(const Subgroup& U) {
    detail::require_finite_product(U.group(), std::numeric_limits<std::size_t>::max());
    const Quotient q = quotient_group(U.group(), U);
    return OpenSubgroup{U.group().moduli(), q.project_base, q.group.moduli()};
  }

  /// [K : U].
  BigCount index() const { return detail::image_order(C, target); }
  double log_index() const { return log_count(index()); }
  Echelon lattice() const { return detail::kernel_lattice(C, carrier, target); }

  bool contains(const Coords& x) const {
    const Coords y = C.apply(x);
    for (std::size_t r = 0; r < y.size(); ++r)
      if (floor_mod(y[r], target[r]) != 0) return false;
    return true;
  }

  /// Stacked conditions: the intersection.
  OpenSubgroup meet(const OpenSubgroup& o) const {
    if (carrier != o.carrier) throw MismatchError("open subgroups of different groups");
    IntMatrix M(C.rows + o.C.rows, carrier.size());
    for (std::size_t r = 0; r < C.rows; ++r)
      for (std::size_t j = 0; j < M.cols; ++j) M(r, j) = C(r, j);
    for (std::size_t r = 0; r < o.C.rows; ++r)
      for (std::size_t j = 0; j < M.cols; ++j) M(C.rows + r, j) = o.C(r, j);
    std::vector<std::int64_t> t(target);
    t.insert(t.end(), o.target.begin(), o.target.end());
    return OpenSubgroup{carrier, std::move(M), std::move(t)};
  }
};

/// The coordinates in a finite window W of the compact dual prod_{i in I} A0^
/// of a direct sum bigoplus_{i in I} A0 with A0 finite. Conditions may only
/// read coordinates of W; anything else raises WindowEscape.
class WindowedProfinite {
 public:
  WindowedProfinite() = default;
  WindowedProfinite(AbelianGroup A, std::vector<MElement> window) : A_(std::move(A)), window_(std::move(window)) {
    if (A_.kind() != GroupKind::DirectSum) throw InvalidArgument("windowed duals belong to direct sums");
    for (auto n : A_.moduli())
      if (n == 0) throw UnsupportedError("windowed duals need a finite base group");
    std::sort(window_.begin(), window_.end());
    window_.erase(std::unique(window_.begin(), window_.end()), window_.end());
    for (const auto& i : window_) A_.index().require(i);
    for (std::size_t p = 0; p < window_.size(); ++p)
      for (auto n : A_.moduli()) carrier_.push_back(n);
  }

  /// The canonical window of the index monoid of that size.
  static WindowedProfinite box(const AbelianGroup& A, std::int64_t size) {
    return WindowedProfinite(A, A.index().window(size));
  }

  const AbelianGroup& group() const noexcept { return A_; }
  const std::vector<MElement>& window() const noexcept { return window_; }
  const std::vector<std::int64_t>& carrier() const noexcept { return carrier_; }
  std::size_t block() const noexcept { return A_.base_dim(); }

  std::optional<std::size_t> position(const MElement& i) const {
    auto it = std::lower_bound(window_.begin(), window_.end(), i);
    if (it == window_.end() || *it != i) return std::nullopt;
    return static_cast<std::size_t>(it - window_.begin());
  }

  std::size_t require_position(const MElement& i) const {
    if (auto p = position(i)) return *p;
    throw WindowEscape("coordinate " + to_string(i) + " is outside the window", i);
  }

  /// {chi : chi_i = 0 for i in coords}.
  OpenSubgroup vanishing(const std::vector<MElement>& coords) const {
    const std::size_t k = block();
    IntMatrix C(coords.size() * k, carrier_.size());
    std::vector<std::int64_t> t;
    for (std::size_t a = 0; a < coords.size(); ++a) {
      const std::size_t p = require_position(coords[a]);
      for (std::size_t l = 0; l < k; ++l) {
        C(a * k + l, p * k + l) = 1;
        t.push_back(A_.moduli()[l]);
      }
    }
    return OpenSubgroup{carrier_, std::move(C), std::move(t)};
  }

  /// B^perp for a finitely generated B supported in the window.
  OpenSubgroup annihilator(const Subgroup& B) const {
    A_.require_same(B.group());
    if (B.is_coordinatewise()) throw UnsupportedError("annihilators of coordinatewise subgroups are not open");
    const auto& n = A_.moduli();
    const std::int64_t N = detail::lcm_of(n);
    const auto gens = B.generators();
    IntMatrix C(gens.size(), carrier_.size());
    for (std::size_t r = 0; r < gens.size(); ++r)
      for (const auto& [i, v] : A_.terms(gens[r])) {
        const std::size_t p = require_position(i);
        for (std::size_t l = 0; l < n.size(); ++l) C(r, p * n.size() + l) = v[l] * (N / n[l]) % N;
      }
    return OpenSubgroup{carrier_, std::move(C), std::vector<std::int64_t>(gens.size(), N)};
  }

  /// <x, chi> for x in the direct sum supported in the window.
  Rational pairing(const GroupElement& x, const Coords& chi) const {
    const auto& n = A_.moduli();
    const std::int64_t N = detail::lcm_of(n);
    __int128 s = 0;
    for (const auto& [i, v] : A_.terms(x)) {
      const std::size_t p = require_position(i);
      for (std::size_t l = 0; l < n.size(); ++l) s += static_cast<__int128>(v[l]) * chi[p * n.size() + l] * (N / n[l]);
    }
    return Rational(floor_mod(static_cast<std::int64_t>(s % N), N), N);
  }

 private:
  AbelianGroup A_;
  std::vector<MElement> window_;
  std::vector<std::int64_t> carrier_;
};

/// The dual action s -> alpha(s)^ on a finite dual or on a window of the
/// compact dual of a direct sum. Shifts dualize to adjoint translations:
/// (gamma chi)_i = D^ chi_{i+t}, and 0 when i+t leaves the index monoid.
class DualAction {
 public:
  static DualAction of_finite(const Action& a, std::size_t bound = kDefaultDualBound) {
    detail::require_finite_product(a.group(), bound);
    DualAction g;
    g.alpha_ = a;
    g.carrier_ = a.group().moduli();
    return g;
  }

  static DualAction of_direct_sum(const Action& a, WindowedProfinite K) {
    a.group().require_same(K.group());
    DualAction g;
    g.alpha_ = a;
    g.carrier_ = K.carrier();
    g.K_ = std::move(K);
    return g;
  }

  const Monoid& monoid() const { return alpha_.monoid(); }
  const Action& source() const { return alpha_; }
  const std::vector<std::int64_t>& carrier() const { return carrier_; }
  bool windowed() const { return K_.has_value(); }
  const WindowedProfinite& window() const { return *K_; }

  /// gamma(s)^{-1}(U) = ker(C o gamma(s)).
  OpenSubgroup preimage(const OpenSubgroup& U, const MElement& s) const {
    if (U.carrier != carrier_) throw MismatchError("open subgroup lives in a different group");
    const Endomorphism phi = alpha_.at(s);
    if (!K_) {
      IntMatrix C = U.C * detail::dual_matrix(phi.matrix(), carrier_);
      for (std::size_t r = 0; r < C.rows; ++r)
        for (std::size_t j = 0; j < C.cols; ++j) C(r, j) = floor_mod(C(r, j), U.target[r]);
      return OpenSubgroup{carrier_, std::move(C), U.target};
    }
    // alpha(s) = S_m ... S_1, so C o gamma(s) = C S_1^ ... S_m^
    IntMatrix C = U.C;
    for (const auto& st : phi.steps()) C = pull_step(C, U.target, st);
    return OpenSubgroup{carrier_, std::move(C), U.target};
  }

  /// gamma(s) chi on a finite dual.
  Coords apply(const MElement& s, const Coords& chi) const {
    if (K_) throw UnsupportedError("pointwise evaluation on a window is not closed; use preimage");
    Coords y = detail::dual_matrix(alpha_.at(s).matrix(), carrier_).apply(chi);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = floor_mod(y[i], carrier_[i]);
    return y;
  }

 private:
  IntMatrix pull_step(const IntMatrix& C, const std::vector<std::int64_t>& target,
                      const Endomorphism::ShiftStep& st) const {
    const auto& W = K_->window();
    const Monoid& I = K_->group().index();
    const auto& n = K_->group().moduli();
    const std::size_t k = n.size();
    const IntMatrix Dh = detail::dual_matrix(st.base, n);
    IntMatrix out(C.rows, C.cols);
    for (std::size_t p = 0; p < W.size(); ++p) {
      bool used = false;
      for (std::size_t r = 0; r < C.rows && !used; ++r)
        for (std::size_t l = 0; l < k && !used; ++l) used = C(r, p * k + l) != 0;
      if (!used) continue;
      MElement j(W[p].size());
      for (std::size_t c = 0; c < j.size(); ++c) {
        j[c] = W[p][c] + st.translation[c];
        if (I.coords()[c].kind == CoordKind::Mod) j[c] = floor_mod(j[c], I.coords()[c].modulus);
      }
      if (!I.contains(j)) continue;  // gamma writes 0 there
      const auto q = K_->position(j);
      if (!q) throw WindowEscape("condition on coordinate " + to_string(W[p]) + " pulls back to " + to_string(j) +
                                     ", outside the window",
                                 j);
      for (std::size_t r = 0; r < C.rows; ++r)
        for (std::size_t l2 = 0; l2 < k; ++l2) {
          __int128 acc = out(r, *q * k + l2);
          for (std::size_t l = 0; l < k; ++l) acc += static_cast<__int128>(C(r, p * k + l)) * Dh(l, l2);
          out(r, *q * k + l2) = floor_mod(static_cast<std::int64_t>(acc % target[r]), target[r]);
        }
    }
    return out;
  }

  Action alpha_;
  std::vector<std::int64_t> carrier_;
  std::optional<WindowedProfinite> K_;
};

/// C_F(gamma, U) = intersection over s in F of gamma(s)^{-1}(U).
inline OpenSubgroup cotrajectory(const DualAction& g, const MSubset& F, const OpenSubgroup& U) {
  if (F.empty()) throw InvalidArgument("cotrajectory of an empty set");
  std::optional<OpenSubgroup> acc;
  for (const auto& s : F) {
    g.monoid().require(s);
    OpenSubgroup P = g.preimage(U, s);
    acc = acc ? acc->meet(P) : std::move(P);
  }
  return *acc;
}

/// Cells of the common refinement of the coset covers gamma(s)^{-1}(U + x),
/// s in F, counted by evaluating the conditions at every point of K.
inline std::size_t refined_cover_size(const DualAction& g, const MSubset& F, const OpenSubgroup& U,
                                      std::size_t budget = kDefaultDualBound) {
  const auto& n = g.carrier();
  BigCount size = 1;
  for (auto x : n) size *= x;
  if (size > BigCount(budget)) throw BudgetExceeded("carrier of size " + size.str() + " exceeds the enumeration budget");
  std::vector<OpenSubgroup> pre;
  for (const auto& s : F) pre.push_back(g.preimage(U, s));
  std::set<Coords> cells;
  Coords chi(n.size(), 0);
  while (true) {
    Coords sig;
    for (const auto& P : pre) {
      const Coords y = P.C.apply(chi);
      for (std::size_t r = 0; r < y.size(); ++r) sig.push_back(floor_mod(y[r], P.target[r]));
    }
    cells.insert(std::move(sig));
    std::size_t i = 0;
    while (i < n.size() && ++chi[i] == n[i]) chi[i++] = 0;
    if (i == n.size()) break;
  }
  return cells.size();
}

/// F -> log [K : C_F(gamma, U)] and its ratio table.
inline SetFunction cotrajectory_index(const DualAction& g, const OpenSubgroup& U) {
  return SetFunction::exact(g.monoid(), Provenance::CoverCount, "log[K:C_F]", ExactKind::LogOfCount,
                            [g, U](const MSubset& F) { return cotrajectory(g, F, U).index(); });
}

inline IntegralEstimate H_top_estimate(const DualAction& g, const OpenSubgroup& U, const FolnerNet& net,
                                       std::size_t prefix) {
  try {
    return integral(cotrajectory_index(g, U), net, prefix);
  } catch (const WindowEscape& e) {
    std::size_t ok = 0;
    for (std::size_t i = 1; i <= prefix; ++i) {
      try {
        cotrajectory(g, net.at(i), U);
      } catch (const WindowEscape&) {
        break;
      }
      ok = i;
    }
    throw WindowEscape(std::string(e.what()) + "; largest valid prefix " + std::to_string(ok), e.offending(), ok);
  }
}

// ---------------------------------------------------------------------------
// Trajectories against cotrajectories
// ---------------------------------------------------------------------------

/// One cotrajectory/trajectory comparison for a finite F.
struct CtReport {
  BigCount trajectory;  // |T_F(alpha, B)|
  BigCount index;       // [A^ : C_F(alpha^, B^perp)]
  bool equal() const { return trajectory == index; }
};

inline CtReport ct_check(const Action& a, const DualAction& g, const Subgroup& B, const OpenSubgroup& Bperp,
                         const MSubset& F) {
  return CtReport{*subgroup_trajectory(a, F, B).order(), cotrajectory(g, F, Bperp).index()};
}

inline CtReport ct_check(const Action& a, const Subgroup& B, const MSubset& F, std::size_t bound = kDefaultDualBound) {
  const DualAction g = DualAction::of_finite(a, bound);
  return ct_check(a, g, B, OpenSubgroup::of(annihilator(B, bound)), F);
}

struct BridgeRow {
  std::size_t index = 0, size = 0;
  BigCount trajectory, cover;
  double ell = 0, log_index = 0;
  bool exact = false;
  double difference() const { return ell - log_index; }
};

struct BridgeReport {
  IntegralEstimate algebraic, topological;
  std::vector<BridgeRow> rows;
  bool exact_everywhere() const {
    return std::all_of(rows.begin(), rows.end(), [](const BridgeRow& r) { return r.exact; });
  }
  double tail_difference() const { return std::abs(algebraic.tail() - topological.tail()); }

  /// Columns index, |F|, l(T_F), log-index, difference.
  CsvTable csv(double log_base = 0) const {
    const double scale = log_base > 0 ? 1.0 / std::log(log_base) : 1.0;
    CsvTable t({"index", "|F|", "l(T_F)", "log-index", "difference"});
    for (const auto& r : rows)
      t.add_row({std::to_string(r.index), std::to_string(r.size), format_real(r.ell * scale),
                 format_real(r.log_index * scale), format_real(r.difference() * scale)});
    return t;
  }
};

inline BridgeReport bridge_check(const Action& a, const DualAction& g, const Subgroup& B, const OpenSubgroup& Bperp,
                                 const FolnerNet& net, std::size_t prefix) {
  if (!(g.source().monoid() == a.monoid())) throw MismatchError("dual action of a different monoid");
  BridgeReport rep;
  rep.algebraic = integral(trajectory_length(a, B), net, prefix);
  rep.topological = H_top_estimate(g, Bperp, net, prefix);
  for (std::size_t k = 0; k < rep.algebraic.rows.size(); ++k) {
    const auto& x = rep.algebraic.rows[k];
    const auto& y = rep.topological.rows[k];
    BridgeRow r;
    r.index = x.index;
    r.size = x.size;
    r.trajectory = *x.exact;
    r.cover = *y.exact;
    r.ell = x.value;
    r.log_index = y.value;
    r.exact = r.trajectory == r.cover;
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

/// Finite A: pairs B with its annihilator in the finite dual.
inline BridgeReport bridge_check(const Action& a, const Subgroup& B, const FolnerNet& net, std::size_t prefix,
                                 std::size_t bound = kDefaultDualBound) {
  return bridge_check(a, DualAction::of_finite(a, bound), B, OpenSubgroup::of(annihilator(B, bound)), net, prefix);
}

/// Direct sums: pairs B with its annihilator in a window of the compact dual.
inline BridgeReport bridge_check_windowed(const Action& a, const Subgroup& B, const FolnerNet& net,
                                          std::size_t prefix, std::int64_t window) {
  WindowedProfinite K = WindowedProfinite::box(a.group(), window);
  const OpenSubgroup U = K.annihilator(B);
  return bridge_check(a, DualAction::of_direct_sum(a, std::move(K)), B, U, net, prefix);
}

// ---------------------------------------------------------------------------
// Sweeps over all small groups
// ---------------------------------------------------------------------------

struct DualitySweepReport {
  std::int64_t max_order = 0;
  std::size_t groups = 0, subgroups = 0, pairs = 0, failures = 0;
  std::optional<std::string> first_failure;
  bool passed() const { return failures == 0; }
};

namespace detail {

/// Hermite basis of L1 cap L2 from the stacked basis of
/// <(a, a) : a in L1> + <(b, 0) : b in L2> over the moduli (n, n): the rows
/// pivoting in the second half have zero first half.
inline void hermite_meet(const std::vector<std::int64_t>& n, const std::int64_t* H1, const std::int64_t* H2,
                         std::int64_t* out) {
  const std::size_t k = n.size(), w = 2 * k;
  thread_local std::vector<std::int64_t> nn, big, v;
  nn.assign(n.begin(), n.end());
  nn.insert(nn.end(), n.begin(), n.end());
  big.assign(w * w, 0);
  for (std::size_t j = 0; j < w; ++j) big[j * w + j] = nn[j];
  v.assign(w, 0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) v[c] = v[k + c] = H1[r * k + c];
    hermite_add(nn, big.data(), v.data());
    for (std::size_t c = 0; c < k; ++c) v[c] = H2[r * k + c], v[k + c] = 0;
    hermite_add(nn, big.data(), v.data());
  }
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) out[r * k + c] = big[(k + r) * w + k + c];
  hermite_canonicalize(k, out);
}

}  // namespace detail

/// For every abelian group of order <= max_order and every subgroup B:
/// (B^perp)^perp = B and |B| |B^perp| = |A|. For pairs, (B1 + B2)^perp =
/// B1^perp cap B2^perp, on all pairs when |A| <= pairs_exhaustive_up_to and
/// on `pair_samples` reservoir-sampled pairs per group above that.
inline DualitySweepReport duality_sweep(std::int64_t max_order, std::int64_t pairs_exhaustive_up_to,
                                        std::size_t pair_samples, std::uint64_t seed = 1) {
  DualitySweepReport rep;
  rep.max_order = max_order;
  std::mt19937_64 rng(seed);
  auto fail = [&rep](const std::vector<std::int64_t>& f, const std::string& what) {
    if (rep.failures++ == 0) rep.first_failure = what + " in " + AbelianGroup::finite(f).describe();
  };
  for (std::int64_t n = 1; n <= max_order; ++n)
    for (const auto& f : abelian_groups_of_order(n)) {
      ++rep.groups;
      const std::size_t k = f.size(), kk = k * k;
      std::vector<std::int64_t> P(kk), PP(kk), lower(kk);
      const bool exhaustive = n <= pairs_exhaustive_up_to;
      std::vector<std::int64_t> kept;  // Hermite bases, kk entries each
      std::size_t seen = 0;
      for_each_subgroup_lattice(f, [&](const std::int64_t* H) {
        ++rep.subgroups;
        detail::perp_triangular(f, H, true, lower.data());
        detail::perp_triangular(f, lower.data(), false, PP.data());
        detail::hermite_canonicalize(k, PP.data());
        if (!std::equal(PP.begin(), PP.end(), H)) fail(f, "perp of perp differs from B");
        std::int64_t order = 1;
        for (std::size_t j = 0; j < k; ++j) order *= (f[j] / H[j * k + j]) * (f[j] / lower[j * k + j]);
        if (order != n) fail(f, "|B| |B^perp| differs from |A|");
        // reservoir of 2 * pair_samples bases
        const std::size_t cap = exhaustive ? std::numeric_limits<std::size_t>::max() : 2 * pair_samples;
        if (kept.size() / std::max<std::size_t>(kk, 1) < cap) {
          kept.insert(kept.end(), H, H + kk);
        } else {
          const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, seen)(rng);
          if (slot < cap) std::copy(H, H + kk, kept.begin() + static_cast<std::ptrdiff_t>(slot * kk));
        }
        ++seen;
      });
      if (k == 0) {
        ++rep.pairs;
        continue;
      }
      const std::size_t count = kept.size() / kk;
      std::vector<std::int64_t> perps(kept.size());
      for (std::size_t i = 0; i < count; ++i) detail::perp_hermite(f, kept.data() + i * kk, perps.data() + i * kk);
      std::vector<std::int64_t> join(kk), v(k), meet(kk);
      auto check_pair = [&](std::size_t a, std::size_t b) {
        ++rep.pairs;
        const std::int64_t* H1 = kept.data() + a * kk;
        const std::int64_t* H2 = kept.data() + b * kk;
        std::copy(H1, H1 + kk, join.begin());
        for (std::size_t r = 0; r < k; ++r) {
          std::copy(H2 + r * k, H2 + (r + 1) * k, v.begin());
          detail::hermite_add(f, join.data(), v.data());
        }
        detail::hermite_canonicalize(k, join.data());
        detail::perp_hermite(f, join.data(), P.data());
        detail::hermite_meet(f, perps.data() + a * kk, perps.data() + b * kk, meet.data());
        if (!std::equal(P.begin(), P.end(), meet.begin())) fail(f, "(B1 + B2)^perp differs from B1^perp cap B2^perp");
      };
      if (exhaustive) {
        for (std::size_t a = 0; a < count; ++a)
          for (std::size_t b = 0; b < count; ++b) check_pair(a, b);
      } else {
        for (std::size_t a = 0; a + 1 < count; a += 2) check_pair(a, a + 1);
      }
    }
  return rep;
}

struct CtSweepReport {
  std::int64_t max_order = 0;
  std::size_t groups = 0, actions = 0, checks = 0, failures = 0, min_endomorphisms = 0;
  std::optional<std::string> first_failure;
  bool passed() const { return failures == 0; }
};

/// |T_F(alpha, B)| = [A^ : C_F(alpha^, B^perp)] for every abelian group of
/// order <= max_order, the N-actions generated by an endomorphism sample of
/// each group (all endomorphisms when there are fewer than `endomorphisms`),
/// every subgroup B and F = [0, k) with k <= max_k.
inline CtSweepReport ct_sweep(std::int64_t max_order, std::size_t endomorphisms, std::int64_t max_k,
                              std::uint64_t seed = 1) {
  CtSweepReport rep;
  rep.max_order = max_order;
  rep.min_endomorphisms = std::numeric_limits<std::size_t>::max();
  Rng rng(seed);
  std::vector<MSubset> Fs;
  for (std::int64_t k = 1; k <= max_k; ++k) {
    std::vector<MElement> v;
    for (std::int64_t i = 0; i < k; ++i) v.push_back({i});
    Fs.emplace_back(std::move(v));
  }
  for (std::int64_t n = 1; n <= max_order; ++n)
    for (const auto& f : abelian_groups_of_order(n)) {
      ++rep.groups;
      const auto A = AbelianGroup::finite(f);
      const auto subs = all_subgroups(A);
      std::vector<OpenSubgroup> perps;
      for (const auto& B : subs) perps.push_back(OpenSubgroup::of(annihilator(B)));
      const auto sample = endomorphism_sample(A, endomorphisms, rng);
      rep.min_endomorphisms = std::min(rep.min_endomorphisms, sample.size());
      for (const auto& phi : sample) {
        ++rep.actions;
        const auto a = Action::from_generators(Monoid::naturals(), A, {phi});
        const auto g = DualAction::of_finite(a);
        for (std::size_t i = 0; i < subs.size(); ++i)
          for (const auto& F : Fs) {
            ++rep.checks;
            const auto r = ct_check(a, g, subs[i], perps[i], F);
            if (!r.equal() && rep.failures++ == 0)
              rep.first_failure = A.describe() + ", " + phi.describe() + ", |F| = " + std::to_string(F.size()) +
                                  ": " + r.trajectory.str() + " vs " + r.index.str();
          }
      }
    }
  return rep;
}

}  // namespace amenact
