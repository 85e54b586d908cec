// Integer lattices with per-coordinate moduli.
//
// A subgroup B of Z^f x Z/n_1 x ... x Z/n_t is represented by the lattice
// L = pi^{-1}(B) in Z^k, which contains the relation lattice
// Lambda = (+) n_j Z e_j over the finite coordinates. L is kept in Hermite
// normal form: one pivot row per column at most, pivots positive, entries
// above pivots reduced into [0, pivot). The finite columns always carry a
// pivot because Lambda is inserted up front.
#pragma once

#include "amenact/core.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace amenact {

/// Row-major integer matrix; rows are images of basis vectors unless noted.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix from_rows(const std::vector<Coords>& rs) {
    IntMatrix m(rs.size(), rs.empty() ? 0 : rs.front().size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i].size() != m.cols) throw InvalidArgument("ragged matrix");
      std::copy(rs[i].begin(), rs[i].end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
    }
    return m;
  }
  std::int64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  /// y = M x (column-vector convention).
  Coords apply(const Coords& x) const {
    if (x.size() != cols) throw MismatchError("matrix/vector dimension mismatch");
    Coords y(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) {
      __int128 acc = 0;
      for (std::size_t j = 0; j < cols; ++j) acc += static_cast<__int128>((*this)(i, j)) * x[j];
      y[i] = checked_narrow(acc);
    }
    return y;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols != o.rows) throw MismatchError("matrix product dimension mismatch");
    IntMatrix r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < o.cols; ++j) {
        __int128 acc = 0;
        for (std::size_t k = 0; k < cols; ++k) acc += static_cast<__int128>((*this)(i, k)) * o(k, j);
        r(i, j) = checked_narrow(acc);
      }
    return r;
  }

  IntMatrix transposed() const {
    IntMatrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const IntMatrix&) const = default;
};

/// Hermite normal form of a lattice containing the relation lattice of its
/// moduli (modulus 0 marks a free Z coordinate).
class Echelon {
 public:
  Echelon() = default;
  explicit Echelon(std::vector<std::int64_t> moduli)
      : moduli_(std::move(moduli)),
        rows_(moduli_.size() * moduli_.size(), 0),
        has_(moduli_.size(), 0) {
    const std::size_t k = moduli_.size();
    for (std::size_t j = 0; j < k; ++j) {
      if (moduli_[j] < 0) throw InvalidArgument("negative modulus");
      if (moduli_[j] > 0) {
        has_[j] = 1;
        row(j)[j] = moduli_[j];
      }
    }
  }

  std::size_t dim() const noexcept { return moduli_.size(); }
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }

  bool has_pivot(std::size_t j) const noexcept { return has_[j] != 0; }
  std::int64_t pivot(std::size_t j) const noexcept { return has_[j] ? row(j)[j] : 0; }

  /// Adds v to the generating set.
  void insert(Coords v) {
    check_dim(v);
    const std::size_t k = dim();
    for (std::size_t j = 0; j < k; ++j) {
      if (v[j] == 0) continue;
      if (!has_[j]) {
        if (v[j] < 0)
          for (auto& x : v) x = -x;
        std::copy(v.begin(), v.end(), row(j));
        has_[j] = 1;
        reduce_tail(j, row(j));
        dirty_ = true;
        return;
      }
      std::int64_t* p = row(j);
      const std::int64_t d = p[j];
      // bring v[j] into [0, d)
      std::int64_t q = floor_div(v[j], d);
      if (q != 0)
        for (std::size_t i = j; i < k; ++i) v[i] = mul_add(v[i], -q, p[i]);
      if (v[j] == 0) continue;
      std::int64_t x = 0, y = 0;
      const std::int64_t a = v[j];
      const std::int64_t g = ext_gcd(d, a, x, y);
      const std::int64_t ad = a / g, dd = d / g;
      for (std::size_t i = j; i < k; ++i) {
        const std::int64_t pi = p[i], vi = v[i];
        p[i] = checked_narrow(static_cast<__int128>(x) * pi + static_cast<__int128>(y) * vi);
        v[i] = checked_narrow(static_cast<__int128>(ad) * pi - static_cast<__int128>(dd) * vi);
      }
      reduce_tail(j, p);
      dirty_ = true;
    }
  }

  void insert_all(const std::vector<Coords>& vs) {
    for (const auto& v : vs) insert(v);
  }

  /// Canonical representative of the coset v + L.
  Coords reduce(Coords v) const {
    check_dim(v);
    const std::size_t k = dim();
    for (std::size_t j = 0; j < k; ++j) {
      if (!has_[j]) continue;
      const std::int64_t* p = row(j);
      std::int64_t q = floor_div(v[j], p[j]);
      if (q != 0)
        for (std::size_t i = j; i < k; ++i) v[i] = mul_add(v[i], -q, p[i]);
    }
    return v;
  }

  bool contains(const Coords& v) const {
    Coords r = reduce(v);
    return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
  }

  /// |L / Lambda|, or nullopt when some free coordinate is hit (infinite).
  std::optional<BigCount> subgroup_order() const {
    BigCount n = 1;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (moduli_[j] == 0) {
        if (has_[j]) return std::nullopt;
        continue;
      }
      n *= moduli_[j] / pivot(j);
    }
    return n;
  }

  double log_subgroup_order() const {
    double s = 0;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (moduli_[j] == 0) {
        if (has_[j]) return std::numeric_limits<double>::infinity();
        continue;
      }
      s += std::log(static_cast<double>(moduli_[j] / pivot(j)));
    }
    return s;
  }

  /// [Z^k : L] restricted to the finite coordinates, nullopt if some free
  /// coordinate carries no pivot (infinite index).
  std::optional<BigCount> index() const {
    BigCount n = 1;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (!has_[j]) return std::nullopt;
      n *= pivot(j);
    }
    return n;
  }

  /// Rows of the Hermite normal form, one per pivot column, in column order.
  std::vector<Coords> basis() const {
    canonicalize();
    std::vector<Coords> out;
    for (std::size_t j = 0; j < dim(); ++j)
      if (has_[j]) out.emplace_back(row(j), row(j) + dim());
    return out;
  }

  /// Pivot rows that are not pure relation rows n_j e_j: a generating set of
  /// the subgroup L / Lambda.
  std::vector<Coords> generators() const {
    canonicalize();
    std::vector<Coords> out;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (!has_[j]) continue;
      if (moduli_[j] != 0 && pivot(j) == moduli_[j]) continue;
      Coords r(row(j), row(j) + dim());
      for (std::size_t i = 0; i < dim(); ++i)
        if (moduli_[i] > 0) r[i] = floor_mod(r[i], moduli_[i]);
      out.push_back(std::move(r));
    }
    return out;
  }

  bool operator==(const Echelon& o) const {
    if (moduli_ != o.moduli_) return false;
    canonicalize();
    o.canonicalize();
    return has_ == o.has_ && rows_ == o.rows_;
  }

  /// Lattice sum.
  void absorb(const Echelon& o) {
    if (moduli_ != o.moduli_) throw MismatchError("lattice frames differ");
    for (auto& r : o.basis()) insert(r);
  }

  const std::int64_t* pivot_row(std::size_t j) const { return row(j); }

 private:
  std::int64_t* row(std::size_t j) { return rows_.data() + j * dim(); }
  const std::int64_t* row(std::size_t j) const { return rows_.data() + j * dim(); }

  void check_dim(const Coords& v) const {
    if (v.size() != dim()) throw MismatchError("vector outside lattice frame");
  }

  void reduce_tail(std::size_t j, std::int64_t* p) {
    const std::size_t k = dim();
    for (std::size_t i = j + 1; i < k; ++i) {
      if (!has_[i] || p[i] == 0) continue;
      const std::int64_t* r = row(i);
      std::int64_t q = floor_div(p[i], r[i]);
      if (q != 0)
        for (std::size_t c = i; c < k; ++c) p[c] = mul_add(p[c], -q, r[c]);
    }
  }

  void canonicalize() const {
    if (!dirty_) return;
    auto* self = const_cast<Echelon*>(this);
    const std::size_t k = dim();
    for (std::size_t j = 0; j < k; ++j) {
      if (!has_[j]) continue;
      const std::int64_t* pj = self->row(j);
      for (std::size_t i = 0; i < j; ++i) {
        if (!has_[i]) continue;
        std::int64_t* pi = self->row(i);
        std::int64_t q = floor_div(pi[j], pj[j]);
        if (q != 0)
          for (std::size_t c = j; c < k; ++c) pi[c] = mul_add(pi[c], -q, pj[c]);
      }
    }
    self->dirty_ = false;
  }

  std::vector<std::int64_t> moduli_;
  std::vector<std::int64_t> rows_;
  std::vector<char> has_;
  mutable bool dirty_ = true;
};

/// Lattice of x in `domain` with M x in `target` (M maps the domain frame
/// into the target frame, column-vector convention).
inline Echelon preimage_within(const IntMatrix& M, const Echelon& domain, const Echelon& target) {
  const std::size_t m = target.dim(), k = domain.dim();
  if (M.rows != m || M.cols != k) throw MismatchError("homomorphism does not match lattice frames");
  std::vector<std::int64_t> mod(m + k, 0);
  std::copy(target.moduli().begin(), target.moduli().end(), mod.begin());
  Echelon big(mod);
  for (const auto& t : target.basis()) {
    Coords v(m + k, 0);
    std::copy(t.begin(), t.end(), v.begin());
    big.insert(std::move(v));
  }
  for (const auto& b : domain.basis()) {
    Coords img = M.apply(b);
    Coords v(m + k, 0);
    std::copy(img.begin(), img.end(), v.begin());
    std::copy(b.begin(), b.end(), v.begin() + static_cast<std::ptrdiff_t>(m));
    big.insert(std::move(v));
  }
  Echelon out(domain.moduli());
  for (std::size_t j = m; j < m + k; ++j) {
    if (!big.has_pivot(j)) continue;
    const std::int64_t* r = big.pivot_row(j);
    out.insert(Coords(r + m, r + m + k));
  }
  return out;
}

inline Echelon full_lattice(const std::vector<std::int64_t>& moduli) {
  Echelon e(moduli);
  for (std::size_t j = 0; j < moduli.size(); ++j) {
    Coords v(moduli.size(), 0);
    v[j] = 1;
    e.insert(std::move(v));
  }
  return e;
}

inline Echelon intersect(const Echelon& a, const Echelon& b) {
  return preimage_within(IntMatrix::identity(a.dim()), a, b);
}

inline Echelon image(const IntMatrix& M, const Echelon& domain, const std::vector<std::int64_t>& target_moduli) {
  Echelon out(target_moduli);
  for (const auto& b : domain.basis()) out.insert(M.apply(b));
  return out;
}

/// Smith normal form with column transform: U A V = diag(s). Only V and
/// V^{-1} are tracked; the quotient Z^k / rowspace(A) is x -> x V mod s.
struct SmithForm {
  std::vector<std::int64_t> diagonal;  // length cols; 0 = free summand
  IntMatrix V;
  IntMatrix Vinv;
};

inline SmithForm smith_normal_form(IntMatrix A) {
  const std::size_t r = A.rows, k = A.cols;
  IntMatrix V = IntMatrix::identity(k), Vi = IntMatrix::identity(k);
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < k; ++j) std::swap(A(a, j), A(b, j));
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < r; ++i) std::swap(A(i, a), A(i, b));
    for (std::size_t i = 0; i < k; ++i) std::swap(V(i, a), V(i, b));
    for (std::size_t j = 0; j < k; ++j) std::swap(Vi(a, j), Vi(b, j));
  };
  // col_j -= q col_t
  auto col_sub = [&](std::size_t j, std::size_t t, std::int64_t q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < r; ++i) A(i, j) = mul_add(A(i, j), -q, A(i, t));
    for (std::size_t i = 0; i < k; ++i) V(i, j) = mul_add(V(i, j), -q, V(i, t));
    for (std::size_t c = 0; c < k; ++c) Vi(t, c) = mul_add(Vi(t, c), q, Vi(j, c));
  };
  auto row_sub = [&](std::size_t i, std::size_t t, std::int64_t q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < k; ++j) A(i, j) = mul_add(A(i, j), -q, A(t, j));
  };
  std::vector<std::int64_t> diag(k, 0);
  const std::size_t steps = std::min(r, k);
  for (std::size_t t = 0; t < steps; ++t) {
    for (;;) {
      // smallest nonzero magnitude in the remaining block
      std::size_t bi = r, bj = k;
      std::int64_t best = 0;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < k; ++j) {
          std::int64_t v = A(i, j) < 0 ? -A(i, j) : A(i, j);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (best == 0) {
        for (std::size_t s = t; s < k; ++s) diag[s] = 0;
        goto done;
      }
      swap_rows(t, bi);
      swap_cols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        row_sub(i, t, A(i, t) / A(t, t));
        if (A(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < k; ++j) {
        col_sub(j, t, A(t, j) / A(t, t));
        if (A(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < r && divides; ++i)
        for (std::size_t j = t + 1; j < k; ++j)
          if (A(i, j) % A(t, t) != 0) {
            for (std::size_t c = 0; c < k; ++c) A(t, c) = mul_add(A(t, c), 1, A(i, c));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (A(t, t) < 0)
      for (std::size_t j = 0; j < k; ++j) A(t, j) = -A(t, j);
    diag[t] = A(t, t);
  }
  for (std::size_t s = steps; s < k; ++s) diag[s] = 0;
done:
  return SmithForm{std::move(diag), std::move(V), std::move(Vi)};
}

}  // namespace amenact
