#pragma once

#include <numeric>
#include <random>

#include "amenact/action.hpp"

namespace amenact {

using Rng = std::mt19937_64;

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

/// Number of endomorphisms of prod Z/n_i, prod_{i,j} gcd(n_i, n_j).
inline BigCount endomorphism_count(const std::vector<std::int64_t>& n) {
  BigCount c = 1;
  for (auto a : n)
    for (auto b : n) c *= std::gcd(a, b);
  return c;
}

/// Uniform endomorphism of prod Z/n_i as a matrix: M(i,j) ranges over the
/// multiples of n_i / gcd(n_i, n_j).
inline IntMatrix random_endomorphism_matrix(const std::vector<std::int64_t>& n, Rng& rng) {
  const std::size_t k = n.size();
  IntMatrix M(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const std::int64_t step = n[i] / std::gcd(n[i], n[j]);
      M(i, j) = step * uniform_int(rng, 0, n[i] / step - 1);
    }
  return M;
}

/// The endomorphism with mixed-radix code `code` in the layout above.
inline IntMatrix endomorphism_matrix_of_code(const std::vector<std::int64_t>& n, std::uint64_t code) {
  const std::size_t k = n.size();
  IntMatrix M(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const std::int64_t g = std::gcd(n[i], n[j]);
      M(i, j) = (n[i] / g) * static_cast<std::int64_t>(code % static_cast<std::uint64_t>(g));
      code /= static_cast<std::uint64_t>(g);
    }
  return M;
}

/// All endomorphisms when there are at most `count` of them, otherwise
/// `count` distinct uniform samples. Always includes 0 and the identity.
inline std::vector<Endomorphism> endomorphism_sample(const AbelianGroup& A, std::size_t count, Rng& rng) {
  if (A.kind() != GroupKind::FiniteProduct) throw UnsupportedError("endomorphism samples of finite products only");
  const auto& n = A.moduli();
  const BigCount total = endomorphism_count(n);
  std::vector<Endomorphism> out;
  if (total <= count) {
    const auto t = static_cast<std::uint64_t>(total);
    for (std::uint64_t c = 0; c < t; ++c) out.push_back(Endomorphism::matrix(A, endomorphism_matrix_of_code(n, c)));
    return out;
  }
  out.push_back(Endomorphism::zero(A));
  out.push_back(Endomorphism::identity(A));
  while (out.size() < count) {
    auto phi = Endomorphism::matrix(A, random_endomorphism_matrix(n, rng));
    if (std::find(out.begin(), out.end(), phi) == out.end()) out.push_back(std::move(phi));
  }
  return out;
}

/// A uniform automorphism of a finite product, by rejection.
inline Endomorphism random_automorphism(const AbelianGroup& A, Rng& rng) {
  for (int t = 0; t < 200; ++t) {
    auto phi = Endomorphism::matrix(A, random_endomorphism_matrix(A.moduli(), rng));
    if (phi.inverse()) return phi;
  }
  return Endomorphism::identity(A);
}

inline GroupElement random_element(const AbelianGroup& A, Rng& rng, std::int64_t window = 3) {
  switch (A.kind()) {
    case GroupKind::FiniteProduct: {
      Coords c;
      for (auto m : A.moduli()) c.push_back(uniform_int(rng, 0, m - 1));
      return A.element(c);
    }
    case GroupKind::FreeZ: {
      Coords c(A.base_dim());
      for (auto& x : c) x = uniform_int(rng, -window, window);
      return A.element(c);
    }
    case GroupKind::DirectSum: {
      const auto idx = A.index().window(window);
      Coords v;
      for (auto m : A.moduli()) v.push_back(uniform_int(rng, 0, m - 1));
      return A.single(idx[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(idx.size()) - 1))], v);
    }
  }
  return A.zero();
}

/// A random finite subset of at most `size` elements, containing 0 when asked.
inline FiniteSubset random_finite_subset(const AbelianGroup& A, Rng& rng, std::size_t size, bool with_zero = true,
                                         std::int64_t window = 3) {
  std::vector<GroupElement> v;
  if (with_zero) v.push_back(A.zero());
  while (v.size() < size) v.push_back(random_element(A, rng, window));
  return FiniteSubset(std::move(v));
}

/// A random subset of S.window(window) with between 1 and `size` elements.
inline MSubset random_msubset(const Monoid& S, Rng& rng, std::size_t size, std::int64_t window) {
  const auto W = S.window(window);
  std::vector<MElement> v;
  const auto k = uniform_int(rng, 1, static_cast<std::int64_t>(size));
  for (std::int64_t i = 0; i < k; ++i)
    v.push_back(W[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(W.size()) - 1))]);
  return MSubset(v);
}

}  // namespace amenact
