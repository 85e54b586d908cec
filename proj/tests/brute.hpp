// Brute-force oracles over small finite groups, independent of the lattice
// machinery: groups are enumerated explicitly and subgroups are bitmasks.
#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace brute {

using Vec = std::vector<std::int64_t>;

struct FiniteGroup {
  std::vector<std::int64_t> mod;
  std::size_t order() const {
    std::size_t n = 1;
    for (auto m : mod) n *= static_cast<std::size_t>(m);
    return n;
  }
  Vec decode(std::size_t code) const {
    Vec v(mod.size());
    for (std::size_t i = mod.size(); i-- > 0;) {
      v[i] = static_cast<std::int64_t>(code % static_cast<std::size_t>(mod[i]));
      code /= static_cast<std::size_t>(mod[i]);
    }
    return v;
  }
  std::size_t encode(const Vec& v) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < mod.size(); ++i) {
      std::int64_t x = v[i] % mod[i];
      if (x < 0) x += mod[i];
      c = c * static_cast<std::size_t>(mod[i]) + static_cast<std::size_t>(x);
    }
    return c;
  }
  std::size_t add(std::size_t a, std::size_t b) const {
    Vec x = decode(a), y = decode(b);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return encode(x);
  }
};

/// Subgroup generated by the given element codes, as a sorted element list.
inline std::vector<std::size_t> closure(const FiniteGroup& G, const std::vector<std::size_t>& gens) {
  std::vector<char> in(G.order(), 0);
  std::vector<std::size_t> elems{G.encode(Vec(G.mod.size(), 0))};
  in[elems[0]] = 1;
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (auto g : gens) {
      std::size_t s = G.add(elems[i], g);
      if (!in[s]) {
        in[s] = 1;
        elems.push_back(s);
      }
    }
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < in.size(); ++c)
    if (in[c]) out.push_back(c);
  return out;
}

/// All subgroups of a group of order <= 64 as bitmasks.
inline std::vector<std::uint64_t> all_subgroups(const FiniteGroup& G) {
  const std::size_t n = G.order();
  auto mask_of = [&](const std::vector<std::size_t>& el) {
    std::uint64_t m = 0;
    for (auto e : el) m |= std::uint64_t{1} << e;
    return m;
  };
  std::set<std::uint64_t> seen;
  std::vector<std::vector<std::size_t>> frontier{{}};
  seen.insert(mask_of(closure(G, {})));
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> work{{*seen.begin(), {}}};
  for (std::size_t w = 0; w < work.size(); ++w) {
    for (std::size_t g = 0; g < n; ++g) {
      if (work[w].first >> g & 1) continue;
      auto gens = work[w].second;
      gens.push_back(g);
      std::uint64_t m = mask_of(closure(G, gens));
      if (seen.insert(m).second) work.emplace_back(m, gens);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace brute
