// epsilon-disjoint families, epsilon-tilings of finite sets, a greedy tiler,
// and the boundary hypotheses of the filling theorem.
#pragma once

#include "amenact/monoid.hpp"

#include <limits>
#include <map>
#include <queue>
#include <unordered_set>

namespace amenact {

namespace detail {

/// Dinic max-flow on a small unit-heavy network.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : adj_(n), level_(n), it_(n) {}

  std::size_t add_edge(std::size_t u, std::size_t v, std::int64_t cap) {
    adj_[u].push_back({v, adj_[v].size(), cap});
    adj_[v].push_back({u, adj_[u].size() - 1, 0});
    return adj_[u].size() - 1;
  }

  std::int64_t run(std::size_t s, std::size_t t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
    }
    return flow;
  }

  /// Flow currently on edge `idx` out of u.
  std::int64_t flow_on(std::size_t u, std::size_t idx) const {
    const Edge& e = adj_[u][idx];
    return adj_[e.to][e.rev].cap;
  }

 private:
  struct Edge {
    std::size_t to, rev;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (const auto& e : adj_[u])
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t u, std::size_t t, std::int64_t f) {
    if (u == t) return f;
    for (; it_[u] < adj_[u].size(); ++it_[u]) {
      Edge& e = adj_[u][it_[u]];
      if (e.cap > 0 && level_[e.to] == level_[u] + 1) {
        const std::int64_t d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          adj_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

/// ceil((1 - eps) k) for eps = p/q.
inline std::int64_t disjoint_demand(std::size_t k, const Rational& eps) {
  const std::int64_t p = eps.numerator(), q = eps.denominator();
  const std::int64_t num = mul_add(0, static_cast<std::int64_t>(k), q - p);
  return num <= 0 ? 0 : (num + q - 1) / q;
}

}  // namespace detail

struct DisjointnessResult {
  bool feasible = false;
  std::vector<MSubset> witness;  // Z_j when feasible
};

/// Decides whether pairwise disjoint Z_j subset of Y_j with
/// (1 - eps)|Y_j| <= |Z_j| exist, as a flow feasibility problem.
inline DisjointnessResult is_eps_disjoint(const std::vector<MSubset>& family, const Rational& eps) {
  if (eps <= 0 || eps > 1) throw InvalidArgument("epsilon must lie in (0,1]");
  std::map<MElement, std::size_t> ids;
  for (const auto& Y : family)
    for (const auto& y : Y) ids.emplace(y, 0);
  std::vector<MElement> elems;
  for (auto& [e, id] : ids) {
    id = elems.size();
    elems.push_back(e);
  }
  const std::size_t J = family.size(), E = elems.size();
  const std::size_t src = J + E, snk = J + E + 1;
  detail::MaxFlow g(J + E + 2);
  std::int64_t demand = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> set_edges(J);  // (edge idx, element)
  for (std::size_t j = 0; j < J; ++j) {
    const std::int64_t need = detail::disjoint_demand(family[j].size(), eps);
    demand += need;
    g.add_edge(src, j, need);
    for (const auto& y : family[j]) {
      const std::size_t e = ids.at(y);
      set_edges[j].emplace_back(g.add_edge(j, J + e, 1), e);
    }
  }
  for (std::size_t e = 0; e < E; ++e) g.add_edge(J + e, snk, 1);
  DisjointnessResult r;
  r.feasible = g.run(src, snk) == demand;
  if (r.feasible) {
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<MElement> z;
      for (const auto& [idx, e] : set_edges[j])
        if (g.flow_on(j, idx) > 0) z.push_back(elems[e]);
      r.witness.emplace_back(std::move(z));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tilings
// ---------------------------------------------------------------------------

struct TilingWitness {
  std::vector<MSubset> tiles;    // F_1, ..., F_N
  std::vector<MSubset> centers;  // P_1, ..., P_N
};

struct TilingReport {
  std::size_t d = 0, u = 0, b = 0;
  bool blocks_disjoint = false;      // the sets P_j F_j are pairwise disjoint
  bool translates_disjoint = false;  // every translate s F_j is disjoint from every other one
  bool contained = false;            // U inside D
  bool clause2 = false;              // d - u < eps d
  bool clause3 = false;              // 0 <= b - u < eps b
  Rational eps;
  bool passed() const { return blocks_disjoint && contained && clause2 && clause3; }
  /// eps d - (d - u) and eps b - (b - u); positive when the clause holds.
  double margin2() const { return to_double(eps) * static_cast<double>(d) - static_cast<double>(d - u); }
  double margin3() const {
    return to_double(eps) * static_cast<double>(b) - (static_cast<double>(b) - static_cast<double>(u));
  }
};

inline TilingReport check_tiling(const Monoid& S, const MSubset& D, const TilingWitness& w, const Rational& eps) {
  if (w.tiles.size() != w.centers.size()) throw InvalidArgument("one center set per tile");
  TilingReport r;
  r.eps = eps;
  r.d = D.size();
  std::map<MElement, std::size_t> owner;  // element -> block
  std::size_t translate_hits = 0;
  r.blocks_disjoint = true;
  for (std::size_t j = 0; j < w.tiles.size(); ++j) {
    r.b += w.centers[j].size() * w.tiles[j].size();
    std::unordered_set<MElement, CoordsHash> block;
    for (const auto& p : w.centers[j])
      for (const auto& f : w.tiles[j]) {
        ++translate_hits;
        block.insert(S.mul(p, f));
      }
    for (const auto& x : block) {
      auto [it, fresh] = owner.emplace(x, j);
      if (!fresh) r.blocks_disjoint = false;
    }
  }
  r.u = owner.size();
  r.translates_disjoint = r.blocks_disjoint && translate_hits == r.u;
  r.contained = true;
  for (const auto& [x, j] : owner)
    if (!D.contains(x)) r.contained = false;
  const std::int64_t p = eps.numerator(), q = eps.denominator();
  const auto d = static_cast<std::int64_t>(r.d), u = static_cast<std::int64_t>(r.u), b = static_cast<std::int64_t>(r.b);
  r.clause2 = d >= u && mul_add(0, d - u, q) < mul_add(0, p, d);
  r.clause3 = b >= u && mul_add(0, b - u, q) < mul_add(0, p, b);
  return r;
}

/// |1/d - 1/b| < 2 eps / b in exact arithmetic, for a validated tiling.
inline bool reciprocal_size_check(const TilingReport& r) {
  if (!r.passed()) throw InvalidArgument("witness does not pass the tiling check");
  if (r.u > r.b) return false;
  // |1/d - 1/b| < 2 eps / b  <=>  |b - d| q < 2 p d
  const auto d = static_cast<std::int64_t>(r.d), b = static_cast<std::int64_t>(r.b);
  const std::int64_t diff = b > d ? b - d : d - b;
  return mul_add(0, diff, r.eps.denominator()) < mul_add(0, 2 * r.eps.numerator(), d);
}

/// b - u <= eps b and u <= b, for a validated tiling.
inline bool covered_mass_check(const TilingReport& r) {
  if (!r.passed()) throw InvalidArgument("witness does not pass the tiling check");
  const auto u = static_cast<std::int64_t>(r.u), b = static_cast<std::int64_t>(r.b);
  return u <= b && mul_add(0, b - u, r.eps.denominator()) <= mul_add(0, r.eps.numerator(), b);
}

/// Places exactly disjoint translates s F_j inside D, largest tiles first and
/// candidate centers in the sorted order of D, until |D \ U| < eps |D|.
/// Tiles must contain the identity so every translate s F_j meets D at s.
inline std::optional<TilingWitness> greedy_tiler(const Monoid& S, const MSubset& D, const std::vector<MSubset>& tiles,
                                                 const Rational& eps) {
  if (D.empty()) throw InvalidArgument("target set must be nonempty");
  for (std::size_t j = 0; j < tiles.size(); ++j) {
    if (tiles[j].empty() || !contains_identity(S, tiles[j]))
      throw InvalidArgument("tiles must be nonempty and contain the identity");
    if (j && tiles[j].size() > tiles[j - 1].size()) throw InvalidArgument("tiles must be sorted large to small");
  }
  TilingWitness w;
  w.tiles = tiles;
  std::unordered_set<MElement, CoordsHash> used;
  const std::int64_t p = eps.numerator(), q = eps.denominator();
  const auto d = static_cast<std::int64_t>(D.size());
  auto done = [&] { return mul_add(0, d - static_cast<std::int64_t>(used.size()), q) < mul_add(0, p, d); };
  for (const auto& F : tiles) {
    std::vector<MElement> P;
    for (const auto& s : D) {
      if (done()) break;
      if (used.count(s)) continue;
      bool fits = true;
      std::vector<MElement> img;
      img.reserve(F.size());
      for (const auto& f : F) {
        MElement x = S.mul(s, f);
        if (!D.contains(x) || used.count(x)) {
          fits = false;
          break;
        }
        img.push_back(std::move(x));
      }
      if (!fits) continue;
      for (auto& x : img) used.insert(std::move(x));
      P.push_back(s);
    }
    w.centers.emplace_back(std::move(P));
  }
  if (!done()) return std::nullopt;
  const TilingReport r = check_tiling(S, D, w, eps);
  if (!r.passed() || !r.translates_disjoint) throw std::logic_error("greedy tiler produced an invalid witness");
  return w;
}

// ---------------------------------------------------------------------------
// Filling theorem hypotheses
// ---------------------------------------------------------------------------

struct FillingReport {
  struct PairRow {
    std::size_t j, k;  // 1-based, j < k
    std::size_t boundary, size_k, size_j;
    bool holds;
  };
  struct TargetRow {
    std::size_t j;
    std::size_t boundary, size_d;
    bool holds;
  };
  std::vector<PairRow> pairs;     // |d_{F_j}(F_k)| / |F_k| <= eps^{2N} / |F_j|
  std::vector<TargetRow> target;  // |d_{F_j}(D)| / |D| <= eps^{2N}
  bool pairs_hold = true, target_holds = true;
};

inline FillingReport filling_hypotheses(const Monoid& S, const std::vector<MSubset>& tiles, const MSubset& D,
                                        const Rational& eps) {
  if (eps <= 0) throw InvalidArgument("epsilon must be positive");
  const std::size_t N = tiles.size();
  const BigCount pN = pow_count(eps.numerator(), 2 * N), qN = pow_count(eps.denominator(), 2 * N);
  FillingReport rep;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t k = j + 1; k < N; ++k) {
      const std::size_t bd = boundary(S, tiles[k], tiles[j]).size();
      // bd / |F_k| <= p^{2N} / (q^{2N} |F_j|)
      const bool ok = BigCount(bd) * qN * tiles[j].size() <= pN * tiles[k].size();
      rep.pairs.push_back({j + 1, k + 1, bd, tiles[k].size(), tiles[j].size(), ok});
      rep.pairs_hold = rep.pairs_hold && ok;
    }
  for (std::size_t j = 0; j < N; ++j) {
    const std::size_t bd = boundary(S, D, tiles[j]).size();
    const bool ok = BigCount(bd) * qN <= pN * D.size();
    rep.target.push_back({j + 1, bd, D.size(), ok});
    rep.target_holds = rep.target_holds && ok;
  }
  return rep;
}

}  // namespace amenact
