#include "amenact/monoid.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace amenact;

namespace {
MSubset interval1(std::int64_t lo, std::int64_t hi) {
  std::vector<MElement> v;
  for (std::int64_t i = lo; i < hi; ++i) v.push_back({i});
  return MSubset(v);
}
MSubset square(std::int64_t m) {
  std::vector<MElement> v;
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < m; ++j) v.push_back({i, j});
  return MSubset(v);
}
}  // namespace

TEST(Monoid, SetProduct) {
  Monoid N = Monoid::naturals();
  EXPECT_EQ(set_product(N, interval1(0, 2), interval1(0, 2)), interval1(0, 3));
  EXPECT_EQ(set_product(N, interval1(3, 7), MSubset{{0}}), interval1(3, 7));
  Monoid G = Monoid::semidirect();
  // (0,0,1)*(1,0,0) = ((0,0) + M^1 (1,0), 1) with M^1 (1,0) = (1,0)
  EXPECT_EQ(set_product(G, MSubset{{0, 0, 0}, {0, 0, 1}}, MSubset{{1, 0, 0}}), (MSubset{{1, 0, 0}, {1, 0, 1}}));
  // (0,0,1)*(0,1,0) picks up the twist: M (0,1) = (1,1)
  EXPECT_EQ(G.mul({0, 0, 1}, {0, 1, 0}), (MElement{1, 1, 1}));
  EXPECT_THROW(set_product(N, interval1(-1, 1), interval1(0, 1)), MismatchError);
}

TEST(Monoid, SemidirectGroupLaws) {
  Monoid G = Monoid::semidirect();
  std::mt19937_64 rng(3);
  auto rnd = [&] {
    return MElement{static_cast<std::int64_t>(rng() % 11) - 5, static_cast<std::int64_t>(rng() % 11) - 5,
                    static_cast<std::int64_t>(rng() % 11) - 5};
  };
  for (int t = 0; t < 300; ++t) {
    auto a = rnd(), b = rnd(), c = rnd();
    ASSERT_EQ(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c)));
    ASSERT_EQ(G.mul(a, *G.inverse(a)), G.identity());
    ASSERT_EQ(G.mul(*G.inverse(a), a), G.identity());
  }
  EXPECT_FALSE(G.is_commutative());
  EXPECT_THROW(Monoid::semidirect({2, 0, 0, 1}), InvalidArgument);
}

TEST(Monoid, OppositeSwapsProducts) {
  Monoid G = Monoid::semidirect();
  Monoid Gop = G.opposite();
  EXPECT_EQ(Gop.mul({0, 0, 1}, {0, 1, 0}), G.mul({0, 1, 0}, {0, 0, 1}));
}

TEST(Monoid, NonCancellativeRejected) {
  EXPECT_THROW(Monoid::collapsing_half_plane(), InvalidArgument);
  EXPECT_FALSE(Monoid::capped(2).is_cancellative());
}

TEST(Monoid, SymDiffRatio) {
  Monoid Z = Monoid::integers();
  EXPECT_EQ(sym_diff_ratio_exact(Z, interval1(0, 10), {1}), Rational(2, 10));
  EXPECT_EQ(sym_diff_ratio_exact(Z, interval1(0, 10), {0}), Rational(0));
  Monoid Z2 = Monoid::integers(2);
  EXPECT_EQ(sym_diff_ratio_exact(Z2, square(4), {1, 0}), Rational(1, 2));
}

TEST(Monoid, EpsEquiv) {
  auto a = interval1(0, 10), b = interval1(1, 11);
  EXPECT_TRUE(eps_equiv(a, a, Rational(1, 100)));
  EXPECT_TRUE(eps_equiv(a, b, Rational(1, 5)));
  EXPECT_FALSE(eps_equiv(a, b, Rational(1, 10)));
  EXPECT_FALSE(eps_equiv(a, interval1(0, 9), Rational(1)));
}

TEST(Monoid, Boundary) {
  Monoid Z2 = Monoid::integers(2);
  auto D = square(5);
  auto B = boundary(Z2, D, MSubset{{1, 0}});
  std::vector<MElement> col;
  for (std::int64_t j = 0; j < 5; ++j) col.push_back({4, j});
  EXPECT_EQ(B, MSubset(col));
  EXPECT_TRUE(boundary(Z2, D, MSubset{{0, 0}}).empty());
  EXPECT_EQ(boundary(Monoid::naturals(), interval1(0, 7), MSubset{{1}}), MSubset{{6}});
}

TEST(MonoidHom, Fibers) {
  auto pi = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({3}), {0});
  EXPECT_EQ(fiber(pi, {1}, 10), (MSubset{{1}, {4}, {7}}));
  auto p2 = MonoidHom::projection(Monoid::product({Monoid::finite({2}), Monoid::integers()}), {1});
  EXPECT_EQ(fiber(p2, {5}, 1), (MSubset{{0, 5}, {1, 5}}));
  auto p3 = MonoidHom::projection(Monoid::integers(2), {0});
  std::vector<MElement> col;
  for (std::int64_t j = -3; j <= 3; ++j) col.push_back({0, j});
  EXPECT_EQ(fiber(p3, {0}, 3), MSubset(col));
}

TEST(MonoidHom, GoodElements) {
  auto pi = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({3}), {0});
  EXPECT_TRUE(is_good_element(pi, {1}));
  EXPECT_FALSE(is_good_element(pi, {4}));
  auto grp = MonoidHom::coordinate_map(Monoid::integers(), Monoid::finite({5}), {0});
  for (std::int64_t s = -7; s <= 7; ++s) EXPECT_TRUE(is_good_element(grp, {s}));
  auto capped = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::capped(2), {0});
  EXPECT_TRUE(is_good_element(capped, {0}));
  EXPECT_TRUE(is_good_element(capped, {1}));
  for (std::int64_t s = 2; s < 6; ++s) EXPECT_FALSE(is_good_element(capped, {s}));
}

TEST(MonoidHom, GoodSections) {
  auto pi = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({4}), {0});
  auto sigma = find_good_section(pi);
  ASSERT_TRUE(sigma);
  for (std::int64_t c = 0; c < 4; ++c) EXPECT_EQ((*sigma)({c}), (MElement{c}));

  auto prod = MonoidHom::projection(Monoid::naturals(2), {1});
  auto sp = find_good_section(prod);
  ASSERT_TRUE(sp);
  EXPECT_EQ((*sp)({5}), (MElement{0, 5}));

  auto capped = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::capped(2), {0});
  EXPECT_FALSE(find_good_section(capped).has_value());

  auto sd = MonoidHom::semidirect_projection(Monoid::semidirect());
  auto ss = find_good_section(sd);
  ASSERT_TRUE(ss);
  EXPECT_EQ((*ss)({3}), (MElement{0, 0, 3}));
}

TEST(MonoidHom, GoodSectionBijection) {
  // (n, c) -> n sigma(c) is injective and covers the window
  auto pi = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({3}), {0});
  auto sigma = *find_good_section(pi);
  auto ker = pi.kernel();
  std::set<MElement> img;
  for (std::int64_t n = 0; n < 10; ++n)
    for (std::int64_t c = 0; c < 3; ++c) {
      auto s = pi.source().mul(ker.embed({n}), sigma({c}));
      EXPECT_TRUE(img.insert(s).second);
    }
  for (std::int64_t s = 0; s < 30; ++s) EXPECT_TRUE(img.count({s}));
}

TEST(MonoidHom, FiberConjugation) {
  auto pi = MonoidHom::coordinate_map(Monoid::integers(2), Monoid::integers(), {1});
  EXPECT_EQ(fiber_conjugation(pi, {0, 3}, {4, 0}), (MElement{4, 0}));
  Monoid G = Monoid::semidirect();
  auto sd = MonoidHom::semidirect_projection(G);
  for (std::int64_t c = -3; c <= 3; ++c)
    for (std::int64_t v1 = -2; v1 <= 2; ++v1)
      for (std::int64_t v2 = -2; v2 <= 2; ++v2) {
        MElement s{0, 0, c}, n{v1, v2, 0};
        auto h = fiber_conjugation(sd, s, n);
        ASSERT_EQ(G.mul(n, s), G.mul(s, h));
        ASSERT_EQ(h[2], 0);
      }
  EXPECT_EQ(fiber_conjugation(sd, {0, 0, 2}, {0, 0, 0}), (MElement{0, 0, 0}));
  auto bad = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({3}), {0});
  EXPECT_THROW(fiber_conjugation(bad, {4}, {3}), NotGoodSection);
}

TEST(MonoidHom, Kernels) {
  auto pi = MonoidHom::coordinate_map(Monoid::naturals(), Monoid::finite({3}), {0});
  auto k = pi.kernel();
  EXPECT_EQ(k.monoid, Monoid::naturals());
  EXPECT_EQ(k.embed({2}), (MElement{6}));
  auto sd = MonoidHom::semidirect_projection(Monoid::semidirect());
  EXPECT_EQ(sd.kernel().embed({1, 2}), (MElement{1, 2, 0}));
}

TEST(Monoid, CancellativityOnSamples) {
  std::mt19937_64 rng(9);
  for (const auto& S : {Monoid::naturals(2), Monoid::integers(1), Monoid::finite({3, 4}), Monoid::semidirect()}) {
    auto W = S.window(3);
    for (int t = 0; t < 50; ++t) {
      std::vector<MElement> f;
      for (int i = 0; i < 6; ++i) f.push_back(W[rng() % W.size()]);
      MSubset F(f);
      auto s = W[rng() % W.size()];
      ASSERT_EQ(right_translate(S, F, s).size(), F.size());
    }
  }
}

TEST(Monoid, MultiOreForNaturals) {
  // t = componentwise max of s_1..s_k satisfies t = r_i + s_i with r_i in N^d
  std::vector<MElement> s = {{1, 4}, {3, 0}, {2, 2}};
  MElement t{0, 0};
  for (auto& x : s)
    for (std::size_t j = 0; j < 2; ++j) t[j] = std::max(t[j], x[j]);
  Monoid N2 = Monoid::naturals(2);
  for (auto& x : s) {
    MElement r{t[0] - x[0], t[1] - x[1]};
    ASSERT_TRUE(N2.contains(r));
    ASSERT_EQ(N2.mul(r, x), t);
  }
}
