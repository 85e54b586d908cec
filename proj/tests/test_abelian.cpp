#include "amenact/abelian.hpp"
#include "brute.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace amenact;

namespace {
FiniteSubset ints(const AbelianGroup& A, std::initializer_list<std::int64_t> xs) {
  std::vector<Coords> c;
  for (auto x : xs) c.push_back({x});
  return FiniteSubset::of(A, c);
}
}  // namespace

TEST(Abelian, MinkowskiSum) {
  auto Z = AbelianGroup::free(1);
  EXPECT_EQ(minkowski_sum(Z, ints(Z, {0, 1}), ints(Z, {0, 4})), ints(Z, {0, 1, 4, 5}));
  EXPECT_EQ(minkowski_sum(Z, ints(Z, {3, 7}), ints(Z, {0})), ints(Z, {3, 7}));
  EXPECT_EQ(iterated_sum(Z, ints(Z, {0, 1}), 3), ints(Z, {0, 1, 2, 3}));
  EXPECT_THROW(minkowski_sum(Z, ints(Z, {0}), FiniteSubset::of(AbelianGroup::free(2), {{0, 0}})), MismatchError);
}

TEST(Abelian, Ell) {
  auto Z = AbelianGroup::free(1);
  EXPECT_EQ(ell(ints(Z, {0})), 0.0);
  auto Z8 = AbelianGroup::finite({8});
  EXPECT_DOUBLE_EQ(ell(Subgroup::whole(Z8).as_set()), std::log(8.0));
  EXPECT_DOUBLE_EQ(ell(ints(Z, {0, 1, 4, 5})), std::log(4.0));
}

TEST(Abelian, SubgroupJoinAndOrder) {
  auto V = AbelianGroup::finite({2, 2});
  auto j = subgroup_join(Subgroup::generated(V, std::vector<Coords>{{1, 0}}), Subgroup::generated(V, std::vector<Coords>{{0, 1}}));
  EXPECT_EQ(*j.order(), BigCount(4));
  auto Z12 = AbelianGroup::finite({12});
  auto j2 = subgroup_join(Subgroup::generated(Z12, std::vector<Coords>{{2}}), Subgroup::generated(Z12, std::vector<Coords>{{3}}));
  EXPECT_EQ(*j2.order(), BigCount(12));
  auto B = Subgroup::generated(Z12, std::vector<Coords>{{4}});
  EXPECT_TRUE(subgroup_join(B, Subgroup::trivial(Z12)) == B);
  EXPECT_EQ(*Subgroup::generated(AbelianGroup::finite({8}), std::vector<Coords>{{2}}).order(), BigCount(4));
  EXPECT_EQ(*Subgroup::trivial(Z12).order(), BigCount(1));
  EXPECT_FALSE(Subgroup::generated(AbelianGroup::free(2), std::vector<Coords>{{2, 0}, {0, 2}}).order().has_value());
}

TEST(Abelian, SubgroupOrderMatchesEnumerationUpTo64) {
  std::mt19937_64 rng(1);
  for (const auto& mod : std::vector<std::vector<std::int64_t>>{{64}, {2, 32}, {4, 16}, {2, 2, 16}, {3, 21}, {2, 2, 2, 2, 2, 2}, {6, 6}}) {
    brute::FiniteGroup G{mod};
    auto A = AbelianGroup::finite(mod);
    for (int t = 0; t < 50; ++t) {
      std::vector<std::size_t> codes{rng() % G.order(), rng() % G.order()};
      std::vector<Coords> gens;
      for (auto c : codes) gens.push_back(G.decode(c));
      auto B = Subgroup::generated(A, gens);
      auto cl = brute::closure(G, codes);
      ASSERT_EQ(*B.order(), BigCount(cl.size()));
      ASSERT_EQ(B.elements().size(), cl.size());
    }
  }
}

TEST(Abelian, RelEll) {
  auto Z = AbelianGroup::free(1);
  auto twoZ = Subgroup::generated(Z, std::vector<Coords>{{2}});
  EXPECT_DOUBLE_EQ(rel_ell(ints(Z, {0, 1, 2, 3}), twoZ), std::log(2.0));
  EXPECT_DOUBLE_EQ(rel_ell(ints(Z, {0, 2, 6}), twoZ), 0.0);
  auto Z8 = AbelianGroup::finite({8});
  auto four = Subgroup::generated(Z8, std::vector<Coords>{{4}});
  EXPECT_DOUBLE_EQ(rel_ell(FiniteSubset::of(Z8, {{0}, {1}, {4}, {5}}), four), std::log(2.0));
}

TEST(Abelian, DirectSumArithmetic) {
  auto A = AbelianGroup::direct_sum({4}, Monoid::integers());
  auto x = A.single({3}, {1});
  auto y = A.single({-2}, {3});
  auto s = A.add(x, y);
  EXPECT_EQ(A.support_size(s), 2u);
  EXPECT_TRUE(A.is_zero(A.add(s, A.neg(s))));
  EXPECT_TRUE(A.is_zero(A.scale(x, 4)));
  EXPECT_EQ(A.add(x, x), A.single({3}, {2}));
  EXPECT_TRUE(A.contains(s));
  EXPECT_FALSE(A.contains(GroupElement{{3, 0}}));  // zero value in support
}

TEST(Abelian, Quotients) {
  auto Z4 = AbelianGroup::finite({4});
  auto q = quotient_group(Z4, Subgroup::generated(Z4, std::vector<Coords>{{2}}));
  EXPECT_EQ(q.group, AbelianGroup::finite({2}));
  auto A = AbelianGroup::direct_sum({4}, Monoid::integers());
  auto qa = quotient_group(A, Subgroup::multiples(A, 2));
  EXPECT_EQ(qa.group, AbelianGroup::direct_sum({2}, Monoid::integers()));
  EXPECT_EQ(qa.project(A.single({5}, {3})), qa.group.single({5}, {1}));
  EXPECT_TRUE(qa.group.is_zero(qa.project(A.single({5}, {2}))));
  auto Z = AbelianGroup::free(1);
  auto qz = quotient_group(Z, Subgroup::generated(Z, std::vector<Coords>{{5}}));
  EXPECT_EQ(qz.group, AbelianGroup::finite({5}));
  EXPECT_EQ(qz.project(Z.element({7})).data, (Coords{2}));
  auto Z2 = AbelianGroup::free(2);
  EXPECT_THROW(quotient_group(Z2, Subgroup::generated(Z2, std::vector<Coords>{{2, 0}})), UnsupportedError);
  auto qc = quotient_group(Z2, Subgroup::generated(Z2, std::vector<Coords>{{1, 0}}));
  EXPECT_EQ(qc.group, AbelianGroup::free(1));
}

TEST(Abelian, QuotientProjectionKernelIsB) {
  std::mt19937_64 rng(4);
  brute::FiniteGroup G{{4, 6, 2}};
  auto A = AbelianGroup::finite(G.mod);
  for (int t = 0; t < 30; ++t) {
    auto B = Subgroup::generated(A, std::vector<Coords>{G.decode(rng() % G.order()), G.decode(rng() % G.order())});
    auto q = quotient_group(A, B);
    ASSERT_EQ(*q.group.order() * *B.order(), BigCount(G.order()));
    for (std::size_t c = 0; c < G.order(); ++c) {
      auto x = A.element(G.decode(c));
      ASSERT_EQ(q.group.is_zero(q.project(x)), B.contains(x));
      // lift is a section
      auto p = q.project(x);
      ASSERT_EQ(q.project(q.lift(p)), p);
    }
  }
}

TEST(Abelian, LengthFunctionLaws) {
  std::mt19937_64 rng(8);
  auto A = AbelianGroup::finite({4, 6});
  brute::FiniteGroup G{{4, 6}};
  auto rnd_set = [&](bool zero) {
    std::vector<GroupElement> v;
    if (zero) v.push_back(A.zero());
    for (int i = 0; i < 3; ++i) v.push_back(A.element(G.decode(rng() % G.order())));
    return FiniteSubset(v);
  };
  auto rnd_sub = [&] { return Subgroup::generated(A, std::vector<Coords>{G.decode(rng() % G.order())}); };
  for (int t = 0; t < 200; ++t) {
    auto X = rnd_set(true), Y = rnd_set(false);
    auto C = rnd_sub(), C2 = rnd_sub();
    ASSERT_LE(ell(minkowski_sum(A, X, Y)), ell(X) + ell(Y) + 1e-12);
    ASSERT_NEAR(ell(minkowski_sum(A, X, C.as_set())), rel_ell(X, C) + C.log_order(), 1e-12);
    ASSERT_LE(rel_ell(minkowski_sum(A, X, Y), subgroup_join(C, C2)), rel_ell(X, C) + rel_ell(Y, C2) + 1e-12);
    // decreasing in B, increasing in Y
    ASSERT_LE(rel_ell(X, subgroup_join(C, C2)), rel_ell(X, C) + 1e-12);
    ASSERT_LE(rel_ell(X, C), rel_ell(set_union(X, Y), C) + 1e-12);
    // l(C, B) = l(C, B cap C)
    auto Cs = C.as_set();
    auto cap_elems = std::vector<GroupElement>{};
    for (const auto& g : Cs)
      if (C2.contains(g)) cap_elems.push_back(g);
    auto cap = Subgroup::generated(A, cap_elems);
    ASSERT_NEAR(rel_ell(Cs, C2), rel_ell(Cs, cap), 1e-12);
  }
}
