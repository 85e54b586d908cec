#include "amenact/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace amenact;

namespace {
MSubset range1(std::int64_t lo, std::int64_t hi) {
  std::vector<MElement> v;
  for (std::int64_t i = lo; i < hi; ++i) v.push_back({i});
  return MSubset(v);
}

Action bernoulli(std::int64_t p) {
  const auto A = AbelianGroup::direct_sum({p}, Monoid::integers());
  return Action::from_generators(Monoid::integers(), A, {Endomorphism::shift(A, {1})});
}

Subgroup at_zero(const AbelianGroup& A, Coords v) {
  return Subgroup::generated(A, std::vector<GroupElement>{A.single({0}, std::move(v))});
}
}  // namespace

TEST(HAlg, MultiplicationByFour) {
  const auto Z = AbelianGroup::free(1);
  const auto a = Action::from_generators(Monoid::naturals(), Z, {Endomorphism::scalar(Z, 4)});
  const auto e = H_alg_estimate(a, FiniteSubset::of(Z, {{0}, {1}}), box_net(Monoid::naturals()), 12);
  for (const auto& r : e.estimate.rows) {
    EXPECT_EQ(*r.exact, BigCount(1) << r.index);
    EXPECT_NEAR(r.ratio, std::log(2.0), 1e-12);
  }
  const auto wide = H_alg_estimate(a, FiniteSubset::of(Z, {{0}, {1}, {4}, {5}}), box_net(Monoid::naturals()), 12);
  for (const auto& r : wide.estimate.rows) {
    EXPECT_EQ(*r.exact, 4 * pow_count(3, r.index - 1));
    const double n = static_cast<double>(r.index);
    EXPECT_NEAR(r.ratio, (std::log(4.0) + (n - 1) * std::log(3.0)) / n, 1e-12);
  }
  // the closed count at n = 200
  EXPECT_NEAR((std::log(4.0) + 199 * std::log(3.0)) / 200, std::log(3.0), 0.02);
}

TEST(HAlg, BernoulliShiftIsLogP) {
  for (std::int64_t p : {2, 3, 5}) {
    const auto a = bernoulli(p);
    const auto e = H_alg_estimate(a, at_zero(a.group(), {1}), box_net(Monoid::integers()), 12);
    for (const auto& r : e.estimate.rows) {
      EXPECT_EQ(*r.exact, pow_count(static_cast<std::uint64_t>(p), 2 * r.index + 1));
      EXPECT_NEAR(r.ratio, std::log(static_cast<double>(p)), 1e-12);
    }
    const auto ent = ent_estimate(a, at_zero(a.group(), {1}), {}, box_net(Monoid::integers()), 12);
    EXPECT_TRUE(ent.certified);
    EXPECT_NEAR(ent.value, std::log(static_cast<double>(p)), 1e-12);
  }
}

TEST(HAlg, TrivialActionsVanish) {
  const auto A = AbelianGroup::finite({8});
  const auto a = Action::from_generators(Monoid::integers(), A, {Endomorphism::identity(A)});
  const auto e = H_alg_estimate(a, Subgroup::whole(A), box_net(Monoid::integers()), 64);
  for (const auto& r : e.estimate.rows) EXPECT_NEAR(r.ratio, std::log(8.0) / (2.0 * r.index + 1), 1e-12);
  EXPECT_LT(e.tail(), 0.02);
}

TEST(HAlg, FiniteMonoidGivesLogOrderOverSize) {
  const auto A = AbelianGroup::finite({5});
  const auto a = Action::from_generators(Monoid::finite({3}), A, {Endomorphism::identity(A)});
  EXPECT_NEAR(H_alg_estimate(a, Subgroup::whole(A), box_net(Monoid::finite({3})), 3).tail(), std::log(5.0) / 3, 1e-12);
  // cyclic shift on (Z/2)^(Z/3): the trajectory of e_0 fills the group
  const auto B = AbelianGroup::direct_sum({2}, Monoid::finite({3}));
  const auto s = Action::from_generators(Monoid::finite({3}), B, {Endomorphism::shift(B, {1})});
  EXPECT_NEAR(H_alg_estimate(s, at_zero(B, {1}), box_net(Monoid::finite({3})), 3).tail(), std::log(2.0), 1e-12);
}

TEST(HAlg, CsvColumns) {
  const auto a = bernoulli(2);
  const auto e = H_alg_estimate(a, at_zero(a.group(), {1}), box_net(Monoid::integers()), 2);
  EXPECT_EQ(e.csv(2).str(), "index,|F|,|T_F(X)|,ratio\n1,3,8,1.000000000000\n2,5,32,1.000000000000\n");
  EXPECT_EQ(e.seed, "<" + to_string(a.group().single({0}, {1}).data) + ">");
}

TEST(HAlg, TrajectoryLengthSatisfiesAxioms) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 6);
    const auto A = AbelianGroup::finite({n, 2});
    IntMatrix M(2, 2);
    M(0, 0) = static_cast<std::int64_t>(rng() % n);
    M(0, 1) = static_cast<std::int64_t>(rng() % 2) * (n % 2 == 0 ? n / 2 : 0);
    M(1, 0) = static_cast<std::int64_t>(rng() % 2);
    M(1, 1) = static_cast<std::int64_t>(rng() % 2);
    if (n % 2 != 0) M(1, 0) = 0;
    const auto a = Action::from_generators(Monoid::naturals(), A, {Endomorphism::matrix(A, M)});
    const auto X = FiniteSubset::of(A, {{0, 0}, {static_cast<std::int64_t>(rng() % n), 1}});
    const auto rep = sample_axioms(trajectory_length(a, X), 20, 3, static_cast<std::uint64_t>(t) + 1);
    ASSERT_TRUE(rep.passed()) << rep.violations.front().axiom;
  }
}

TEST(Ent, RejectsNonTorsion) {
  const auto Z = AbelianGroup::free(1);
  const auto a = Action::from_generators(Monoid::naturals(), Z, {Endomorphism::scalar(Z, 2)});
  EXPECT_THROW(ent_estimate(a, std::nullopt, {}, box_net(Monoid::naturals()), 4), InvalidArgument);
}

TEST(Ent, UncertifiedFallsBackToLowerBound) {
  const auto A = AbelianGroup::direct_sum({2}, Monoid::integers());
  const auto a = Action::from_generators(Monoid::integers(), A, {Endomorphism::identity(A)});
  const auto X = at_zero(A, {1});
  const auto r = ent_estimate(a, X, {X}, box_net(Monoid::integers()), 16);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.estimates.size(), 2u);
  EXPECT_NEAR(r.value, std::log(2.0) / 33.0, 1e-12);
  EXPECT_THROW(ent_estimate(a, std::nullopt, {}, box_net(Monoid::integers()), 4), InvalidArgument);
}

TEST(Restriction, EvenTranslations) {
  const auto a = bernoulli(3);
  const Monoid Z = Monoid::integers();
  const auto r = restriction(a, MonoidEmbedding{Z, Z, IntMatrix::from_rows({{2}})});
  const auto& A = a.group();
  const auto X = Subgroup::generated(A, std::vector<GroupElement>{A.single({0}, {1}), A.single({1}, {1})});
  const auto e = H_alg_estimate(r, X, box_net(Z), 10);
  for (const auto& row : e.estimate.rows) {
    EXPECT_EQ(*row.exact, pow_count(3, 2 * (2 * row.index + 1)));
    EXPECT_NEAR(row.ratio, 2 * std::log(3.0), 1e-12);
  }
  EXPECT_THROW(restriction(a, MonoidEmbedding{Z, Z, IntMatrix::from_rows({{0}})}), InvalidArgument);
  const Monoid N = Monoid::naturals();
  const auto Zq = AbelianGroup::free(1);
  const auto m = Action::from_generators(N, Zq, {Endomorphism::scalar(Zq, 2)});
  EXPECT_THROW(restriction(m, MonoidEmbedding{N, N, IntMatrix::from_rows({{-1}})}), InvalidArgument);
  EXPECT_NO_THROW(restriction(m, MonoidEmbedding{N, N, IntMatrix::from_rows({{3}})}));
}

TEST(SubQuotient, InvariantSubgroupRequired) {
  const auto a = bernoulli(2);
  EXPECT_THROW(quotient_and_sub_actions(a, at_zero(a.group(), {1})), NotInvariant);
}

TEST(SubQuotient, QuotientOfTrivialAction) {
  const auto A = AbelianGroup::finite({4});
  const auto a = Action::from_generators(Monoid::integers(), A, {Endomorphism::scalar(A, 3)});
  const auto ind = quotient_and_sub_actions(a, Subgroup::multiples(A, 2));
  EXPECT_EQ(ind.quotient.group(), AbelianGroup::finite({2}));
  // 3 acts as the identity on Z/2
  const auto e = H_alg_estimate(ind.quotient, Subgroup::whole(ind.quotient.group()), box_net(Monoid::integers()), 8);
  for (const auto& r : e.estimate.rows) EXPECT_NEAR(r.ratio, std::log(2.0) / (2.0 * r.index + 1), 1e-12);
}

TEST(SubQuotient, AdditionIsExactForBernoulliOverZ4) {
  const auto a = bernoulli(4);
  const auto& A = a.group();
  const auto B = Subgroup::multiples(A, 2);
  const auto ind = quotient_and_sub_actions(a, B);
  const auto rep = addition_check(a, B, at_zero(A, {1}), at_zero(A, {2}), at_zero(ind.quotient.group(), {1}),
                                  box_net(Monoid::integers()), 10);
  EXPECT_TRUE(rep.whole_certified);
  EXPECT_TRUE(rep.sub_certified);
  EXPECT_TRUE(rep.quotient_certified);
  EXPECT_TRUE(rep.exact_everywhere());
  EXPECT_EQ(rep.residual_tail(), 0.0);
  EXPECT_NEAR(rep.whole.tail(), std::log(4.0), 1e-12);
  EXPECT_NEAR(rep.sub.tail() + rep.quotient.tail(), std::log(4.0), 1e-12);
  EXPECT_THROW(addition_check(a, B, at_zero(A, {1}), at_zero(A, {1}), at_zero(ind.quotient.group(), {1}),
                              box_net(Monoid::integers()), 4),
               InvalidArgument);
}

TEST(Conjugation, NegationPreservesCounts) {
  const auto a = bernoulli(3);
  const auto& A = a.group();
  const Monoid Z = Monoid::integers();
  const auto xi = GroupIso::make(A, A, IntMatrix::from_rows({{2}}));
  const auto eta = MonoidIso::make(Z, Z, IntMatrix::from_rows({{-1}}));
  const auto b = conjugate_action(a, xi, eta);
  const FiniteSubset seed(std::vector<GroupElement>{A.zero(), A.single({0}, {1}), A.single({2}, {2})});
  for (std::int64_t n = 1; n <= 5; ++n)
    for (std::int64_t lo : {-2, 0, 3}) {
      const auto F = range1(lo, lo + n);
      EXPECT_EQ(seed_trajectory_size(b, eta.apply(F), xi.apply(seed)), seed_trajectory_size(a, F, seed));
    }
  // xi alpha(s) = beta(eta s) xi
  for (const auto& s : Z.window(3))
    for (const auto& x : seed) EXPECT_EQ(xi.apply(a.apply(s, x)), b.apply(eta.apply(s), xi.apply(x)));
  EXPECT_THROW(GroupIso::make(A, A, IntMatrix::from_rows({{0}})), InvalidArgument);
  EXPECT_THROW(MonoidIso::make(Z, Z, IntMatrix::from_rows({{2}})), InvalidArgument);
  EXPECT_THROW(MonoidIso::make(Monoid::naturals(), Monoid::naturals(), IntMatrix::from_rows({{-1}})), InvalidArgument);
}

TEST(Conjugation, FreeGroupSign) {
  const auto Z = AbelianGroup::free(1);
  const Monoid N = Monoid::naturals();
  const auto a = Action::from_generators(N, Z, {Endomorphism::scalar(Z, 4)});
  const auto b = conjugate_action(a, GroupIso::make(Z, Z, IntMatrix::from_rows({{-1}})),
                                  MonoidIso::make(N, N, IntMatrix::from_rows({{1}})));
  const auto X = FiniteSubset::of(Z, {{0}, {1}}), Y = FiniteSubset::of(Z, {{0}, {-1}});
  for (std::int64_t n = 1; n <= 8; ++n)
    EXPECT_EQ(trajectory_size(b, range1(0, n), Y), trajectory_size(a, range1(0, n), X));
}

TEST(Nilpotent, TruncatingShiftHasZeroEntropy) {
  const auto A = AbelianGroup::direct_sum({2}, Monoid::naturals());
  const auto a = Action::from_generators(Monoid::naturals(), A, {Endomorphism::shift(A, {-1}, true)});
  const FiniteSubset X(std::vector<GroupElement>{A.zero(), A.single({3}, {1}), A.single({1}, {1})});
  const auto r = locally_nilpotent_probe(a, X, 20);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.annihilator, MElement{4});
  ASSERT_TRUE(r.shifted_estimate);
  for (const auto& row : r.shifted_estimate->estimate.rows) {
    EXPECT_EQ(*row.exact, BigCount(1));
    EXPECT_EQ(row.ratio, 0.0);
  }
  const auto g = bernoulli(2);
  EXPECT_TRUE(locally_nilpotent_probe(g, FiniteSubset(std::vector<GroupElement>{g.group().single({0}, {1})}), 4).group_family);
  const auto zero = AbelianGroup::finite({1});
  const auto z = Action::from_generators(Monoid::integers(), zero, {Endomorphism::identity(zero)});
  EXPECT_TRUE(locally_nilpotent_probe(z, FiniteSubset::of(zero, {{0}}), 4).zero_group);
  // the right shift never annihilates anything
  const auto right = Action::from_generators(Monoid::naturals(), A, {Endomorphism::shift(A, {1})});
  EXPECT_FALSE(locally_nilpotent_probe(right, X, 4).found);
}
