#include "amenact/duality.hpp"

#include <gtest/gtest.h>

#include <random>

#include "brute.hpp"

using namespace amenact;

namespace {
MSubset range1(std::int64_t lo, std::int64_t hi) {
  std::vector<MElement> v;
  for (std::int64_t i = lo; i < hi; ++i) v.push_back({i});
  return MSubset(v);
}

Subgroup gen(const AbelianGroup& A, std::vector<Coords> g) { return Subgroup::generated(A, g); }

std::uint64_t mask_of(const Subgroup& B) {
  const brute::FiniteGroup G{B.group().moduli()};
  std::uint64_t m = 0;
  for (const auto& x : B.elements()) m |= std::uint64_t{1} << G.encode(x.data);
  return m;
}

/// A random endomorphism of prod Z/n_i: column j of M is the image of e_j,
/// which must be killed by n_j.
IntMatrix random_endomorphism(const std::vector<std::int64_t>& n, std::mt19937_64& rng) {
  const std::size_t k = n.size();
  IntMatrix M(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      // multiples of n_i / gcd(n_i, n_j) are exactly the values with n_j M(i,j) = 0 mod n_i
      const std::int64_t step = n[i] / std::gcd(n[i], n[j]);
      M(i, j) = step * static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n[i] / step));
    }
  return M;
}

/// [A^ : C_F(alpha^, B^perp)] by testing every character against alpha(s)(b).
BigCount brute_cotrajectory_index(const Action& a, const Subgroup& B, const MSubset& F) {
  const AbelianGroup& A = a.group();
  std::vector<GroupElement> moved;
  for (const auto& s : F)
    for (const auto& b : B.generators()) moved.push_back(a.apply(s, b));
  std::size_t inside = 0, total = 0;
  for (const auto& chi : A.enumerate()) {
    ++total;
    bool ok = true;
    for (const auto& x : moved) ok = ok && pairing(A, x, chi).numerator() == 0;
    inside += ok;
  }
  return BigCount(total / inside);
}
}  // namespace

TEST(Pairing, BiadditiveAndNondegenerate) {
  for (const auto& n : std::vector<std::vector<std::int64_t>>{{4}, {2, 6}, {8, 4}, {3, 3, 9}}) {
    const auto A = AbelianGroup::finite(n);
    const auto el = A.enumerate();
    for (const auto& x : el) {
      bool witness = A.is_zero(x);
      for (const auto& chi : el) {
        for (const auto& y : {el[1], el.back()})
          EXPECT_EQ(pairing(A, A.add(x, y), chi),
                    Rational(boost::rational_cast<double>(pairing(A, x, chi) + pairing(A, y, chi)) >= 1
                                 ? pairing(A, x, chi) + pairing(A, y, chi) - 1
                                 : pairing(A, x, chi) + pairing(A, y, chi)));
        witness = witness || pairing(A, x, chi).numerator() != 0;
      }
      EXPECT_TRUE(witness);
    }
  }
  EXPECT_EQ(pairing(AbelianGroup::finite({4}), AbelianGroup::finite({4}).element({2}), AbelianGroup::finite({4}).element({3})),
            Rational(1, 2));
}

TEST(Annihilator, Examples) {
  const auto Z4 = AbelianGroup::finite({4});
  const auto B = gen(Z4, {{2}});
  EXPECT_EQ(annihilator(B), B);
  EXPECT_EQ(*B.order() * *annihilator(B).order(), BigCount(4));
  EXPECT_EQ(annihilator(Subgroup::trivial(Z4)), Subgroup::whole(Z4));
  EXPECT_EQ(annihilator(Subgroup::whole(Z4)), Subgroup::trivial(Z4));
  const auto V = AbelianGroup::finite({2, 4});
  EXPECT_EQ(annihilator(gen(V, {{1, 0}})), gen(V, {{0, 1}}));
  EXPECT_THROW(annihilator(Subgroup::whole(AbelianGroup::finite({256, 512})), 1000), BudgetExceeded);
  EXPECT_THROW(annihilator(Subgroup::trivial(AbelianGroup::free(1))), UnsupportedError);
}

TEST(Annihilator, ThreeRoutesAgreeOnSmallGroups) {
  for (std::int64_t n = 1; n <= 64; ++n)
    for (const auto& f : abelian_groups_of_order(n)) {
      const auto A = AbelianGroup::finite(f);
      for (const auto& B : all_subgroups(A)) {
        const auto P = annihilator(B);
        ASSERT_EQ(P, annihilator_by_congruences(B)) << A.describe();
        if (n <= 32) {
          ASSERT_EQ(P, annihilator_by_enumeration(B)) << A.describe();
        }
        ASSERT_EQ(*B.order() * *P.order(), BigCount(n));
        ASSERT_EQ(annihilator(P), B);
      }
    }
}

TEST(SubgroupLattice, MatchesClosureEnumeration) {
  for (std::int64_t n = 1; n <= 32; ++n)
    for (const auto& f : abelian_groups_of_order(n)) {
      const auto A = AbelianGroup::finite(f);
      std::set<std::uint64_t> ours;
      for (const auto& B : all_subgroups(A)) ours.insert(mask_of(B));
      const auto theirs = brute::all_subgroups(brute::FiniteGroup{f});
      ASSERT_EQ(ours, std::set<std::uint64_t>(theirs.begin(), theirs.end())) << A.describe();
    }
}

TEST(SubgroupLattice, CountsAndGroups) {
  auto count = [](std::vector<std::int64_t> n) {
    std::size_t c = 0;
    for_each_subgroup_lattice(n, [&](const std::int64_t*) { ++c; });
    return c;
  };
  EXPECT_EQ(count({}), 1u);
  EXPECT_EQ(count({4}), 3u);
  EXPECT_EQ(count({2, 2}), 5u);
  EXPECT_EQ(count({2, 4}), 8u);
  EXPECT_EQ(count({2, 2, 2}), 16u);
  EXPECT_EQ(count({27}), 4u);
  EXPECT_EQ(abelian_groups_of_order(1).size(), 1u);
  EXPECT_EQ(abelian_groups_of_order(16).size(), 5u);
  EXPECT_EQ(abelian_groups_of_order(64).size(), 11u);
  EXPECT_EQ(abelian_groups_of_order(72).size(), 6u);
  for (const auto& f : abelian_groups_of_order(72)) {
    std::int64_t p = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
      p *= f[i];
      if (i > 0) {
        EXPECT_EQ(f[i] % f[i - 1], 0);
      }
    }
    EXPECT_EQ(p, 72);
  }
  std::size_t total = 0;
  for (std::int64_t n = 1; n <= 64; ++n)
    for (const auto& f : abelian_groups_of_order(n)) total += count(f);
  EXPECT_EQ(total, 6022u);
}

TEST(DualEndomorphism, ExamplesAndAdjointness) {
  const auto Z4 = AbelianGroup::finite({4});
  EXPECT_EQ(dual_endomorphism(Endomorphism::identity(Z4)), Endomorphism::identity(Z4));
  EXPECT_EQ(dual_endomorphism(Endomorphism::scalar(Z4, 3)), Endomorphism::scalar(Z4, 3));
  const auto V = AbelianGroup::finite({2, 2});
  const auto swap = Endomorphism::matrix(V, IntMatrix::from_rows({{0, 1}, {1, 0}}));
  EXPECT_EQ(dual_endomorphism(swap), swap);
  std::mt19937_64 rng(3);
  for (const auto& n : std::vector<std::vector<std::int64_t>>{{2, 4}, {4, 8}, {3, 9}, {2, 2, 4}, {6, 12}}) {
    const auto A = AbelianGroup::finite(n);
    const auto el = A.enumerate();
    for (int t = 0; t < 5; ++t) {
      const auto phi = Endomorphism::matrix(A, random_endomorphism(n, rng));
      const auto dphi = dual_endomorphism(phi);
      for (const auto& x : el)
        for (const auto& chi : el) ASSERT_EQ(pairing(A, phi.apply(x), chi), pairing(A, x, dphi.apply(chi)));
    }
  }
}

TEST(DualEndomorphism, ImageAnnihilatorIsPreimage) {
  std::mt19937_64 rng(8);
  for (const auto& n : std::vector<std::vector<std::int64_t>>{{2, 4}, {4, 4}, {3, 9}, {2, 2, 2}, {2, 6}}) {
    const auto A = AbelianGroup::finite(n);
    for (int t = 0; t < 6; ++t) {
      const auto phi = Endomorphism::matrix(A, random_endomorphism(n, rng));
      const auto a = Action::from_generators(Monoid::naturals(), A, {phi});
      const auto g = DualAction::of_finite(a);
      for (const auto& B : all_subgroups(A)) {
        const auto lhs = annihilator(phi.image(B));
        const auto rhs = g.preimage(OpenSubgroup::of(annihilator(B)), {1});
        ASSERT_EQ(lhs.lattice(), rhs.lattice());
      }
    }
  }
}

TEST(Intersection, SumLaw) {
  const auto A = AbelianGroup::finite({2, 4});
  const auto subs = all_subgroups(A);
  for (const auto& B1 : subs)
    for (const auto& B2 : subs) {
      const auto sum = subgroup_join(B1, B2);
      EXPECT_EQ(annihilator(sum), subgroup_intersection(annihilator(B1), annihilator(B2)));
    }
}

TEST(Cotrajectory, IdentityAndTrivialAction) {
  const auto A = AbelianGroup::finite({2, 4});
  const auto triv = Action::from_generators(Monoid::naturals(), A, {Endomorphism::identity(A)});
  const auto g = DualAction::of_finite(triv);
  for (const auto& B : all_subgroups(A)) {
    const auto U = OpenSubgroup::of(B);
    EXPECT_EQ(cotrajectory(g, MSubset{{0}}, U).lattice(), U.lattice());
    EXPECT_EQ(cotrajectory(g, range1(0, 5), U).lattice(), U.lattice());
    EXPECT_EQ(U.index() * *B.order(), BigCount(8));
  }
}

TEST(Cotrajectory, WindowedShift) {
  for (std::int64_t p : {2, 3}) {
    const auto A = AbelianGroup::direct_sum({p}, Monoid::naturals());
    const auto a = Action::from_generators(Monoid::naturals(), A, {Endomorphism::shift(A, {1})});
    const auto K = WindowedProfinite::box(A, 8);
    const auto g = DualAction::of_direct_sum(a, K);
    const auto U = K.vanishing({{0}});
    for (std::int64_t n = 1; n <= 8; ++n) {
      const auto C = cotrajectory(g, range1(0, n), U);
      std::vector<MElement> first;
      for (std::int64_t i = 0; i < n; ++i) first.push_back({i});
      EXPECT_EQ(C.lattice(), K.vanishing(first).lattice());
      EXPECT_EQ(C.index(), pow_count(p, static_cast<std::uint64_t>(n)));
    }
    try {
      cotrajectory(g, range1(0, 9), U);
      FAIL();
    } catch (const WindowEscape& e) {
      EXPECT_EQ(e.offending(), Coords{8});
    }
  }
}

TEST(Cotrajectory, WindowedPreimagesAreAnnihilators) {
  // gamma(s)^{-1}(<x>^perp) = <alpha(s) x>^perp for shifts with a base matrix
  const auto A = AbelianGroup::direct_sum({2, 4}, Monoid::integers());
  const auto a = Action::from_generators(Monoid::integers(), A,
                                         {Endomorphism::shift(A, {1}, IntMatrix::from_rows({{1, 2}, {0, 3}}))});
  const auto K = WindowedProfinite::box(A, 4);
  const auto g = DualAction::of_direct_sum(a, K);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 40; ++t) {
    const GroupElement x = A.add(A.single({static_cast<std::int64_t>(rng() % 3) - 1}, {1, 2}),
                                 A.single({static_cast<std::int64_t>(rng() % 3) - 1},
                                          {static_cast<std::int64_t>(rng() % 2), static_cast<std::int64_t>(rng() % 4)}));
    const MElement s{static_cast<std::int64_t>(rng() % 5) - 2};
    const auto X = Subgroup::generated(A, std::vector<GroupElement>{x});
    const auto moved = Subgroup::generated(A, std::vector<GroupElement>{a.apply(s, x)});
    EXPECT_EQ(g.preimage(K.annihilator(X), s).lattice(), K.annihilator(moved).lattice());
  }
}

TEST(Cotrajectory, RefinedCoverMatchesIndex) {
  std::mt19937_64 rng(12);
  for (const auto& n : std::vector<std::vector<std::int64_t>>{{2, 4}, {3, 9}, {2, 2, 2}, {4, 8}}) {
    const auto A = AbelianGroup::finite(n);
    for (int t = 0; t < 4; ++t) {
      const auto a =
          Action::from_generators(Monoid::naturals(), A, {Endomorphism::matrix(A, random_endomorphism(n, rng))});
      const auto g = DualAction::of_finite(a);
      for (const auto& B : all_subgroups(A)) {
        const auto U = OpenSubgroup::of(B);
        for (std::int64_t k = 1; k <= 3; ++k)
          ASSERT_EQ(BigCount(refined_cover_size(g, range1(0, k), U)), cotrajectory(g, range1(0, k), U).index());
      }
    }
  }
  // the same on a window
  const auto S = AbelianGroup::direct_sum({2}, Monoid::naturals());
  const auto sh = Action::from_generators(Monoid::naturals(), S, {Endomorphism::shift(S, {1})});
  const auto K = WindowedProfinite::box(S, 6);
  const auto g = DualAction::of_direct_sum(sh, K);
  const auto U = K.vanishing({{0}, {2}});
  EXPECT_EQ(BigCount(refined_cover_size(g, range1(0, 3), U)), cotrajectory(g, range1(0, 3), U).index());
  EXPECT_EQ(cotrajectory(g, range1(0, 3), U).index(), BigCount(32));
}

TEST(HTop, Estimates) {
  const auto S = AbelianGroup::direct_sum({3}, Monoid::naturals());
  const auto sh = Action::from_generators(Monoid::naturals(), S, {Endomorphism::shift(S, {1})});
  const auto K = WindowedProfinite::box(S, 12);
  const auto g = DualAction::of_direct_sum(sh, K);
  const auto e = H_top_estimate(g, K.vanishing({{0}}), box_net(Monoid::naturals()), 12);
  for (const auto& r : e.rows) EXPECT_NEAR(r.ratio, std::log(3.0), 1e-12);
  try {
    H_top_estimate(g, K.vanishing({{0}}), box_net(Monoid::naturals()), 20);
    FAIL();
  } catch (const WindowEscape& err) {
    EXPECT_EQ(err.completed(), 12u);
  }
  // trivial action on a finite dual
  const auto A = AbelianGroup::finite({2, 4});
  const auto triv = Action::from_generators(Monoid::integers(), A, {Endomorphism::identity(A)});
  const auto t = H_top_estimate(DualAction::of_finite(triv), OpenSubgroup::of(Subgroup::trivial(A)),
                                box_net(Monoid::integers()), 30);
  for (const auto& r : t.rows) EXPECT_NEAR(r.ratio, std::log(8.0) / (2.0 * r.index + 1), 1e-12);
  // finite S: cyclic permutation of (Z/2)^3, U = {chi_0 = 0}, C_S = 0
  const auto V = AbelianGroup::finite({2, 2, 2});
  const auto cyc = Action::from_generators(Monoid::finite({3}), V,
                                           {Endomorphism::matrix(V, IntMatrix::from_rows({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}))});
  const auto U = OpenSubgroup::of(gen(V, {{0, 1, 0}, {0, 0, 1}}));
  EXPECT_NEAR(H_top_estimate(DualAction::of_finite(cyc), U, box_net(Monoid::finite({3})), 3).tail(), std::log(8.0) / 3,
              1e-12);
}

TEST(CtCheck, Examples) {
  const auto V = AbelianGroup::finite({2, 2});
  const auto sw =
      Action::from_generators(Monoid::naturals(), V, {Endomorphism::matrix(V, IntMatrix::from_rows({{0, 1}, {1, 0}}))});
  auto r = ct_check(sw, gen(V, {{1, 0}}), range1(0, 2));
  EXPECT_EQ(r.trajectory, BigCount(4));
  EXPECT_EQ(r.index, BigCount(4));
  EXPECT_EQ(brute_cotrajectory_index(sw, gen(V, {{1, 0}}), range1(0, 2)), BigCount(4));
  r = ct_check(sw, Subgroup::whole(V), range1(0, 3));
  EXPECT_TRUE(r.equal());
  EXPECT_EQ(r.index, BigCount(4));
  r = ct_check(sw, gen(V, {{1, 1}}), MSubset{{0}});
  EXPECT_EQ(r.trajectory, BigCount(2));
  EXPECT_TRUE(r.equal());
}

TEST(CtCheck, AgreesWithCharacterEnumeration) {
  std::mt19937_64 rng(99);
  for (std::int64_t n = 2; n <= 16; ++n)
    for (const auto& f : abelian_groups_of_order(n)) {
      const auto A = AbelianGroup::finite(f);
      const auto subs = all_subgroups(A);
      for (int t = 0; t < 3; ++t) {
        const auto a =
            Action::from_generators(Monoid::naturals(), A, {Endomorphism::matrix(A, random_endomorphism(f, rng))});
        const auto g = DualAction::of_finite(a);
        for (const auto& B : subs) {
          const auto U = OpenSubgroup::of(annihilator(B));
          for (std::int64_t k = 1; k <= 3; ++k) {
            const auto r = ct_check(a, g, B, U, range1(0, k));
            ASSERT_TRUE(r.equal()) << A.describe();
            ASSERT_EQ(r.index, brute_cotrajectory_index(a, B, range1(0, k)));
          }
        }
      }
    }
}

TEST(Bridge, ShiftAgainstWindowedDual) {
  for (std::int64_t p : {2, 5}) {
    const auto A = AbelianGroup::direct_sum({p}, Monoid::naturals());
    const auto a = Action::from_generators(Monoid::naturals(), A, {Endomorphism::shift(A, {1})});
    const auto B = Subgroup::generated(A, std::vector<GroupElement>{A.single({0}, {1})});
    const auto rep = bridge_check_windowed(a, B, box_net(Monoid::naturals()), 10, 12);
    EXPECT_TRUE(rep.exact_everywhere());
    EXPECT_NEAR(rep.algebraic.tail(), std::log(static_cast<double>(p)), 1e-12);
    EXPECT_NEAR(rep.topological.tail(), std::log(static_cast<double>(p)), 1e-12);
    EXPECT_EQ(rep.tail_difference(), 0.0);
  }
}

TEST(Bridge, ZShiftAndFiniteCases) {
  const auto A = AbelianGroup::direct_sum({2}, Monoid::integers());
  const auto a = Action::from_generators(Monoid::integers(), A, {Endomorphism::shift(A, {1})});
  const auto B = Subgroup::generated(A, std::vector<GroupElement>{A.single({0}, {1})});
  const auto rep = bridge_check_windowed(a, B, box_net(Monoid::integers()), 5, 6);
  EXPECT_TRUE(rep.exact_everywhere());
  EXPECT_EQ(rep.csv().str().substr(0, 36), "index,|F|,l(T_F),log-index,differenc");

  const auto Z4 = AbelianGroup::finite({4});
  const auto triv = Action::from_generators(Monoid::integers(), Z4, {Endomorphism::identity(Z4)});
  const auto t = bridge_check(triv, Subgroup::whole(Z4), box_net(Monoid::integers()), 40);
  EXPECT_TRUE(t.exact_everywhere());
  EXPECT_LT(t.algebraic.tail(), 0.02);

  const auto V = AbelianGroup::finite({2, 2, 2});
  const auto cyc = Action::from_generators(Monoid::finite({3}), V,
                                           {Endomorphism::matrix(V, IntMatrix::from_rows({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}))});
  const auto f = bridge_check(cyc, gen(V, {{1, 0, 0}}), box_net(Monoid::finite({3})), 2);
  EXPECT_TRUE(f.exact_everywhere());
  EXPECT_NEAR(f.algebraic.tail(), std::log(8.0) / 3, 1e-12);
  EXPECT_NEAR(f.topological.tail(), std::log(8.0) / 3, 1e-12);
}
