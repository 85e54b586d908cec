#include "amenact/integral.hpp"

#include <gtest/gtest.h>

using namespace amenact;

namespace {
MSubset interval1(std::int64_t lo, std::int64_t hi) {
  std::vector<MElement> v;
  for (std::int64_t i = lo; i < hi; ++i) v.push_back({i});
  return MSubset(v);
}
}  // namespace

TEST(SetFunction, CardinalityAndMemo) {
  const Monoid Z = Monoid::integers();
  int calls = 0;
  SetFunction f(Z, Provenance::User, "counting", [&calls](const MSubset& F) {
    ++calls;
    return static_cast<double>(F.size());
  });
  EXPECT_EQ(f(interval1(0, 7)), 7.0);
  EXPECT_EQ(f(interval1(0, 7)), 7.0);
  EXPECT_EQ(calls, 2);  // probe on {1} plus one evaluation
  EXPECT_THROW(SetFunction(Z, Provenance::User, "negative", [](const MSubset& F) { return -double(F.size()); }),
               InvalidArgument);
  EXPECT_THROW(f(MSubset{{0, 0}}), MismatchError);
}

TEST(SetFunction, NegativeLaterIsRejected) {
  const Monoid N = Monoid::naturals();
  SetFunction f(N, Provenance::User, "dips", [](const MSubset& F) { return F.size() > 3 ? -1.0 : 1.0; });
  EXPECT_THROW(f(interval1(0, 5)), InvalidArgument);
}

TEST(Integral, CardinalityRatiosAreOne) {
  const Monoid Z2 = Monoid::integers(2);
  const auto est = integral(SetFunction::cardinality(Z2), box_net(Z2), 8);
  ASSERT_EQ(est.rows.size(), 8u);
  for (const auto& r : est.rows) {
    EXPECT_EQ(r.ratio, 1.0);
    EXPECT_EQ(*r.exact, BigCount((2 * r.index + 1) * (2 * r.index + 1)));
  }
  EXPECT_EQ(est.tail(), 1.0);
  EXPECT_EQ(est.oscillation(), 0.0);
  EXPECT_TRUE(est.converged());
}

TEST(Integral, Constants) {
  const Monoid Z = Monoid::integers();
  const auto est = integral(SetFunction::constant(Z, 3.0), box_net(Z), 50);
  for (const auto& r : est.rows) EXPECT_DOUBLE_EQ(r.ratio, 3.0 / static_cast<double>(2 * r.index + 1));
  const Monoid F = Monoid::finite({2, 3});
  const auto fin = integral(SetFunction::constant(F, 3.0), box_net(F), 4);
  EXPECT_DOUBLE_EQ(fin.tail(), 0.5);
}

TEST(Integral, Shifted) {
  const Monoid Z = Monoid::integers();
  const auto card = SetFunction::cardinality(Z);
  const auto g = shifted(card, interval1(0, 2));
  for (std::int64_t n = 1; n <= 10; ++n) EXPECT_EQ(*g.evaluate(interval1(0, n)).exact, BigCount(n + 1));
  const auto same = shifted(card, MSubset{{0}});
  EXPECT_EQ(same(interval1(3, 9)), card(interval1(3, 9)));
  // both tend to the same limit
  const auto a = integral(card, box_net(Z), 200), b = integral(g, box_net(Z), 200);
  EXPECT_NEAR(a.tail(), b.tail(), 0.01);
}

TEST(Integral, CardOfImage) {
  const Monoid S = Monoid::product({Monoid::finite({2}), Monoid::integers()});
  const auto pi = MonoidHom::projection(S, {1});
  const auto est = integral(card_pi(pi), box_net(S), 30);
  for (const auto& r : est.rows) EXPECT_EQ(*r.exact * 2, BigCount(r.size));
  const auto id = integral(card_pi(MonoidHom::identity(Monoid::integers())), box_net(Monoid::integers()), 5);
  EXPECT_EQ(id.tail(), 1.0);
  const auto to5 = MonoidHom::coordinate_map(Monoid::integers(), Monoid::finite({5}), {0});
  const auto mod = integral(card_pi(to5), box_net(Monoid::integers()), 128);
  for (const auto& r : mod.rows)
    if (r.index >= 2) {
      EXPECT_DOUBLE_EQ(r.ratio, 5.0 / static_cast<double>(2 * r.index + 1));
    }
  EXPECT_LT(mod.tail(), 0.02);
}

TEST(Integral, BudgetFailureReportsCompletedPrefix) {
  const Monoid N = Monoid::naturals();
  SetFunction f(N, Provenance::User, "limited", [](const MSubset& F) {
    if (F.size() > 6) throw BudgetExceeded("too large");
    return 1.0;
  });
  try {
    integral(f, box_net(N), 10);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.completed(), 6u);
  }
  const auto est = integral(f, box_net(N), 10, true);
  EXPECT_EQ(est.rows.size(), 6u);
  EXPECT_TRUE(est.truncated);
}

TEST(Theta, Examples) {
  const Monoid Z2 = Monoid::integers(2);
  const auto pi = MonoidHom::projection(Z2, {0});
  const auto sigma = *find_good_section(pi);
  const auto Nnet = box_net(pi.kernel().monoid);
  const auto c = theta(SetFunction::constant(Z2, 2.0), sigma, MSubset{{0}, {1}}, Nnet, 200);
  EXPECT_LT(c.tail(), 0.01);
  // Y = {1}: the integral of f restricted to N
  const auto card = SetFunction::cardinality(Z2);
  EXPECT_EQ(theta(card, sigma, MSubset{{0}}, Nnet, 10).tail(), 1.0);
  EXPECT_EQ(theta(card, sigma, interval1(0, 4), Nnet, 10).tail(), 4.0);
  // finite kernel: card_pi gives |Y| / |N|
  const Monoid S = Monoid::product({Monoid::integers(), Monoid::finite({4})});
  const auto p = MonoidHom::projection(S, {0});
  const auto s = *find_good_section(p);
  const auto fin = box_net(p.kernel().monoid);
  for (std::int64_t k = 1; k <= 5; ++k) EXPECT_DOUBLE_EQ(theta(card_pi(p), s, interval1(0, k), fin, 3).tail(), k / 4.0);
}

TEST(Fubini, CardinalityAndConstants) {
  const Monoid Z2 = Monoid::integers(2);
  const auto pi = MonoidHom::projection(Z2, {0});
  const auto sigma = *find_good_section(pi);
  const auto Snet = box_net(Z2), Cnet = box_net(pi.target()), Nnet = box_net(pi.kernel().monoid);
  auto r = fubini_check(SetFunction::cardinality(Z2), sigma, Snet, Cnet, Nnet, 8);
  EXPECT_EQ(r.lhs.tail(), 1.0);
  EXPECT_DOUBLE_EQ(r.rhs.tail(), 1.0);
  r = fubini_check(SetFunction::constant(Z2, 1.0), sigma, Snet, Cnet, Nnet, 40);
  EXPECT_LT(r.lhs.tail(), 0.001);
  EXPECT_LT(r.rhs.tail(), 0.001);
  EXPECT_LT(r.difference(), 0.001);
}

TEST(Axioms, Sampling) {
  const Monoid Z2 = Monoid::integers(2);
  EXPECT_TRUE(sample_axioms(SetFunction::cardinality(Z2), 300, 3).passed());
  // F -> |F|^2 is not subadditive
  SetFunction sq(Z2, Provenance::User, "square", [](const MSubset& F) { return double(F.size() * F.size()); });
  const auto rep = sample_axioms(sq, 300, 3, 7);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.seed, 7u);
  bool subadd = false;
  for (const auto& v : rep.violations) subadd = subadd || v.axiom == "subadditive";
  EXPECT_TRUE(subadd);
}

TEST(IntegralProperties, TailBoundedBySingleton) {
  const Monoid Z = Monoid::integers();
  for (double a : {0.5, 2.0, 7.0}) {
    // F -> min(|F|, a) is increasing, subadditive and invariant
    SetFunction f(Z, Provenance::User, "capped", [a](const MSubset& F) { return std::min<double>(F.size(), a); });
    ASSERT_TRUE(sample_axioms(f, 200, 4).passed());
    const auto est = integral(f, box_net(Z), 64);
    EXPECT_LE(est.tail(), f(MSubset{{0}}) + est.oscillation());
    // bounded functions on infinite S have limit 0
    EXPECT_LT(est.tail(), a / 100.0);
  }
}

TEST(IntegralProperties, Linearity) {
  const Monoid Z = Monoid::integers();
  const auto card = SetFunction::cardinality(Z);
  const auto c = SetFunction::constant(Z, 5.0);
  SetFunction sum(Z, Provenance::User, "sum", [card, c](const MSubset& F) { return card(F) + c(F); });
  const auto a = integral(card, box_net(Z), 60), b = integral(c, box_net(Z), 60), s = integral(sum, box_net(Z), 60);
  EXPECT_NEAR(s.tail(), a.tail() + b.tail(), a.oscillation() + b.oscillation() + 1e-12);
  for (std::size_t k = 0; k < 60; ++k) EXPECT_NEAR(s.rows[k].ratio, a.rows[k].ratio + b.rows[k].ratio, 1e-12);
}

TEST(IntegralProperties, AutomorphismInvariance) {
  // phi = -id on Z; f(F) = |F + {0,1,5}| is not symmetric
  const Monoid Z = Monoid::integers();
  const MSubset E{{0}, {1}, {5}};
  SetFunction f(Z, Provenance::User, "spread", [Z, E](const MSubset& F) { return double(set_product(Z, F, E).size()); });
  auto phi = [](const MSubset& F) {
    std::vector<MElement> v;
    for (const auto& s : F) v.push_back({-s[0]});
    return MSubset(v);
  };
  SetFunction fphi(Z, Provenance::User, "spread o phi", [f, phi](const MSubset& F) { return f(phi(F)); });
  const FolnerNet net(Z, "shifted boxes", [](std::size_t i) { return interval1(0, static_cast<std::int64_t>(i)); });
  const FolnerNet image(Z, "image boxes", [phi, net](std::size_t i) { return phi(net.at(i)); });
  const auto a = integral(fphi, net, 30), b = integral(f, image, 30);
  for (std::size_t k = 0; k < 30; ++k) EXPECT_EQ(a.rows[k].ratio, b.rows[k].ratio);
}

TEST(IntegralProperties, PullBackAlongFiniteKernel) {
  const Monoid S = Monoid::product({Monoid::finite({3}), Monoid::integers()});
  const auto pi = MonoidHom::projection(S, {1});
  const auto f = SetFunction::cardinality(pi.target());
  const auto a = integral(pull_back(f, pi), box_net(S), 20), b = integral(f, box_net(pi.target()), 20);
  EXPECT_NEAR(a.tail(), b.tail() / 3.0, 1e-12);
}

TEST(IntegralEstimate, Csv) {
  const Monoid N = Monoid::naturals();
  const auto est = integral(SetFunction::cardinality(N), box_net(N), 3);
  EXPECT_EQ(est.csv().str(),
            "index,|F|,f,ratio\n1,1,1.000000000000,1.000000000000\n2,2,2.000000000000,1.000000000000\n3,3,3.000000000000,"
            "1.000000000000\n");
}
