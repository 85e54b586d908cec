#include "amenact/properties.hpp"

#include <gtest/gtest.h>

using namespace amenact;

namespace {
void expect_pass(const PropertyResult& r, std::size_t cases) {
  EXPECT_TRUE(r.passed()) << r.name << ": " << r.counterexample.value_or("");
  EXPECT_EQ(r.cases, cases) << r.name;
}
}  // namespace

TEST(Properties, EpsTriangle) { expect_pass(property_eps_triangle(400, 11), 400); }
TEST(Properties, EpsUnionsAndTranslates) { expect_pass(property_eps_unions_translates(400, 12), 400); }
TEST(Properties, TranslatedNets) { expect_pass(property_translated_nets(300, 13), 300); }
TEST(Properties, TrajectoryAxioms) { expect_pass(property_trajectory_axioms(200, 14), 200); }
TEST(Properties, TrajectoryComposition) { expect_pass(property_trajectory_composition(300, 15), 300); }
TEST(Properties, TrajectoryOfSums) { expect_pass(property_trajectory_of_sums(300, 16), 300); }
TEST(Properties, TrajectorySumBounds) { expect_pass(property_trajectory_sum_bounds(300, 17), 300); }
TEST(Properties, Conjugacy) { expect_pass(property_conjugacy(300, 18), 300); }
TEST(Properties, IntegralBound) { expect_pass(property_integral_bound(200, 19), 200); }

TEST(Properties, FailuresAreReported) {
  const auto r = run_property("always fails on the third case", 10, 1, [n = 0](Rng&) mutable -> std::optional<std::string> {
    return ++n == 3 ? std::optional<std::string>("third") : std::nullopt;
  });
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.cases, 3u);
  EXPECT_EQ(*r.counterexample, "third");
}

TEST(Sampling, EndomorphismSamples) {
  Rng rng(5);
  const auto Z2 = AbelianGroup::finite({2});
  EXPECT_EQ(endomorphism_sample(Z2, 20, rng).size(), 2u);
  const auto V = AbelianGroup::finite({2, 4});
  EXPECT_EQ(endomorphism_count(V.moduli()), BigCount(2 * 2 * 2 * 4));
  const auto all = endomorphism_sample(V, 40, rng);
  ASSERT_EQ(all.size(), 32u);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i] == all[j]);
  const auto some = endomorphism_sample(AbelianGroup::finite({4, 8}), 20, rng);
  EXPECT_EQ(some.size(), 20u);
  EXPECT_TRUE(random_automorphism(AbelianGroup::finite({3, 9}), rng).inverse().has_value());
}
