#include <gtest/gtest.h>

#include "amenact/scenario.hpp"

using namespace amenact;

namespace {

ScenarioResult run(const char* text, RunOptions opt = {}) { return run_scenario(Json::parse(text), opt); }

}  // namespace

TEST(Expr, Arithmetic) {
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("1 + 2 * 3")), 7.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("(1 + 2) * 3")), 9.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("2^3^2")), 512.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("-2^2")), -4.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("5/(2*n+1)", {{"n", 2}})), 1.0);
  EXPECT_NEAR(static_cast<double>(evaluate("log(3) - log(3)")), 0.0, 1e-18);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("0.05")), 0.05);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("1e-12")), 1e-12);
  EXPECT_DOUBLE_EQ(static_cast<double>(evaluate("2.5E+2 - 1")), 249.0);
  for (const char* bad : {"", "1 +", "1.2.3", "1e", "(1", "2 ** 3", "m", "log 2", "1 2"}) EXPECT_THROW(evaluate(bad), SchemaError) << bad;
}

TEST(Expr, ExactCounts) {
  EXPECT_EQ(evaluate_exact("3^(2*(2*n+1))", {{"n", ExactValue(8)}}), ExactValue(BigCount("16677181699666569")));
  EXPECT_EQ(evaluate_exact("4*3^(n-1)", {{"n", ExactValue(1)}}), ExactValue(4));
  EXPECT_EQ(evaluate_exact("1/2 + 0.25"), ExactValue(3, 4));
  EXPECT_EQ(evaluate_exact("1e-3"), ExactValue(1, 1000));
  EXPECT_EQ(evaluate_exact("0.5e2"), ExactValue(50));
  EXPECT_THROW(evaluate_exact("log(2)"), SchemaError);
  EXPECT_THROW(evaluate_exact("2^(1/2)"), SchemaError);
  EXPECT_THROW(evaluate_exact("1/0"), SchemaError);
}

TEST(Scenario, SchemaErrors) {
  EXPECT_THROW(run("[]"), SchemaError);
  EXPECT_THROW(run(R"j({"name": "x"})j"), SchemaError);
  EXPECT_THROW(run(R"j({"kind": "nope", "name": "x"})j"), SchemaError);
  EXPECT_THROW(run(R"j({"kind": "integral", "name": "a b", "monoid": "Z", "function": "cardinality"})j"), SchemaError);
  // unknown keys at top level and nested
  EXPECT_THROW(run(R"j({"kind": "integral", "name": "x", "monoid": "Z", "function": "cardinality", "prefx": 3})j"),
               SchemaError);
  EXPECT_THROW(run(R"j({"kind": "integral", "name": "x", "monoid": "Z", "function": "cardinality",
                       "net": {"family": "box", "size": 3}})j"),
               SchemaError);
  EXPECT_THROW(run(R"j({"kind": "integral", "name": "x", "monoid": "Q", "function": "cardinality"})j"), SchemaError);
  EXPECT_THROW(run(R"j({"kind": "entropy", "name": "x", "monoid": "N", "group": {"free": 1},
                       "action": [{"scalar": 2}], "seeds": [{"subset": [[0, 1]]}]})j"),
               SchemaError);
  // library rejections surface as schema errors
  EXPECT_THROW(run(R"j({"kind": "entropy", "name": "x", "monoid": "N", "group": {"free": 1},
                       "action": [{"scalar": 2}, {"scalar": 3}], "seeds": [{"subset": [[0]]}]})j"),
               SchemaError);
}

TEST(Scenario, IntegralChecksNameTheFirstFailingRow) {
  const auto r = run(R"j({"kind": "integral", "name": "m5", "monoid": "Z",
      "function": {"card_pi": {"target": "Z/5", "select": [0]}}, "prefix": 6, "expect": {"ratio": "1"}})j");
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.first_failure()->detail.find("row n=3"), std::string::npos);
  ASSERT_EQ(r.tables.size(), 1u);
  EXPECT_EQ(r.tables[0].second.rows().size(), 6u);
}

TEST(Scenario, PrefixOverrideAndLogBase) {
  const char* doc = R"j({"kind": "entropy", "name": "b", "monoid": "Z",
      "group": {"direct_sum": {"base": [2], "index": "Z"}}, "action": [{"shift": [1]}],
      "seeds": [{"label": "e0", "subgroup": {"generators": [{"at": [0], "value": [1]}]},
                 "expect": {"count": "2^(2*n+1)", "ratio": "log(2)"}}]})j";
  RunOptions opt;
  opt.prefix = 3;
  opt.log_base = 2;
  const auto r = run(doc, opt);
  EXPECT_TRUE(r.passed());
  const auto& rows = r.tables[0].second.rows();
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2][2], "128");
  EXPECT_EQ(std::stod(rows[2][3]), 1.0);
}

TEST(Scenario, BudgetIsNotASchemaError) {
  RunOptions opt;
  opt.budget = 1000;
  EXPECT_THROW(run(R"j({"kind": "semidirect-defect", "name": "d", "x": [0, 1, 0],
                       "probes": [{"n": 4, "m": 400, "below": "1/20"}]})j",
                   opt),
               BudgetExceeded);
}

TEST(Scenario, KindsAreDescribed) {
  EXPECT_EQ(scenario_kinds().size(), 10u);
  for (const auto& k : scenario_kinds()) {
    EXPECT_FALSE(k.fields.empty());
    EXPECT_EQ(detail::runners().count(k.name), 1u) << k.name;
  }
}

TEST(Scenario, TilingAndDefects) {
  auto r = run(R"j({"kind": "tiling", "name": "t", "monoid": "Z^2", "domain": {"box": [[0, 30], [0, 30]]},
      "tiles": [{"box": [[0, 10], [0, 10]]}], "eps": "1/10"})j");
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checks.size(), 4u);
  r = run(R"j({"kind": "tiling", "name": "t", "monoid": "Z^2", "domain": {"box": [[0, 5], [0, 5]]},
      "tiles": [{"box": [[0, 6], [0, 6]]}], "eps": "1/10"})j");
  EXPECT_FALSE(r.passed());
  r = run(R"j({"kind": "semidirect-defect", "name": "d", "x": [0, 1, 0], "sweep": {"from": 4, "to": 8, "at_least": "1/4"}})j");
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.tables[0].second.rows().size(), 5u);
  EXPECT_THROW(run(R"j({"kind": "tiling", "name": "t", "monoid": "Z^2", "domain": {"box": [[0, 5], [0, 5]]},
      "tiles": [{"box": [[0, 2], [0, 2]]}], "eps": 0.1})j"),
               SchemaError);
}

TEST(Scenario, FolnerAndCanonical) {
  auto r = run(R"j({"kind": "folner-verify", "name": "f", "monoid": "Z x Z/2", "net": {"family": "box"},
      "test": [[1, 0], [0, 1]], "prefix": 20, "expect": {"tail_below": "0.06"}})j");
  EXPECT_TRUE(r.passed()) << r.checks[0].detail;
  r = run(R"j({"kind": "canonical-net", "name": "c", "monoid": "N^2", "E": [[1, 0], [0, 2]], "prefix": 5})j");
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.tables[0].second.rows().size(), 5u);
}
