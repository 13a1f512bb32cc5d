#include <gtest/gtest.h>

#include <algorithm>

#include "catq/compiler.hpp"
#include "catq/errors.hpp"
#include "catq/eval.hpp"
#include "catq/testgen.hpp"
#include "catq/verify.hpp"
#include "helpers.hpp"

using namespace catq;
using test::KeyRows;
using test::keys;

namespace {

class People : public ::testing::Test {
 protected:
  InstanceCategory cat = test::category(test::kPeople);

  KeyRows run(std::string_view text) {
    auto q = parse_query(text);
    auto plan_rows = keys(evaluate(compile_query(q, cat).plan, cat), cat);
    EXPECT_EQ(plan_rows, keys(oracle_evaluate(q, cat), cat)) << text;
    return plan_rows;
  }

  int count_ops(std::string_view text, PlanOp op) {
    auto plan = compile_query(parse_query(text), cat).plan;
    return static_cast<int>(std::count_if(plan.nodes.begin(), plan.nodes.end(),
                                          [&](const PlanNode& n) { return n.op == op; }));
  }
};

}  // namespace

TEST_F(People, Selection) {
  EXPECT_EQ(run("{ p | p in P && p.age > 25 }"), (KeyRows{{"p1"}, {"p2"}}));
  EXPECT_EQ(run("{ p | p in P && p.name = \"cy\" }"), (KeyRows{{"p3"}}));
}

TEST_F(People, MorphismJoin) {
  EXPECT_EQ(run("{ p, c | p in P && c in City && home(p) = c }"),
            (KeyRows{{"p1", "paris"}, {"p2", "rome"}, {"p3", "rome"}}));
  EXPECT_EQ(run("{ p, c | p in Young && c in City && home(p) != c }"), (KeyRows{{"p1", "rome"}, {"p3", "paris"}}));
}

TEST_F(People, UniversalQuantifierUsesDivision) {
  const char* q = "{ c | c in City && forall p in P : home(p) = c || p.age < 35 }";
  EXPECT_EQ(run(q), (KeyRows{{"rome"}}));
  EXPECT_GE(count_ops(q, PlanOp::divide), 1);
}

TEST_F(People, ForallOverEmptyRangeIsTrue) {
  EXPECT_EQ(run("{ c | c in City && forall p in Young - P : home(p) = c }"), (KeyRows{{"paris"}, {"rome"}}));
}

TEST_F(People, ExistsOverEmptyRangeIsFalse) {
  EXPECT_TRUE(run("{ c | c in City && exists p in Young - P : home(p) = c }").empty());
}

TEST_F(People, Membership) {
  EXPECT_EQ(run("{ p, c | l = (p, c) in Lives }"), (KeyRows{{"p1", "paris"}, {"p2", "rome"}, {"p1", "rome"}}));
  EXPECT_EQ(run("{ p | p in P && !(exists l in Lives : Lives_who(l) = p) }"), (KeyRows{{"p3"}}));
}

TEST_F(People, ReachAndNegatedReach) {
  EXPECT_EQ(run("{ a, b | a in P && b in P && reach(a, b, E) }"),
            (KeyRows{{"p1", "p2"}, {"p1", "p3"}, {"p2", "p3"}}));
  EXPECT_EQ(run("{ a, b | a in Young && b in Young && !reach(a, b, E) }"),
            (KeyRows{{"p1", "p1"}, {"p3", "p1"}, {"p3", "p3"}}));
  EXPECT_EQ(run("{ a, b | a in P && b in P && nhop(2, a, b, E) }"), (KeyRows{{"p1", "p3"}}));
  EXPECT_GE(count_ops("{ a, b | a in P && b in P && !reach(a, b, E) }", PlanOp::difference), 1);
}

TEST_F(People, Disjunction) {
  EXPECT_EQ(run("{ p | p in P && (p.age < 25 || p.age > 35) }"), (KeyRows{{"p2"}, {"p3"}}));
  EXPECT_GE(count_ops("{ p | p in P && (p.age < 25 || p.age > 35) }", PlanOp::union_of), 1);
}

TEST_F(People, PlanColumnsAndOutputNames) {
  auto compiled = compile_query(parse_query("{ c, p | p in P && c in City && home(p) = c }"), cat);
  auto cols = plan_columns(compiled.plan);
  EXPECT_EQ(cols.at(static_cast<std::size_t>(compiled.plan.root)).size(), 2u);
  EXPECT_EQ(compiled.plan.output_names, (std::vector<std::string>{"c", "p"}));
  auto result = evaluate(compiled.plan, cat);
  EXPECT_EQ(result.columns()[0].name, "c");
}

TEST_F(People, UnsafeQueryRejectedBeforeCompiling) {
  EXPECT_THROW(compile_query(parse_query("{ p | p.age > 3 }"), cat), SafetyError);
}

TEST_F(People, ClauseLimitReportedAsCompileError) {
  std::string text = "{ p | p in P";
  for (int i = 0; i < 8; ++i) text += " && (p.age = " + std::to_string(i) + " || p.age > 50)";
  text += " }";
  CompileOptions o;
  o.clause_limit = 100;
  EXPECT_THROW(compile_query(parse_query(text), cat, o), CompileError);
}

TEST_F(People, PlanTextMentionsEveryNode) {
  auto plan = compile_query(parse_query("{ c | c in City && forall p in P : home(p) = c }"), cat).plan;
  auto text = to_string(plan);
  for (const auto& n : plan.nodes) {
    EXPECT_NE(text.find("%" + std::to_string(n.id) + " = " + std::string(op_name(n.op))), std::string::npos)
        << text;
  }
  EXPECT_NE(text.find("root %" + std::to_string(plan.root)), std::string::npos);
}

TEST_F(People, FlippedComparisonsAreDetected) {
  auto q = parse_query("{ p | p in P && p.age > 25 }");
  CompileOptions o;
  o.flip_comparisons = true;
  EXPECT_EQ(keys(evaluate(compile_query(q, cat, o).plan, cat), cat), (KeyRows{{"p3"}}));
}

TEST(Compiler, TreeQueriesOnGeneratedForests) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto g = gen_tree(seed, 12);
    for (const char* text : {"{ a, b | a in T && b in T && isParent(a, b) }",
                             "{ a | a in T && !(exists b in T : isAncestor(b, a)) }",
                             "{ a, b | a in T && b in T && isSibling(a, b) && !isAncestor(a, b) }"}) {
      auto q = parse_query(text);
      ASSERT_EQ(keys(evaluate(compile_query(q, g.cat).plan, g.cat), g.cat), keys(oracle_evaluate(q, g.cat), g.cat))
          << text << " seed " << seed;
    }
  }
}

TEST(Compiler, EveryFeatureAgreesWithOracle) {
  VerifyOptions o;
  o.queries = 300;
  o.seed = 99;
  auto report = run_verify(o);
  EXPECT_EQ(report.mismatches, 0) << report.text;
  EXPECT_EQ(report.skipped, 0);
}

TEST(Eval, OracleBoundIsEnforced) {
  auto cat = test::category(test::kPeople);
  auto q = parse_query("{ a, b, c | a in P && b in P && c in P }");
  EXPECT_EQ(oracle_evaluate(q, cat).size(), 27u);
  EXPECT_THROW(oracle_evaluate(q, cat, 10), EvalError);
}

TEST(Eval, MixedKindAttributeIsUnsafe) {
  auto cat = test::category(R"({"objects": [{"name": "S", "elements": [
    {"key": "a", "record": {"v": 1}}, {"key": "b", "record": {"v": "one"}}]}]})");
  auto q = parse_query("{ x | x in S && x.v > 0 }");
  EXPECT_FALSE(check_safety(q, cat).empty());
}
