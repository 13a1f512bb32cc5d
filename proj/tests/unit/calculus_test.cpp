#include <gtest/gtest.h>

#include "catq/calculus.hpp"
#include "catq/errors.hpp"
#include "catq/testgen.hpp"
#include "helpers.hpp"

using namespace catq;

namespace {

bool mentions(const std::vector<std::string>& violations, std::string_view needle) {
  for (const auto& v : violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

ParseError parse_error_of(std::string_view text) {
  try {
    parse_query(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError("", 0, 0);
}

}  // namespace

TEST(Parse, PrintParseRoundTripOnGeneratedQueries) {
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed, g.cat, QueryFeatures::all());
    auto text = to_string(q);
    auto back = parse_query(text);
    ASSERT_TRUE(structurally_equal(q, back)) << text << "\n" << to_string(back);
    EXPECT_EQ(to_string(back), text);
  }
}

TEST(Parse, Literals) {
  auto q = parse_query(R"({ x | x in S && x.a = "it\"s" && x.d < 2.5 && x.k = dewey("1.2") && x.b = true })");
  EXPECT_EQ(q.targets, std::vector<std::string>{"x"});
  ASSERT_EQ(q.ranges.size(), 1u);
  EXPECT_EQ(parse_query(to_string(q)).matrix->kind, q.matrix->kind);
}

TEST(Parse, MembershipAndRangeExpressions) {
  auto q = parse_query("{ x, y | r = (x, y) in R && z in (A | B) - C }");
  ASSERT_EQ(q.memberships.size(), 1u);
  EXPECT_EQ(q.memberships[0].components, (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(q.ranges.size(), 1u);
  EXPECT_EQ(q.ranges[0].range.objects(), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(Parse, ErrorPositionsAreOneBased) {
  auto e = parse_error_of("{ x | x in S &&\n  x.a > }");
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 9u);
  auto bad_char = parse_error_of("{ x | x in S && x.a $ 3 }");
  EXPECT_EQ(bad_char.line(), 1u);
  EXPECT_EQ(bad_char.column(), 21u);
  auto open = parse_error_of("{ x | x in S && x.a = \"abc }");
  EXPECT_EQ(open.line(), 1u);
}

TEST(Parse, RangeTermInsideMatrixRejected) {
  EXPECT_THROW(parse_query("{ x | x in S && (x in T || x.a = 1) }"), Error);
}

TEST(Safety, AcceptsRangeRestrictedQueries) {
  auto cat = test::category(test::kPeople);
  EXPECT_TRUE(check_safety(parse_query("{ p | p in P && p.age > 25 }"), cat).empty());
  EXPECT_TRUE(check_safety(parse_query("{ p, c | l = (p, c) in Lives }"), cat).empty());
  EXPECT_TRUE(check_safety(parse_query("{ c | c in City && forall p in Young : home(p) = c }"), cat).empty());
}

TEST(Safety, ReportsViolations) {
  auto cat = test::category(test::kPeople);
  auto check = [&](std::string_view text) { return check_safety(parse_query(text), cat); };
  EXPECT_TRUE(mentions(check("{ p | p.age > 3 }"), "no range term"));
  EXPECT_TRUE(mentions(check("{ p | p in Nowhere }"), "Nowhere"));
  EXPECT_TRUE(mentions(check("{ p | p in P && away(p) = p }"), "unknown morphism"));
  EXPECT_TRUE(mentions(check("{ c | c in City && exists p in P : home(c) = p }"), "domain"));
  EXPECT_TRUE(mentions(check("{ p | p in P && p.age = \"old\" }"), "mixes"));
  EXPECT_TRUE(mentions(check("{ p | p in P && reach(p, p, Lives) }"), "edge set"));
  EXPECT_TRUE(mentions(check("{ p | p in P && q.age > 3 }"), "range-coupled"));
  EXPECT_TRUE(mentions(check("{ c | c in City && exists c in P : c.age > 3 }"), "shadows"));
  EXPECT_THROW(require_safe(parse_query("{ p | p.age > 3 }"), cat), SafetyError);
}

TEST(Safety, UnionIncompatibleRange) {
  auto cat = test::category(test::kPeople);
  EXPECT_FALSE(check_safety(parse_query("{ x | x in P | City }"), cat).empty());
  EXPECT_TRUE(check_safety(parse_query("{ x | x in P - Young }"), cat).empty());
}

TEST(Safety, GeneratedQueriesAreSafe) {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed * 7, g.cat, QueryFeatures::all());
    auto v = check_safety(q, g.cat);
    ASSERT_TRUE(v.empty()) << to_string(q) << "\n" << v.front();
  }
}

TEST(FreeVariables, OrderFollowsRangesThenMemberships) {
  auto cat = test::category(test::kPeople);
  auto vars = free_variables(parse_query("{ c, p | l = (p, c) in Lives && c in City }"), cat);
  std::vector<std::string> names;
  for (const auto& v : vars) names.push_back(v.name);
  EXPECT_EQ(names, (std::vector<std::string>{"c", "l", "p"}));
}
