#include <gtest/gtest.h>

#include "catq/io.hpp"
#include "catq/normalize.hpp"
#include "catq/testgen.hpp"
#include "catq/verify.hpp"

using namespace catq;

namespace {

int count_kind(const FormulaPtr& f, FormulaKind kind) {
  int n = f->kind == kind ? 1 : 0;
  for (const auto& c : f->children) n += count_kind(c, kind);
  return n;
}

std::size_t element_count(const CategoryData& d) {
  std::size_t n = 0;
  for (const auto& o : d.objects) n += o.subset_of ? 0 : o.elements.size();
  return n;
}

VerifyOptions faulty(int queries) {
  VerifyOptions o;
  o.queries = queries;
  o.seed = 5;
  o.flip_comparisons = true;
  return o;
}

}  // namespace

TEST(GenCategory, DeterministicPerSeed) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    EXPECT_EQ(category_data_to_json_text(gen_category(seed).data), category_data_to_json_text(gen_category(seed).data));
  }
  EXPECT_NE(category_data_to_json_text(gen_category(1).data), category_data_to_json_text(gen_category(2).data));
}

TEST(GenCategory, TenThousandValidWithinLimits) {
  const GenLimits limits{4, 5, 4};
  for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
    auto g = gen_category(seed, limits);
    ASSERT_LE(g.data.objects.size(), 4u) << seed;
    ASSERT_LE(g.data.morphisms.size(), 4u) << seed;
    for (const auto& o : g.data.objects) ASSERT_LE(o.elements.size(), 5u) << seed;
    ASSERT_TRUE(validate_category(g.cat).empty()) << seed;
  }
}

TEST(GenCategory, SingletonLimits) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto g = gen_category(seed, {1, 1, 1});
    ASSERT_LE(g.data.objects.size(), 1u);
    ASSERT_LE(element_count(g.data), 1u);
    ASSERT_LE(g.data.morphisms.size(), 1u);
    auto none = gen_category(seed, {1, 0, 0});
    ASSERT_EQ(element_count(none.data), 0u);
    ASSERT_TRUE(none.data.morphisms.empty());
  }
}

TEST(GenQuery, DeterministicAndSafe) {
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed, g.cat, QueryFeatures::all());
    ASSERT_EQ(to_string(q), to_string(gen_query(seed, g.cat, QueryFeatures::all())));
    ASSERT_TRUE(check_safety(q, g.cat).empty()) << to_string(q);
  }
}

TEST(GenQuery, NoFeaturesGivesQuantifierFreeConjunctiveQueries) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed, g.cat, QueryFeatures::none());
    ASSERT_TRUE(query_features(q).empty()) << to_string(q);
    auto p = to_prenex(q);
    ASSERT_TRUE(p.prefix.empty()) << to_string(q);
    ASSERT_LE(p.clauses.size(), 1u) << to_string(q);
  }
}

TEST(GenQuery, DisabledFeaturesStayOut) {
  auto f = QueryFeatures::all();
  f.forall = false;
  f.disjunction = false;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed, g.cat, f);
    ASSERT_EQ(count_kind(q.matrix, FormulaKind::forall), 0) << to_string(q);
    ASSERT_FALSE(query_features(q).count("disjunction")) << to_string(q);
  }
}

TEST(GenQuery, FocusForcesTheConstruct) {
  int hits = 0, tries = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto g = gen_category(seed);
    if (g.cat.objects().empty()) continue;
    ++tries;
    auto q = gen_query(seed, g.cat, QueryFeatures::all(), "forall");
    hits += count_kind(q.matrix, FormulaKind::forall) > 0;
  }
  EXPECT_GE(hits * 10, tries * 9);
}

TEST(GenQuery, RespectsQuantifierDepth) {
  std::function<int(const FormulaPtr&)> depth = [&](const FormulaPtr& f) {
    int d = 0;
    for (const auto& c : f->children) d = std::max(d, depth(c));
    return d + (f->is_quantifier() ? 1 : 0);
  };
  auto f = QueryFeatures::all();
  f.max_quantifier_depth = 1;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto g = gen_category(seed);
    ASSERT_LE(depth(gen_query(seed, g.cat, f).matrix), 1);
    ASSERT_LE(depth(gen_query(seed, g.cat, QueryFeatures::all()).matrix), 2);
  }
}

TEST(SimCases, EveryKindBuildsValidInstances) {
  for (const auto& kind : sim_op_kinds()) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto c = gen_sim_case(seed, kind);
      ASSERT_TRUE(validate_category(c.cat).empty()) << kind;
    }
  }
}

TEST(Verify, StratifiedCoverage) {
  VerifyOptions o;
  o.queries = 600;
  o.seed = 3;
  auto report = run_verify(o);
  EXPECT_EQ(report.mismatches, 0);
  for (const auto& name : feature_names(o.features)) {
    EXPECT_GE(report.feature_cases[name] * 10, report.cases) << name;
  }
}

TEST(Verify, ZeroQueriesPasses) {
  VerifyOptions o;
  o.queries = 0;
  auto report = run_verify(o);
  EXPECT_EQ(report.cases, 0);
  EXPECT_EQ(report.mismatches, 0);
  EXPECT_NE(report.text.find("PASS"), std::string::npos);
}

TEST(Verify, SameSeedSameReport) {
  VerifyOptions o;
  o.queries = 100;
  o.seed = 42;
  EXPECT_EQ(run_verify(o).text, run_verify(o).text);
  EXPECT_EQ(run_verify(faulty(100)).text, run_verify(faulty(100)).text);
}

TEST(Verify, FlippedComparisonsCaughtAndShrunk) {
  auto report = run_verify(faulty(200));
  EXPECT_GT(report.mismatches, 0);
  ASSERT_TRUE(report.first_failure.has_value());
  EXPECT_NE(report.text.find("FAIL"), std::string::npos);
}

TEST(Shrink, FaultyCaseBecomesSmall) {
  auto options = faulty(1);
  int shrunk_cases = 0;
  for (int i = 0; i < 400 && shrunk_cases < 10; ++i) {
    auto g = gen_category(case_seed(8, i), {4, 5, 4});
    TestCase c{g.data, gen_query(case_seed(9, i), g.cat, QueryFeatures::all(), "compare")};
    auto fails = [&](const TestCase& t) { return differential_check(t, options).has_value(); };
    if (!fails(c)) continue;
    ++shrunk_cases;
    auto small = shrink(c, fails);
    ASSERT_TRUE(fails(small));
    auto cat = build_validated(small.data);
    ASSERT_TRUE(check_safety(small.query, cat).empty());
    EXPECT_LE(small.data.objects.size(), 2u) << case_to_json(small);
    EXPECT_LE(element_count(small.data), 3u) << case_to_json(small);
    EXPECT_EQ(count_kind(small.query.matrix, FormulaKind::compare), 1) << case_to_json(small);
    // already minimal: shrinking again changes nothing
    EXPECT_EQ(case_to_json(shrink(small, fails)), case_to_json(small));
  }
  EXPECT_EQ(shrunk_cases, 10);
}

TEST(Shrink, CaseJsonRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = gen_category(seed);
    TestCase c{g.data, gen_query(seed, g.cat, QueryFeatures::all())};
    auto text = case_to_json(c);
    EXPECT_EQ(case_to_json(case_from_json(text)), text);
  }
}
