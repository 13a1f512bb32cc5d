#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "catq/errors.hpp"
#include "catq/eval.hpp"
#include "catq/normalize.hpp"
#include "catq/testgen.hpp"
#include "helpers.hpp"

using namespace catq;

namespace {

const std::vector<std::string> kProps = {"a", "b", "c", "d"};

FormulaPtr prop(const std::string& name) {
  return make_compare(AttributeTerm{"x", name}, CmpOp::eq, Value(true));
}

FormulaPtr random_formula(std::mt19937& rng, int depth) {
  int pick = static_cast<int>(rng() % (depth > 0 ? 6 : 3));
  switch (pick) {
    case 0:
    case 1:
      return prop(kProps[rng() % kProps.size()]);
    case 2:
      return rng() % 2 ? make_not(prop(kProps[rng() % kProps.size()])) : make_true();
    case 3:
      return make_not(random_formula(rng, depth - 1));
    case 4:
      return make_and(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    default:
      return make_or(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
  }
}

// Direct propositional semantics, independent of the engine.
bool truth(const FormulaPtr& f, const std::map<std::string, bool>& env) {
  switch (f->kind) {
    case FormulaKind::truth:
      return true;
    case FormulaKind::falsity:
      return false;
    case FormulaKind::compare: {
      bool v = env.at(std::get<AttributeTerm>(f->lhs).attribute) == std::get<Value>(f->rhs).as_bool();
      if (f->op == CmpOp::eq) return v;
      if (f->op == CmpOp::ne) return !v;
      ADD_FAILURE() << "unexpected operator";
      return false;
    }
    case FormulaKind::negation:
      return !truth(f->children[0], env);
    case FormulaKind::conjunction:
      return truth(f->children[0], env) && truth(f->children[1], env);
    case FormulaKind::disjunction:
      return truth(f->children[0], env) || truth(f->children[1], env);
    default:
      ADD_FAILURE() << "unexpected formula kind";
      return false;
  }
}

bool is_nnf(const FormulaPtr& f) {
  if (f->kind == FormulaKind::negation) {
    const auto& c = f->children[0];
    return c->is_atom() && c->kind != FormulaKind::compare;
  }
  for (const auto& c : f->children) {
    if (!is_nnf(c)) return false;
  }
  return true;
}

bool is_literal(const FormulaPtr& f) {
  if (f->kind == FormulaKind::negation) return f->children[0]->is_atom() && f->children[0]->kind != FormulaKind::compare;
  return f->is_atom();
}

InstanceCategory single_row(const std::map<std::string, bool>& env) {
  CategoryData data;
  ObjectData s;
  s.name = "S";
  Record r;
  for (const auto& [k, v] : env) r.emplace_back(k, Value(v));
  s.elements.push_back({"s", r, {}});
  data.objects.push_back(s);
  return build_validated(data);
}

std::vector<std::map<std::string, bool>> all_assignments() {
  std::vector<std::map<std::string, bool>> out;
  for (unsigned bits = 0; bits < (1u << kProps.size()); ++bits) {
    std::map<std::string, bool> env;
    for (std::size_t i = 0; i < kProps.size(); ++i) env[kProps[i]] = (bits >> i) & 1u;
    out.push_back(env);
  }
  return out;
}

}  // namespace

TEST(Normalize, NnfAndDnfAgreeWithTruthTables) {
  std::mt19937 rng(17);
  const auto envs = all_assignments();
  std::vector<InstanceCategory> cats;
  for (const auto& env : envs) cats.push_back(single_row(env));
  for (int round = 0; round < 300; ++round) {
    auto f = random_formula(rng, 4);
    auto nnf = to_nnf(f);
    ASSERT_TRUE(is_nnf(nnf)) << to_string(nnf);
    auto clauses = to_dnf(f);
    for (const auto& clause : clauses) {
      for (const auto& lit : clause) ASSERT_TRUE(is_literal(lit)) << to_string(lit);
    }
    CalculusQuery q;
    q.targets = {"x"};
    q.ranges = {{"x", RangeExpr::of("S")}};
    q.matrix = f;
    auto normal = to_calculus(to_prenex(q));
    for (std::size_t i = 0; i < envs.size(); ++i) {
      const bool expected = truth(f, envs[i]);
      ASSERT_EQ(truth(nnf, envs[i]), expected) << to_string(f);
      ASSERT_EQ(truth(clauses_formula(clauses), envs[i]), expected) << to_string(f);
      ASSERT_EQ(oracle_evaluate(q, cats[i]).size(), expected ? 1u : 0u) << to_string(f);
      ASSERT_EQ(oracle_evaluate(normal, cats[i]).size(), expected ? 1u : 0u) << to_string(f);
    }
  }
}

TEST(Normalize, DistributesConjunctionOverDisjunction) {
  auto f = parse_formula("(x.a = true || x.b = true) && x.c = true");
  auto clauses = to_dnf(f);
  ASSERT_EQ(clauses.size(), 2u);
  EXPECT_EQ(clauses[0].size(), 2u);
  EXPECT_EQ(clauses[1].size(), 2u);
}

TEST(Normalize, NegatedComparisonFlipsOperator) {
  auto nnf = to_nnf(parse_formula("!(x.a < 3 && x.b >= 2)"));
  EXPECT_EQ(to_string(nnf), to_string(parse_formula("x.a >= 3 || x.b < 2")));
}

TEST(Normalize, ClauseLimitIsEnforced) {
  std::vector<FormulaPtr> parts;
  for (int i = 0; i < 6; ++i) {
    parts.push_back(make_or(prop("a"), make_compare(AttributeTerm{"x", "n"}, CmpOp::eq, Value(i))));
  }
  auto f = make_all(parts);
  EXPECT_THROW(to_dnf(f, 32), CompileError);
  EXPECT_EQ(to_dnf(f, 64).size(), 64u);
}

TEST(Normalize, PrenexHoistsEveryQuantifier) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto g = gen_category(seed);
    auto q = gen_query(seed, g.cat, QueryFeatures::all());
    auto p = to_prenex(q);
    for (const auto& clause : p.clauses) {
      for (const auto& lit : clause) ASSERT_TRUE(is_literal(lit)) << to_string(q);
    }
    std::function<void(const FormulaPtr&, bool)> no_inner_quantifier = [&](const FormulaPtr& f, bool under) {
      if (f->is_quantifier()) {
        ASSERT_FALSE(under) << to_string(q);
      }
      for (const auto& c : f->children) no_inner_quantifier(c, under || !f->is_quantifier());
    };
    no_inner_quantifier(prenex_formula(q.matrix), false);
  }
}

TEST(Normalize, PointedQuantifierWhenRangeMayBeEmpty) {
  // forall over a range that might be empty cannot cross && unchanged
  auto f = prenex_formula(parse_formula("x.a = 1 && forall y in T : y.b = 2"));
  ASSERT_TRUE(f->is_quantifier());
  EXPECT_TRUE(f->pointed);
}

TEST(Normalize, RenamesToCanonicalNames) {
  auto q = parse_query("{ p | p in P && exists c in City : home(p) = c }");
  auto r = rename_variables(to_prenex(q));
  EXPECT_EQ(r.query.targets, std::vector<std::string>{"x1"});
  ASSERT_EQ(r.query.prefix.size(), 1u);
  EXPECT_EQ(r.query.prefix[0].var, "x2");
  EXPECT_EQ(r.mapping, (std::vector<std::pair<std::string, std::string>>{{"p", "x1"}, {"c", "x2"}}));
}

TEST(Normalize, ResultsInvariantOnGeneratedQueries) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto g = gen_category(seed, {4, 5, 4});
    auto q = gen_query(seed * 13, g.cat, QueryFeatures::all());
    auto base = oracle_evaluate(q, g.cat);
    auto normal = to_prenex(q);
    EXPECT_EQ(oracle_evaluate(to_calculus(normal), g.cat).cells(), base.cells()) << to_string(q);
    EXPECT_EQ(oracle_evaluate(to_calculus(rename_variables(normal).query), g.cat).cells(), base.cells())
        << to_string(q);
  }
}
