#include <gtest/gtest.h>

#include <map>
#include <random>

#include "catq/algebra.hpp"
#include "catq/errors.hpp"
#include "catq/testgen.hpp"
#include "helpers.hpp"

using namespace catq;
using test::KeyRows;
using test::keys;

namespace {

// All tuples of the diagram objects (in diagram order) that satisfy every
// constraint, checked against the generator's own morphism tables.
KeyRows brute_force_lim(const GeneratedCategory& g, const DiagramSpec& spec) {
  std::vector<std::vector<std::string>> members;
  for (const auto& name : spec.objects) {
    std::vector<std::string> ks;
    for (const auto& id : g.cat.object(name).members) ks.push_back(g.cat.key_of(id));
    members.push_back(ks);
  }
  KeyRows out;
  std::vector<std::string> tuple;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == members.size()) {
      for (const auto& c : spec.constraints) {
        auto s = std::find(spec.objects.begin(), spec.objects.end(), c.source) - spec.objects.begin();
        auto t = std::find(spec.objects.begin(), spec.objects.end(), c.target) - spec.objects.begin();
        const auto& table = g.truth.morphisms.at(c.morphism);
        auto it = table.find(tuple[static_cast<std::size_t>(s)]);
        if (it == table.end() || it->second != tuple[static_cast<std::size_t>(t)]) return;
      }
      out.insert(tuple);
      return;
    }
    for (const auto& k : members[i]) {
      tuple.push_back(k);
      walk(i + 1);
      tuple.pop_back();
    }
  };
  walk(0);
  return out;
}

}  // namespace

TEST(Lim, MatchesBruteForceOnRandomDiagrams) {
  int nonempty = 0, constrained = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto g = gen_category(seed, {4, 4, 4});
    DiagramSpec spec;
    for (const auto& o : g.data.objects) spec.objects.push_back(o.name);
    for (const auto& m : g.data.morphisms) spec.constraints.push_back({m.name, m.domain, m.codomain});
    if (!spec.constraints.empty()) ++constrained;
    auto lim = op_lim(op_cat(g.cat, spec));
    ASSERT_EQ(lim.arity(), spec.objects.size());
    for (std::size_t i = 0; i < spec.objects.size(); ++i) EXPECT_EQ(lim.columns()[i].name, spec.objects[i]);
    auto expected = brute_force_lim(g, spec);
    if (!expected.empty()) ++nonempty;
    ASSERT_EQ(keys(lim, g.cat), expected) << "seed " << seed;
  }
  EXPECT_GT(nonempty, 50);
  EXPECT_GT(constrained, 100);
}

TEST(Lim, WithoutArrowsIsTheProduct) {
  auto cat = test::category(test::kPeople);
  auto lim = op_lim(op_cat(cat, {{"P", "City"}, {}}));
  EXPECT_EQ(lim.size(), 6u);
}

TEST(Cat, RejectsMistypedConstraint) {
  auto cat = test::category(test::kPeople);
  EXPECT_THROW(op_cat(cat, {{"P", "City"}, {{"home", "City", "P"}}}), EvalError);
  EXPECT_THROW(op_cat(cat, {{"P"}, {{"home", "P", "City"}}}), EvalError);
}

TEST(Divide, MatchesDoubleLoop) {
  auto cat = test::category(R"({"objects": [
    {"name": "A", "elements": ["a1", "a2", "a3", "a4"]},
    {"name": "B", "elements": ["b1", "b2", "b3"]}]})");
  const auto& a = cat.object("A").members;
  const auto& b = cat.object("B").members;
  std::mt19937 rng(5);
  int nonempty = 0;
  for (int round = 0; round < 300; ++round) {
    RelationBuilder dividend({{"x", "A"}, {"y", "B"}});
    RelationBuilder divisor({Column{"y", "B"}});
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (rng() % 3 != 0) {
          dividend.add({a[i], b[j]});
          pairs.insert({i, j});
        }
      }
    }
    std::vector<std::size_t> ys;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (rng() % 2) {
        divisor.add({b[j]});
        ys.push_back(j);
      }
    }
    auto dvd = std::move(dividend).build();
    auto q = op_divide(cat, dvd, std::move(divisor).build(), {"y"});
    KeyRows expected;
    for (std::size_t i = 0; i < a.size(); ++i) {
      bool in_dividend = false, all = true;
      for (std::size_t j = 0; j < b.size(); ++j) in_dividend = in_dividend || pairs.count({i, j});
      for (auto j : ys) all = all && pairs.count({i, j});
      if (in_dividend && all) expected.insert({cat.key_of(a[i])});
    }
    if (!expected.empty()) ++nonempty;
    ASSERT_EQ(keys(q, cat), expected) << "round " << round;
  }
  EXPECT_GT(nonempty, 100);
}

TEST(Divide, UniverseSuppliesCandidatesForEmptyDividend) {
  auto cat = test::category(R"({"objects": [
    {"name": "A", "elements": ["a1", "a2"]}, {"name": "B", "elements": []}]})");
  Relation dividend({{"x", "A"}, {"y", "B"}});
  Relation divisor({Column{"y", "B"}});
  auto universe = op_scan(cat, "A", "x");
  EXPECT_TRUE(op_divide(cat, dividend, divisor, {"y"}).empty());
  EXPECT_EQ(op_divide(cat, dividend, divisor, {"y"}, &universe).size(), 2u);
}

TEST(SetOps, AgreeWithStdSet) {
  auto cat = test::category(R"({"objects": [{"name": "A", "elements": ["a", "b", "c", "d", "e"]}]})");
  const auto& m = cat.object("A").members;
  std::mt19937 rng(9);
  for (int round = 0; round < 200; ++round) {
    RelationBuilder l({Column{"x", "A"}}), r({Column{"x", "A"}});
    std::set<std::string> ls, rs;
    for (const auto& id : m) {
      if (rng() % 2) { l.add({id}); ls.insert(cat.key_of(id)); }
      if (rng() % 2) { r.add({id}); rs.insert(cat.key_of(id)); }
    }
    auto lr = std::move(l).build();
    auto rr = std::move(r).build();
    KeyRows u, i, d;
    for (const auto& k : ls) {
      u.insert({k});
      if (rs.count(k)) i.insert({k}); else d.insert({k});
    }
    for (const auto& k : rs) u.insert({k});
    EXPECT_EQ(keys(op_union(cat, lr, rr), cat), u);
    EXPECT_EQ(keys(op_intersect(cat, lr, rr), cat), i);
    EXPECT_EQ(keys(op_difference(cat, lr, rr), cat), d);
  }
}

TEST(Relation, BuilderSortsAndDeduplicates) {
  auto cat = test::category(R"({"objects": [{"name": "A", "elements": ["a", "b"]}]})");
  const auto& m = cat.object("A").members;
  RelationBuilder b({Column{"x", "A"}});
  b.add({m[1]});
  b.add({m[0]});
  b.add({m[1]});
  auto r = std::move(b).build();
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.row(0)[0], m[0]);
  EXPECT_TRUE(r.contains(Row(&m[1], 1)));
}

TEST(MapSelectProject, OnPeople) {
  auto cat = test::category(test::kPeople);
  // map yields the image of its input
  EXPECT_EQ(keys(op_map(cat, "home", "P"), cat), (KeyRows{{"paris"}, {"rome"}}));
  auto old = op_select(cat, op_scan(cat, "P", "x"),
                       Comparison{AttributeTerm{"x", "age"}, CmpOp::ge, Value(30)});
  EXPECT_EQ(keys(old, cat), (KeyRows{{"p1"}, {"p2"}}));
  auto lives = op_expand(cat, "Lives");
  EXPECT_EQ(keys(op_project(lives, {lives.columns().back().name}), cat), (KeyRows{{"paris"}, {"rome"}}));
}

TEST(Reach, MatchesWarshallOnRandomDigraphs) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const int nodes = 1 + static_cast<int>(seed % 15);
    auto g = gen_digraph(seed, nodes, std::min(1.0, 1.5 / nodes));
    const auto& t = g.truth.graphs.at("E");
    KeyRows expected;
    for (std::size_t a = 0; a < t.keys.size(); ++a)
      for (std::size_t b = 0; b < t.keys.size(); ++b)
        if (t.closure[a][b]) expected.insert({t.keys[a], t.keys[b]});
    ASSERT_EQ(keys(op_get_reach(g.cat, "N", "N", "E"), g.cat), expected) << "seed " << seed;
  }
}

TEST(Reach, IsIrreflexiveWithoutCycle) {
  auto cat = test::category(test::kPeople);
  auto r = keys(op_get_reach(cat, "P", "P", "E"), cat);
  EXPECT_EQ(r, (KeyRows{{"p1", "p2"}, {"p1", "p3"}, {"p2", "p3"}}));
  EXPECT_FALSE(kReachIncludesEmptyPath);
}

TEST(Reach, RestrictsEndpointsToInputs) {
  auto cat = test::category(test::kPeople);
  EXPECT_EQ(keys(op_get_reach(cat, "Young", "P", "E"), cat), (KeyRows{{"p1", "p2"}, {"p1", "p3"}}));
}

TEST(NHop, MatchesBooleanMatrixPower) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int nodes = 1 + static_cast<int>(seed % 8);
    auto g = gen_digraph(seed * 31, nodes, 0.35);
    const auto& t = g.truth.graphs.at("E");
    const std::size_t n = t.keys.size();
    auto power = t.adjacency;
    for (int hops = 1; hops <= 4; ++hops) {
      KeyRows expected;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (power[a][b]) expected.insert({t.keys[a], t.keys[b]});
      ASSERT_EQ(keys(op_get_nhop(g.cat, "N", "N", "E", hops), g.cat), expected)
          << "seed " << seed << " hops " << hops;
      std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t m = 0; m < n; ++m)
          if (power[a][m])
            for (std::size_t b = 0; b < n; ++b) next[a][b] = next[a][b] || t.adjacency[m][b];
      power = std::move(next);
    }
  }
}

TEST(Tree, AxesMatchGeneratedTruth) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = gen_tree(seed, 1 + static_cast<int>(seed % 25));
    KeyRows parent, ancestor, sibling;
    std::map<std::string, std::string> parent_of;
    for (const auto& [p, c] : g.truth.tree_parent.at("T")) {
      parent.insert({p, c});
      parent_of[c] = p;
    }
    for (const auto& [a, d] : g.truth.tree_ancestor.at("T")) ancestor.insert({a, d});
    for (const auto& [x, px] : parent_of)
      for (const auto& [y, py] : parent_of)
        if (x != y && px == py) sibling.insert({x, y});
    EXPECT_EQ(keys(op_get_parent(g.cat, "T", "T"), g.cat), parent) << "seed " << seed;
    EXPECT_EQ(keys(op_get_ancestor(g.cat, "T", "T"), g.cat), ancestor) << "seed " << seed;
    EXPECT_EQ(keys(op_get_sibling(g.cat, "T", "T"), g.cat), sibling) << "seed " << seed;
  }
}
