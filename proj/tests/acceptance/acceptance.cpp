// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "catq/bench.hpp"
#include "catq/compiler.hpp"
#include "catq/errors.hpp"
#include "catq/io.hpp"
#include "catq/testgen.hpp"
#include "catq/verify.hpp"

using namespace catq;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr int kEquivalenceCases = 2000;
constexpr double kEquivalenceSeconds = 300;
constexpr int kInstances = 200;
constexpr int kReachGraphs = 500;
constexpr int kMaxGraphNodes = 30;
constexpr int kNormalizationQueries = 500;
constexpr double kLimSlope = 3.0;
constexpr double kLimSlopeTolerance = 0.7;
constexpr double kReachLinearFactor = 3.0;
constexpr double kComplexitySeconds = 120;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

template <typename T>
std::set<T> to_set(const Relation& r, const InstanceCategory& cat) {
  std::set<T> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    T row;
    for (const auto& id : r.row(i)) row.push_back(cat.key_of(id));
    out.insert(row);
  }
  return out;
}
using KeyRows = std::set<std::vector<std::string>>;

Outcome equivalence() {
  auto start = std::chrono::steady_clock::now();
  VerifyOptions o;
  o.queries = kEquivalenceCases;
  o.seed = 20240601;
  o.limits = {4, 5, 4};
  o.features = QueryFeatures::all();
  o.features.max_quantifier_depth = 2;
  auto report = run_verify(o);
  double secs = seconds_since(start);
  std::string detail = std::to_string(report.cases) + " cases, " + std::to_string(report.mismatches) +
                       " mismatches, " + std::to_string(report.skipped) + " skipped, " + fmt(secs) + "s";
  for (const auto& name : feature_names(o.features)) {
    int n = report.feature_cases.count(name) ? report.feature_cases.at(name) : 0;
    if (n * 10 < report.cases) detail += "; feature " + name + " under 10%";
  }
  bool ok = report.mismatches == 0 && report.skipped == 0 && secs < kEquivalenceSeconds &&
            detail.find("under 10%") == std::string::npos;
  if (!ok && report.first_failure) detail += "\n" + report.text;
  return {ok, detail};
}

Outcome backward_simulation() {
  std::string detail;
  bool ok = true;
  for (const auto& kind : sim_op_kinds()) {
    int mismatches = 0;
    for (int i = 0; i < kInstances; ++i) {
      auto c = gen_sim_case(case_seed(77, i), kind);
      try {
        auto simulated = oracle_evaluate(simulate_algebra_in_calculus(c.op, c.cat), c.cat);
        auto direct = evaluate_sim_op(c.op, c.cat);
        if (!same_rows(simulated, direct)) ++mismatches;
      } catch (const Error&) {
        ++mismatches;
      }
    }
    detail += (detail.empty() ? "" : ", ") + kind + "=" + std::to_string(mismatches);
    ok = ok && mismatches == 0;
  }
  return {ok, std::to_string(kInstances) + " instances per operator, mismatches: " + detail};
}

Outcome limit_projection() {
  int violations = 0, nonempty = 0;
  for (int i = 0; i < kInstances; ++i) {
    std::mt19937_64 rng(case_seed(91, i));
    auto between = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int k = between(2, 5);
    CategoryData data;
    DiagramSpec spec;
    for (int s = 0; s < k; ++s) {
      int n = between(1, 5);
      ObjectData o;
      o.name = "S" + std::to_string(s + 1);
      for (int e = 0; e < n; ++e) o.elements.push_back({"s" + std::to_string(s + 1) + "_" + std::to_string(e), Value(e), {}});
      spec.objects.push_back(o.name);
      data.objects.push_back(std::move(o));
    }
    for (int s = 0; s + 1 < k; ++s) {
      MorphismData m{"f" + std::to_string(s + 1), spec.objects[static_cast<std::size_t>(s)],
                     spec.objects[static_cast<std::size_t>(s + 1)], {}};
      for (const auto& e : data.objects[static_cast<std::size_t>(s)].elements) {
        const auto& next = data.objects[static_cast<std::size_t>(s + 1)].elements;
        m.pairs.emplace_back(e.key, next[static_cast<std::size_t>(between(0, static_cast<int>(next.size()) - 1))].key);
      }
      spec.constraints.push_back({m.name, m.domain, m.codomain});
      data.morphisms.push_back(std::move(m));
    }
    auto cat = build_validated(data);
    auto lim = op_lim(op_cat(cat, spec));
    if (!lim.empty()) ++nonempty;
    for (int s = 0; s + 1 < k; ++s) {
      auto here = op_project(lim, {lim.columns()[static_cast<std::size_t>(s)].name});
      auto next = op_project(lim, {lim.columns()[static_cast<std::size_t>(s + 1)].name});
      for (std::size_t r = 0; r < here.size(); ++r) {
        auto image = cat.apply_morphism("f" + std::to_string(s + 1), here.row(r)[0]);
        std::vector<ElementId> row = {image};
        if (!next.contains(Row(row.data(), 1))) ++violations;
      }
    }
  }
  return {violations == 0 && nonempty > 0, std::to_string(kInstances) + " chain diagrams (" +
                                               std::to_string(nonempty) + " non-empty limits), " +
                                               std::to_string(violations) + " violations"};
}

Outcome nested_division() {
  int mismatches = 0, nonempty = 0, missing_divide = 0;
  for (int i = 0; i < kInstances; ++i) {
    std::mt19937_64 rng(case_seed(313, i));
    auto between = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int n = 1 + i % 3;
    CategoryData data;
    std::vector<std::vector<std::string>> keys;
    for (int s = 0; s <= n; ++s) {
      ObjectData o;
      o.name = "S" + std::to_string(s + 1);
      const int size = s == 0 ? between(1, 5) : between(0, 3);
      keys.emplace_back();
      for (int e = 0; e < size; ++e) {
        keys.back().push_back("s" + std::to_string(s + 1) + "_" + std::to_string(e));
        o.elements.push_back({keys.back().back(), Value(e), {}});
      }
      data.objects.push_back(std::move(o));
    }
    ObjectData r;
    r.name = "R";
    r.kind = ObjectKind::relationship;
    for (int s = 0; s <= n; ++s) r.components.push_back({"c" + std::to_string(s + 1), "S" + std::to_string(s + 1)});
    // dense relation so that some quotients survive
    std::vector<std::vector<std::string>> tuples = {{}};
    for (const auto& ks : keys) {
      std::vector<std::vector<std::string>> next;
      for (const auto& t : tuples) {
        for (const auto& k : ks) {
          auto u = t;
          u.push_back(k);
          next.push_back(std::move(u));
        }
      }
      tuples = std::move(next);
    }
    std::set<std::vector<std::string>> present;
    for (const auto& t : tuples) {
      if (between(0, 9) < 8) {
        present.insert(t);
        r.elements.push_back({"r" + std::to_string(r.elements.size()), Value(0), t});
      }
    }
    data.objects.push_back(std::move(r));
    auto cat = build_validated(data);

    // { x1 | x1 in S1 && forall x2 in S2 : ... forall x(n+1) : exists r in R : R_c1(r) = x1 && ... }
    std::string text = "{ x1 | x1 in S1 && ";
    for (int s = 2; s <= n + 1; ++s) text += "forall x" + std::to_string(s) + " in S" + std::to_string(s) + " : ";
    text += "exists r in R : ";
    for (int s = 1; s <= n + 1; ++s) {
      text += (s > 1 ? " && " : "") + std::string("R_c") + std::to_string(s) + "(r) = x" + std::to_string(s);
    }
    text += " }";
    auto compiled = compile_query(parse_query(text), cat);
    bool has_divide = std::any_of(compiled.plan.nodes.begin(), compiled.plan.nodes.end(),
                                  [](const PlanNode& p) { return p.op == PlanOp::divide; });
    if (!has_divide) ++missing_divide;
    auto result = to_set<std::vector<std::string>>(evaluate(compiled.plan, cat), cat);

    // brute force over the divisor product
    KeyRows expected;
    for (const auto& x1 : keys[0]) {
      std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
      bool all = true;
      bool empty_product = std::any_of(keys.begin() + 1, keys.end(), [](const auto& k) { return k.empty(); });
      while (!empty_product) {
        std::vector<std::string> t = {x1};
        for (int s = 0; s < n; ++s) t.push_back(keys[static_cast<std::size_t>(s + 1)][odo[static_cast<std::size_t>(s)]]);
        if (!present.count(t)) {
          all = false;
          break;
        }
        int s = n - 1;
        while (s >= 0 && ++odo[static_cast<std::size_t>(s)] == keys[static_cast<std::size_t>(s + 1)].size()) {
          odo[static_cast<std::size_t>(s)] = 0;
          --s;
        }
        if (s < 0) break;
      }
      if (all) expected.insert({x1});
    }
    if (!expected.empty()) ++nonempty;
    if (result != expected) ++mismatches;
  }
  return {mismatches == 0 && missing_divide == 0,
          std::to_string(kInstances) + " instances (n = 1, 2, 3), " + std::to_string(nonempty) +
              " non-empty, " + std::to_string(mismatches) + " mismatches, " + std::to_string(missing_divide) +
              " plans without divide"};
}

Outcome reach_pipeline() {
  int mismatches = 0, shape_errors = 0, nonempty = 0;
  for (int i = 0; i < kInstances; ++i) {
    std::mt19937_64 rng(case_seed(555, i));
    auto between = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int nodes = between(1, kMaxGraphNodes);
    auto gen = gen_digraph(case_seed(556, i), nodes, std::min(1.0, 2.0 / nodes));
    auto data = gen.data;
    const auto& truth = gen.truth.graphs.at("E");
    ObjectData s1{"S1", ObjectKind::entity, "N", {}, {}, {}}, s2{"S2", ObjectKind::entity, "N", {}, {}, {}};
    for (const auto& k : truth.keys) {
      if (between(0, 1)) s1.members.push_back(k);
      if (between(0, 1)) s2.members.push_back(k);
    }
    ObjectData s3;
    s3.name = "S3";
    const int groups = between(1, 4);
    for (int g = 0; g < groups; ++g) s3.elements.push_back({"g" + std::to_string(g), Value(g), {}});
    MorphismData f1{"f1", "N", "S3", {}}, f2{"f2", "N", "S3", {}};
    std::map<std::string, std::string> g1, g2;
    for (const auto& k : truth.keys) {
      g1[k] = "g" + std::to_string(between(0, groups - 1));
      g2[k] = "g" + std::to_string(between(0, groups - 1));
      f1.pairs.emplace_back(k, g1[k]);
      f2.pairs.emplace_back(k, g2[k]);
    }
    data.objects.push_back(s1);
    data.objects.push_back(s2);
    data.objects.push_back(s3);
    data.morphisms.push_back(f1);
    data.morphisms.push_back(f2);
    auto cat = build_validated(data);

    auto q = parse_query("{ x1, x2 | x1 in S1 && x2 in S2 && reach(x1, x2, E) && "
                         "(exists x3 in S3 : f1(x1) = x3 && f2(x2) = x3) }");
    auto plan = compile_query(q, cat).plan;
    // getReach -> lim over 4 objects and 4 arrows -> project onto (x1, x2)
    const auto& root = plan.node(plan.root);
    bool shape = root.op == PlanOp::project && root.columns.size() == 2;
    if (shape) {
      const auto& lim = plan.node(root.inputs[0]);
      shape = lim.op == PlanOp::lim;
      if (shape) {
        const auto& c = plan.node(lim.inputs[0]);
        shape = c.op == PlanOp::cat && c.inputs.size() == 4 && c.arrows.size() == 4 &&
                std::any_of(c.inputs.begin(), c.inputs.end(),
                            [&](int id) { return plan.node(id).op == PlanOp::get_reach; });
      }
    }
    if (!shape) ++shape_errors;
    auto result = to_set<std::vector<std::string>>(evaluate(plan, cat), cat);

    KeyRows expected;
    for (std::size_t a = 0; a < truth.keys.size(); ++a) {
      for (std::size_t b = 0; b < truth.keys.size(); ++b) {
        const auto& x1 = truth.keys[a];
        const auto& x2 = truth.keys[b];
        bool in1 = std::count(s1.members.begin(), s1.members.end(), x1) > 0;
        bool in2 = std::count(s2.members.begin(), s2.members.end(), x2) > 0;
        if (in1 && in2 && truth.closure[a][b] && g1[x1] == g2[x2]) expected.insert({x1, x2});
      }
    }
    if (!expected.empty()) ++nonempty;
    if (result != expected) ++mismatches;
  }
  return {mismatches == 0 && shape_errors == 0,
          std::to_string(kInstances) + " digraphs, " + std::to_string(nonempty) + " non-empty, " +
              std::to_string(mismatches) + " mismatches, " + std::to_string(shape_errors) + " plan shape errors"};
}

Outcome expressiveness() {
  const fs::path dir = fs::path(CATQ_TEST_DATA) / "expressive";
  auto cat = load_workspace(dir / "workspace.json");
  int total = 0, matched = 0;
  std::string failed;
  std::vector<fs::path> queries;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".cq") queries.push_back(e.path());
  }
  std::sort(queries.begin(), queries.end());
  for (const auto& q : queries) {
    ++total;
    auto expected = read_file(fs::path(q).replace_extension(".expected"));
    try {
      auto result = evaluate(compile_query(parse_query(read_file(q)), cat).plan, cat);
      if (relation_to_json_lines(result, cat) == expected) {
        ++matched;
        continue;
      }
    } catch (const Error& e) {
      failed += " " + q.stem().string() + "(" + e.what() + ")";
      continue;
    }
    failed += " " + q.stem().string();
  }
  return {total == 12 && matched == 12,
          std::to_string(matched) + "/" + std::to_string(total) + " golden results matched" +
              (failed.empty() ? "" : "; failed:" + failed)};
}

Outcome reach_vs_warshall() {
  int mismatches = 0, nhop_mismatches = 0;
  for (int i = 0; i < kReachGraphs; ++i) {
    std::mt19937_64 rng(case_seed(808, i));
    const int nodes = std::uniform_int_distribution<int>(1, kMaxGraphNodes)(rng);
    const double p = std::uniform_real_distribution<double>(0.0, 3.0 / nodes)(rng);
    auto gen = gen_digraph(case_seed(809, i), nodes, std::min(1.0, p));
    const auto& truth = gen.truth.graphs.at("E");
    KeyRows expected;
    for (std::size_t a = 0; a < truth.keys.size(); ++a) {
      for (std::size_t b = 0; b < truth.keys.size(); ++b) {
        if (truth.closure[a][b]) expected.insert({truth.keys[a], truth.keys[b]});
      }
    }
    auto reach = op_get_reach(gen.cat, "N", "N", "E");
    if (to_set<std::vector<std::string>>(reach, gen.cat) != expected) ++mismatches;
    KeyRows hops;
    for (int n = 1; n <= nodes; ++n) {
      auto h = to_set<std::vector<std::string>>(op_get_nhop(gen.cat, "N", "N", "E", n), gen.cat);
      hops.insert(h.begin(), h.end());
    }
    if (hops != expected) ++nhop_mismatches;
  }
  return {mismatches == 0 && nhop_mismatches == 0,
          std::to_string(kReachGraphs) + " digraphs, " + std::to_string(mismatches) +
              " getReach mismatches, " + std::to_string(nhop_mismatches) + " nhop-union mismatches"};
}

Outcome complexity() {
  auto start = std::chrono::steady_clock::now();
  auto lim = bench_lim({10, 20, 40, 80}, 3, 7);
  std::vector<double> x, t;
  for (const auto& r : lim) {
    x.push_back(r.n);
    t.push_back(r.seconds);
  }
  double slope = loglog_slope(x, t);
  auto reach = bench_reach({2000, 4000, 8000, 16000, 32000}, 9);
  double lo = 1e300, hi = 0;
  for (const auto& r : reach) {
    double per_edge = r.seconds / static_cast<double>(r.edges);
    lo = std::min(lo, per_edge);
    hi = std::max(hi, per_edge);
  }
  double factor = hi / lo;
  double secs = seconds_since(start);
  bool ok = std::abs(slope - kLimSlope) <= kLimSlopeTolerance && factor <= kReachLinearFactor &&
            secs < kComplexitySeconds;
  return {ok, "lim log-log slope " + fmt(slope) + " (target 3.0 +/- 0.7), getReach time/edge spread " +
                  fmt(factor) + "x (limit 3x), " + fmt(secs) + "s"};
}

Outcome normalization() {
  int mismatches = 0;
  int total = 0;
  const auto features = feature_names(QueryFeatures::all());
  for (int i = 0; i < kNormalizationQueries; ++i) {
    auto seed = case_seed(4242, i);
    auto gen = gen_category(seed, {4, 5, 4});
    auto q = gen_query(seed ^ 0x77, gen.cat, QueryFeatures::all(), features[static_cast<std::size_t>(i) % features.size()]);
    try {
      auto base = oracle_evaluate(q, gen.cat);
      // prenex alone, before clause expansion
      CalculusQuery prenex = q;
      prenex.matrix = prenex_formula(q.matrix);
      // full normal form: prefix + DNF matrix
      auto normal = to_prenex(q);
      auto dnf = to_calculus(normal);
      auto renamed = to_calculus(rename_variables(normal).query);
      // renaming changes column names, so rows are compared positionally
      for (const auto* v : {&prenex, &dnf, &renamed}) {
        ++total;
        if (oracle_evaluate(*v, gen.cat).cells() != base.cells()) ++mismatches;
      }
    } catch (const Error&) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(kNormalizationQueries) + " queries, " + std::to_string(total) +
                               " normalized forms, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"equivalence campaign (calculus vs compiled algebra)", equivalence},
      {"algebra operators simulated in the calculus", backward_simulation},
      {"limit projection property on chain diagrams", limit_projection},
      {"division for nested universal quantifiers", nested_division},
      {"reachability pipeline getReach -> lim -> project", reach_pipeline},
      {"expressiveness suite (relational, graph, XML twig)", expressiveness},
      {"getReach against Floyd-Warshall and nhop unions", reach_vs_warshall},
      {"complexity smoke test", complexity},
      {"normalization preserves query results", normalization},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
