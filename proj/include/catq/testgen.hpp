#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "catq/calculus.hpp"
#include "catq/category.hpp"
#include "catq/eval.hpp"

namespace catq {

struct GenLimits {
  int max_objects = 5;
  int max_elements = 6;
  int max_morphisms = 6;
};

using KeyPairs = std::set<std::pair<std::string, std::string>>;

// Side tables computed while generating, independently of the engine.
struct GroundTruth {
  std::map<std::string, std::map<std::string, std::string>> morphisms;  // name -> key -> key
  std::map<std::string, KeyPairs> tree_parent;    // tree object -> (parent, child)
  std::map<std::string, KeyPairs> tree_ancestor;  // tree object -> (ancestor, descendant)

  struct Graph {
    std::string nodes;               // node object
    std::vector<std::string> keys;   // node keys, matrix order
    std::vector<std::vector<bool>> adjacency;
    std::vector<std::vector<bool>> closure;  // paths of length >= 1
  };
  std::map<std::string, Graph> graphs;  // edge relationship -> graph
};

struct GeneratedCategory {
  CategoryData data;
  InstanceCategory cat;
  GroundTruth truth;
};

GeneratedCategory gen_category(std::uint64_t seed, const GenLimits& limits = {});

// Transitive closure by Floyd-Warshall over a boolean matrix.
std::vector<std::vector<bool>> warshall_closure(std::vector<std::vector<bool>> adjacency);

// Random digraph on `nodes` nodes (keys n1..nN) as a category with node
// object "N" and edge relationship "E".
GeneratedCategory gen_digraph(std::uint64_t seed, int nodes, double edge_probability);

// Random ordered tree of `nodes` nodes with dewey payloads, object "T".
GeneratedCategory gen_tree(std::uint64_t seed, int nodes);

struct QueryFeatures {
  bool morph_eq = true;
  bool compare = true;
  bool forall = true;
  bool exists = true;
  bool tree = true;
  bool reach = true;
  bool nhop = true;
  bool relationship_targets = true;
  bool disjunction = true;
  bool negation = true;
  bool range_ops = true;
  int max_quantifier_depth = 2;

  static QueryFeatures none();
  static QueryFeatures all() { return {}; }
};

// Names of the individual constructs, for stratified sampling.
std::vector<std::string> feature_names(const QueryFeatures& features);

// Safe query over `cat`. When `focus` names a feature the query is made to
// contain that construct if the category allows it.
CalculusQuery gen_query(std::uint64_t seed, const InstanceCategory& cat,
                        const QueryFeatures& features, const std::string& focus = {});

// Constructs present in a query, using the names of feature_names().
std::set<std::string> query_features(const CalculusQuery& q);

// Random instance of one algebra operator, for the calculus simulation check.
struct SimCase {
  CategoryData data;
  InstanceCategory cat;
  SimOp op;
};

// "map", "select", "project", "divide", "tree", "reach", "nhop", "cat", "lim"
const std::vector<std::string>& sim_op_kinds();
SimCase gen_sim_case(std::uint64_t seed, std::string_view kind);

struct TestCase {
  CategoryData data;
  CalculusQuery query;
};

// Returns true while the case still fails.
using FailurePredicate = std::function<bool(const TestCase&)>;

// Greedy deletion of literals, quantifiers, targets, elements, morphisms and
// objects while the failure persists. Candidates that are invalid or unsafe
// are skipped, so the result stays a valid safe case.
TestCase shrink(TestCase failing, const FailurePredicate& still_fails);

std::string case_to_json(const TestCase& c);
TestCase case_from_json(std::string_view text);

}  // namespace catq
