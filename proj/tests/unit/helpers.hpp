#pragma once

#include <set>
#include <string>
#include <vector>

#include "catq/io.hpp"
#include "catq/relation.hpp"

namespace catq::test {

using KeyRows = std::set<std::vector<std::string>>;

inline InstanceCategory category(std::string_view json) {
  return build_validated(category_data_from_json_text(json));
}

inline KeyRows keys(const Relation& r, const InstanceCategory& cat) {
  KeyRows out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<std::string> row;
    for (const auto& id : r.row(i)) row.push_back(id.is_null() ? "<null>" : cat.key_of(id));
    out.insert(std::move(row));
  }
  return out;
}

// People, cities, a relationship and an edge set; small enough to check by hand.
inline const char* kPeople = R"({"objects": [
  {"name": "P", "elements": [
    {"key": "p1", "record": {"age": 30, "name": "ann"}},
    {"key": "p2", "record": {"age": 40, "name": "bob"}},
    {"key": "p3", "record": {"age": 20, "name": "cy"}}]},
  {"name": "Young", "subset_of": "P", "members": ["p1", "p3"]},
  {"name": "City", "elements": ["paris", "rome"]},
  {"name": "Lives", "kind": "relationship",
   "components": [{"name": "who", "object": "P"}, {"name": "where", "object": "City"}],
   "elements": [{"key": "l1", "tuple": ["p1", "paris"]}, {"key": "l2", "tuple": ["p2", "rome"]},
                {"key": "l3", "tuple": ["p1", "rome"]}]},
  {"name": "E", "kind": "relationship",
   "components": [{"name": "src", "object": "P"}, {"name": "dst", "object": "P"}],
   "elements": [{"key": "e1", "tuple": ["p1", "p2"]}, {"key": "e2", "tuple": ["p2", "p3"]}]}],
 "morphisms": [{"name": "home", "domain": "P", "codomain": "City",
                "pairs": [["p1", "paris"], ["p2", "rome"], ["p3", "rome"]]}]})";

}  // namespace catq::test
