#pragma once

#include <span>
#include <string>
#include <vector>

#include "catq/category.hpp"

namespace catq {

struct Column {
  std::string name;    // variable / attribute label
  std::string object;  // object the column ranges over

  friend bool operator==(const Column&, const Column&) = default;
};

using Row = std::span<const ElementId>;

// Finite set of tuples. Rows are kept sorted in canonical order (lexicographic
// over ElementId order) and duplicate-free; every construction path goes
// through RelationBuilder::build, which establishes that.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t arity() const { return columns_.size(); }
  std::size_t size() const { return arity() == 0 ? 0 : cells_.size() / arity(); }
  bool empty() const { return cells_.empty(); }

  Row row(std::size_t i) const { return Row(cells_.data() + i * arity(), arity()); }
  const std::vector<ElementId>& cells() const { return cells_; }

  std::size_t column_index(std::string_view name) const;  // throws EvalError
  std::optional<std::size_t> find_column(std::string_view name) const;

  bool contains(Row row) const;

  // Same rows, new labels (arity must match).
  Relation relabeled(std::vector<Column> columns) const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  friend class RelationBuilder;
  std::vector<Column> columns_;
  std::vector<ElementId> cells_;
};

class RelationBuilder {
 public:
  explicit RelationBuilder(std::vector<Column> columns) : columns_(std::move(columns)) {}

  std::size_t arity() const { return columns_.size(); }
  void reserve(std::size_t rows) { cells_.reserve(rows * arity()); }
  void add(Row row);
  void add(std::initializer_list<ElementId> row) { add(Row(row.begin(), row.size())); }
  // Appends a single cell; callers push exactly arity() cells per row.
  void push(const ElementId& id) { cells_.push_back(id); }

  Relation build() &&;

 private:
  std::vector<Column> columns_;
  std::vector<ElementId> cells_;
};

int compare_rows(Row a, Row b);

// Human-readable dump, mainly for test diagnostics.
std::string debug_string(const Relation& rel, const InstanceCategory* cat = nullptr);

}  // namespace catq
