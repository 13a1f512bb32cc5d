#include "catq/relation.hpp"

#include <algorithm>
#include <numeric>

#include "catq/errors.hpp"

namespace catq {

int compare_rows(Row a, Row b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] == b[i]) continue;
    return a[i] < b[i] ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

std::optional<std::size_t> Relation::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Relation::column_index(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  throw EvalError("relation has no column '" + std::string(name) + "'");
}

bool Relation::contains(Row row) const {
  if (row.size() != arity() || empty()) return false;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    int c = compare_rows(this->row(mid), row);
    if (c == 0) return true;
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return false;
}

Relation Relation::relabeled(std::vector<Column> columns) const {
  if (columns.size() != arity()) throw EvalError("relabel with mismatched arity");
  Relation out(std::move(columns));
  out.cells_ = cells_;
  return out;
}

void RelationBuilder::add(Row row) {
  if (row.size() != arity()) throw EvalError("row arity mismatch");
  cells_.insert(cells_.end(), row.begin(), row.end());
}

Relation RelationBuilder::build() && {
  Relation out(std::move(columns_));
  const std::size_t k = out.arity();
  if (k == 0) {
    return out;
  }
  if (cells_.size() % k != 0) throw EvalError("relation built from a partial row");
  const std::size_t n = cells_.size() / k;
  auto row_at = [&](const std::vector<ElementId>& cells, std::size_t i) {
    return Row(cells.data() + i * k, k);
  };

  bool sorted_unique = true;
  for (std::size_t i = 1; i < n && sorted_unique; ++i) {
    sorted_unique = compare_rows(row_at(cells_, i - 1), row_at(cells_, i)) < 0;
  }
  if (sorted_unique) {
    out.cells_ = std::move(cells_);
    return out;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare_rows(row_at(cells_, a), row_at(cells_, b)) < 0;
  });
  out.cells_.reserve(cells_.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    Row r = row_at(cells_, order[idx]);
    if (idx > 0 && compare_rows(row_at(cells_, order[idx - 1]), r) == 0) continue;
    out.cells_.insert(out.cells_.end(), r.begin(), r.end());
  }
  return out;
}

std::string debug_string(const Relation& rel, const InstanceCategory* cat) {
  std::string out = "(";
  for (std::size_t i = 0; i < rel.arity(); ++i) {
    if (i) out += ", ";
    out += rel.columns()[i].name + ":" + rel.columns()[i].object;
  }
  out += ") {";
  for (std::size_t r = 0; r < rel.size(); ++r) {
    out += r ? ", (" : "(";
    auto row = rel.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += cat ? cat->key_of(row[i]) : row[i].object_name() + "#" + std::to_string(row[i].ordinal);
    }
    out += ")";
  }
  return out + "}";
}

}  // namespace catq
