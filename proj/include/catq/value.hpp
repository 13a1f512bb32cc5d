#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace catq {

// Exact rational number, always normalized (gcd 1, positive denominator).
class Decimal {
 public:
  Decimal() = default;
  Decimal(std::int64_t numerator, std::int64_t denominator = 1);

  // Accepts "12", "-3.25", "7/4".
  static Decimal parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  // Terminating values print as plain decimals, others as "n/d".
  std::string to_string() const;
  bool is_terminating() const;

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Position of a node in an ordered tree: the path of 1-based child indexes.
class DeweyCode {
 public:
  DeweyCode() = default;
  explicit DeweyCode(std::vector<std::uint32_t> components);

  static DeweyCode parse(std::string_view text);

  const std::vector<std::uint32_t>& components() const { return components_; }
  std::size_t depth() const { return components_.size(); }
  std::string to_string() const;

  DeweyCode child(std::uint32_t index) const;

  bool is_parent_of(const DeweyCode& other) const;
  bool is_ancestor_of(const DeweyCode& other) const;
  bool is_sibling_of(const DeweyCode& other) const;

  friend bool operator==(const DeweyCode&, const DeweyCode&) = default;
  friend auto operator<=>(const DeweyCode& a, const DeweyCode& b) {
    return a.components_ <=> b.components_;
  }

 private:
  std::vector<std::uint32_t> components_;
};

enum class ValueKind { integer, text, boolean, decimal, dewey };

std::string_view kind_name(ValueKind kind);

class Value {
 public:
  using Storage = std::variant<std::int64_t, std::string, bool, Decimal, DeweyCode>;

  Value() : data_(std::int64_t{0}) {}
  Value(std::int64_t v) : data_(v) {}
  Value(int v) : data_(std::int64_t{v}) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(bool v) : data_(v) {}
  Value(Decimal v) : data_(v) {}
  Value(DeweyCode v) : data_(std::move(v)) {}

  ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const Decimal& as_decimal() const { return std::get<Decimal>(data_); }
  const DeweyCode& as_dewey() const { return std::get<DeweyCode>(data_); }

  const Storage& storage() const { return data_; }

  // Plain rendering, used for element keys and table output.
  std::string to_string() const;
  // Rendering as a calculus literal (quoted text, dewey("..") etc.).
  std::string to_literal() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Storage data_;
};

// Three-way comparison within one kind. Throws EvalError on a kind mismatch.
std::strong_ordering compare_values(const Value& a, const Value& b);

std::string quote_text(std::string_view text);

}  // namespace catq
