#include "catq/value.hpp"

#include <charconv>
#include <numeric>

#include "catq/errors.hpp"

namespace catq {
namespace {

std::int64_t parse_int(std::string_view text, std::string_view what) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return out;
}

std::int64_t checked_narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("decimal overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Decimal::Decimal(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw Error("decimal with zero denominator");
  __int128 n = numerator;
  __int128 d = denominator;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  num_ = checked_narrow(n);
  den_ = checked_narrow(d);
}

Decimal Decimal::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Decimal(parse_int(text.substr(0, slash), "decimal"),
                   parse_int(text.substr(slash + 1), "decimal"));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Decimal(parse_int(text, "decimal"));
  std::string digits(text.substr(0, dot));
  std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos) {
    throw Error("invalid decimal: '" + std::string(text) + "'");
  }
  if (frac.size() > 18) throw Error("decimal has too many fractional digits");
  digits += frac;
  if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Decimal(parse_int(digits, "decimal"), scale);
}

bool Decimal::is_terminating() const {
  std::int64_t d = den_;
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string Decimal::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  if (!is_terminating()) return std::to_string(num_) + "/" + std::to_string(den_);
  // scale to a power of ten
  __int128 n = num_;
  __int128 d = den_;
  int places = 0;
  while (d != 1) {
    if (d % 10 == 0) {
      d /= 10;
    } else if (d % 2 == 0) {
      d /= 2;
      n *= 5;
    } else {
      d /= 5;
      n *= 2;
    }
    ++places;
  }
  bool negative = n < 0;
  if (negative) n = -n;
  std::string digits;
  while (n > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(n % 10)));
    n /= 10;
  }
  while (static_cast<int>(digits.size()) <= places) digits.insert(digits.begin(), '0');
  digits.insert(digits.end() - places, '.');
  return negative ? "-" + digits : digits;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

DeweyCode::DeweyCode(std::vector<std::uint32_t> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error("dewey code needs at least one component");
  for (auto c : components_) {
    if (c == 0) throw Error("dewey components are positive");
  }
}

DeweyCode DeweyCode::parse(std::string_view text) {
  std::vector<std::uint32_t> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = text.find('.', start);
    auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    auto v = parse_int(piece, "dewey code");
    if (v <= 0 || v > UINT32_MAX) throw Error("invalid dewey code: '" + std::string(text) + "'");
    parts.push_back(static_cast<std::uint32_t>(v));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return DeweyCode(std::move(parts));
}

std::string DeweyCode::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(components_[i]);
  }
  return out;
}

DeweyCode DeweyCode::child(std::uint32_t index) const {
  auto parts = components_;
  parts.push_back(index);
  return DeweyCode(std::move(parts));
}

bool DeweyCode::is_parent_of(const DeweyCode& other) const {
  return other.depth() == depth() + 1 && is_ancestor_of(other);
}

bool DeweyCode::is_ancestor_of(const DeweyCode& other) const {
  if (other.depth() <= depth()) return false;
  for (std::size_t i = 0; i < depth(); ++i) {
    if (components_[i] != other.components_[i]) return false;
  }
  return true;
}

bool DeweyCode::is_sibling_of(const DeweyCode& other) const {
  if (depth() != other.depth() || depth() < 2) return false;
  for (std::size_t i = 0; i + 1 < depth(); ++i) {
    if (components_[i] != other.components_[i]) return false;
  }
  return components_.back() != other.components_.back();
}

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::integer: return "integer";
    case ValueKind::text: return "text";
    case ValueKind::boolean: return "boolean";
    case ValueKind::decimal: return "decimal";
    case ValueKind::dewey: return "dewey";
  }
  return "?";
}

std::string quote_text(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string Value::to_string() const {
  switch (kind()) {
    case ValueKind::integer: return std::to_string(as_int());
    case ValueKind::text: return as_text();
    case ValueKind::boolean: return as_bool() ? "true" : "false";
    case ValueKind::decimal: return as_decimal().to_string();
    case ValueKind::dewey: return as_dewey().to_string();
  }
  return {};
}

std::string Value::to_literal() const {
  switch (kind()) {
    case ValueKind::integer: return std::to_string(as_int());
    case ValueKind::text: return quote_text(as_text());
    case ValueKind::boolean: return as_bool() ? "true" : "false";
    case ValueKind::decimal: {
      const auto& d = as_decimal();
      if (d.denominator() != 1 && d.is_terminating()) return d.to_string();
      return "decimal(" + quote_text(d.to_string()) + ")";
    }
    case ValueKind::dewey: return "dewey(" + quote_text(as_dewey().to_string()) + ")";
  }
  return {};
}

std::strong_ordering compare_values(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) {
    throw EvalError("cannot compare " + std::string(kind_name(a.kind())) + " with " +
                    std::string(kind_name(b.kind())));
  }
  switch (a.kind()) {
    case ValueKind::integer: return a.as_int() <=> b.as_int();
    case ValueKind::text: {
      int c = a.as_text().compare(b.as_text());
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case ValueKind::boolean: return a.as_bool() <=> b.as_bool();
    case ValueKind::decimal: return a.as_decimal() <=> b.as_decimal();
    case ValueKind::dewey: return a.as_dewey() <=> b.as_dewey();
  }
  return std::strong_ordering::equal;
}

}  // namespace catq
