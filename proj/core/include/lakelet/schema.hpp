#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lakelet {

/// Inference lattice: kBool < kInt < kFloat < kString.
enum class DType { kBool = 0, kInt = 1, kFloat = 2, kString = 3 };

std::string_view to_string(DType t);
DType dtype_from_string(std::string_view s);

/// Least upper bound in the lattice.
constexpr DType widen(DType a, DType b) { return a < b ? b : a; }

constexpr bool is_numeric(DType t) { return t == DType::kInt || t == DType::kFloat; }

struct Field {
  std::string name;
  DType dtype = DType::kString;
  bool nullable = false;

  bool operator==(const Field&) const = default;
};

struct SchemaDescriptor {
  std::vector<Field> fields;

  std::optional<size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;

  bool operator==(const SchemaDescriptor&) const = default;
};

/// One typed cell: null | bool | int64 | double | string.
class Value {
 public:
  using Storage = std::variant<std::monostate, bool, int64_t, double, std::string>;

  Value() = default;
  Value(bool b) : v_(b) {}
  Value(int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}

  static Value null() { return Value(); }

  bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
  std::optional<DType> dtype() const;

  bool as_bool() const { return std::get<bool>(v_); }
  int64_t as_int() const { return std::get<int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }

  /// Numeric view for int or float values.
  std::optional<double> as_number() const;

  /// Text rendering used by CSV output and string coercion. Null -> "".
  std::string to_text() const;

  const Storage& storage() const { return v_; }

  /// Exact structural equality: int 1 and float 1.0 differ.
  bool operator==(const Value&) const = default;
  /// Structural total order (variant index first); used for multisets.
  bool operator<(const Value& o) const { return v_ < o.v_; }

 private:
  Storage v_;
};

using Row = std::vector<Value>;

/// Semantic three-way comparison: null sorts first, int and float compare
/// numerically, otherwise values of different kinds order by kind.
std::weak_ordering compare_values(const Value& a, const Value& b);

}  // namespace lakelet
