#include "lakelet/schema.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "lakelet/error.hpp"

namespace lakelet {

std::string_view to_string(DType t) {
  switch (t) {
    case DType::kBool: return "bool";
    case DType::kInt: return "int";
    case DType::kFloat: return "float";
    case DType::kString: return "string";
  }
  return "string";
}

DType dtype_from_string(std::string_view s) {
  if (s == "bool") return DType::kBool;
  if (s == "int") return DType::kInt;
  if (s == "float") return DType::kFloat;
  if (s == "string") return DType::kString;
  throw_error(ErrorCode::kParseError, "unknown dtype '" + std::string(s) + "'");
}

std::optional<size_t> SchemaDescriptor::index_of(std::string_view name) const {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> SchemaDescriptor::names() const {
  std::vector<std::string> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f.name);
  return out;
}

std::optional<DType> Value::dtype() const {
  switch (v_.index()) {
    case 1: return DType::kBool;
    case 2: return DType::kInt;
    case 3: return DType::kFloat;
    case 4: return DType::kString;
    default: return std::nullopt;
  }
}

std::optional<double> Value::as_number() const {
  if (auto* i = std::get_if<int64_t>(&v_)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v_)) return *d;
  return std::nullopt;
}

std::string Value::to_text() const {
  switch (v_.index()) {
    case 1: return as_bool() ? "true" : "false";
    case 2: return std::to_string(as_int());
    case 3: {
      // Shortest representation that parses back to the same double.
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), as_float());
      std::string s(buf, end);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case 4: return as_string();
    default: return "";
  }
}

std::weak_ordering compare_values(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) {
    if (a.is_null() && b.is_null()) return std::weak_ordering::equivalent;
    return a.is_null() ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  auto na = a.as_number();
  auto nb = b.as_number();
  if (na && nb) {
    if (a.dtype() == DType::kInt && b.dtype() == DType::kInt) {
      return a.as_int() <=> b.as_int();
    }
    if (*na < *nb) return std::weak_ordering::less;
    if (*na > *nb) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }
  auto ta = static_cast<int>(*a.dtype());
  auto tb = static_cast<int>(*b.dtype());
  if (ta != tb) return ta <=> tb;
  if (a.dtype() == DType::kBool) return a.as_bool() <=> b.as_bool();
  int c = a.as_string().compare(b.as_string());
  return c < 0 ? std::weak_ordering::less
               : (c > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent);
}

}  // namespace lakelet
