#include "reference_eval.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace lakelet::reference {

namespace {

using query::Table;

struct Invalid {};

bool numeric(DType t) { return t == DType::kInt || t == DType::kFloat; }
bool comparable(DType a, DType b) { return a == b || (numeric(a) && numeric(b)); }

size_t column(const SchemaDescriptor& s, const std::string& name) {
  for (size_t i = 0; i < s.fields.size(); ++i) {
    if (s.fields[i].name == name) return i;
  }
  throw Invalid{};
}

bool has_column(const SchemaDescriptor& s, const std::string& name) {
  for (const auto& f : s.fields) {
    if (f.name == name) return true;
  }
  return false;
}

// Kinds: 0 null, 1 bool, 2 number, 3 string.
int kind(const Value& v) {
  if (v.is_null()) return 0;
  switch (*v.dtype()) {
    case DType::kBool: return 1;
    case DType::kInt:
    case DType::kFloat: return 2;
    case DType::kString: return 3;
  }
  return 3;
}

int sign(bool less, bool greater) { return less ? -1 : (greater ? 1 : 0); }

int cmp(const Value& a, const Value& b) {
  int ka = kind(a), kb = kind(b);
  if (ka != kb) return sign(ka < kb, ka > kb);
  switch (ka) {
    case 0: return 0;
    case 1: return sign(!a.as_bool() && b.as_bool(), a.as_bool() && !b.as_bool());
    case 2:
      if (a.dtype() == DType::kInt && b.dtype() == DType::kInt) {
        return sign(a.as_int() < b.as_int(), a.as_int() > b.as_int());
      } else {
        long double x = a.dtype() == DType::kInt ? static_cast<long double>(a.as_int()) : a.as_float();
        long double y = b.dtype() == DType::kInt ? static_cast<long double>(b.as_int()) : b.as_float();
        return sign(x < y, x > y);
      }
    default: {
      int c = a.as_string().compare(b.as_string());
      return sign(c < 0, c > 0);
    }
  }
}

bool test(const query::Predicate& p, const SchemaDescriptor& s, const Row& row) {
  using K = query::Predicate::Kind;
  switch (p.kind()) {
    case K::kTrue: return true;
    case K::kIsNull: return row[column(s, p.column())].is_null();
    case K::kNot: return !test(p.lhs(), s, row);
    case K::kAnd: {
      bool l = test(p.lhs(), s, row);
      bool r = test(p.rhs(), s, row);
      return l && r;
    }
    case K::kOr: {
      bool l = test(p.lhs(), s, row);
      bool r = test(p.rhs(), s, row);
      return l || r;
    }
    case K::kCompare: {
      const Value& v = row[column(s, p.column())];
      if (v.is_null() || p.literal().is_null()) return false;
      int c = cmp(v, p.literal());
      switch (p.op()) {
        case query::CompareOp::kEq: return c == 0;
        case query::CompareOp::kNe: return c != 0;
        case query::CompareOp::kLt: return c < 0;
        case query::CompareOp::kLe: return c <= 0;
        case query::CompareOp::kGt: return c > 0;
        case query::CompareOp::kGe: return c >= 0;
      }
    }
  }
  return false;
}

// Walks the whole predicate so a bad column is caught even over empty input.
void validate(const query::Predicate& p, const SchemaDescriptor& s) {
  using K = query::Predicate::Kind;
  switch (p.kind()) {
    case K::kTrue: return;
    case K::kIsNull: column(s, p.column()); return;
    case K::kNot: validate(p.lhs(), s); return;
    case K::kAnd:
    case K::kOr:
      validate(p.lhs(), s);
      validate(p.rhs(), s);
      return;
    case K::kCompare: {
      DType col = s.fields[column(s, p.column())].dtype;
      if (!p.literal().is_null() && !comparable(col, *p.literal().dtype())) throw Invalid{};
      return;
    }
  }
}

Table eval(const query::LogicalPlan& plan, const std::map<std::string, Table>& tables);

Table eval_scan(const query::ScanNode& n, const std::map<std::string, Table>& tables) {
  auto it = tables.find(n.dataset);
  if (it == tables.end()) throw Invalid{};
  Table t = it->second;
  if (!n.dedup || !has_column(t.schema, "_uuid")) return t;
  size_t u = column(t.schema, "_uuid");
  Table out{t.schema, {}};
  for (const auto& row : t.rows) {
    bool seen = false;
    if (!row[u].is_null()) {
      for (const auto& kept : out.rows) {
        if (kept[u] == row[u]) seen = true;
      }
    }
    if (!seen) out.rows.push_back(row);
  }
  return out;
}

Table eval_filter(const query::FilterNode& n, const std::map<std::string, Table>& tables) {
  Table in = eval(*n.input, tables);
  validate(n.predicate, in.schema);
  Table out{in.schema, {}};
  for (const auto& row : in.rows) {
    if (test(n.predicate, in.schema, row)) out.rows.push_back(row);
  }
  return out;
}

Table eval_project(const query::ProjectNode& n, const std::map<std::string, Table>& tables) {
  Table in = eval(*n.input, tables);
  Table out;
  std::vector<size_t> idx;
  for (const auto& c : n.columns) {
    if (has_column(out.schema, c)) throw Invalid{};
    idx.push_back(column(in.schema, c));
    out.schema.fields.push_back(in.schema.fields[idx.back()]);
  }
  for (const auto& row : in.rows) {
    Row r;
    for (size_t i : idx) r.push_back(row[i]);
    out.rows.push_back(r);
  }
  return out;
}

bool keys_equal(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return false;
  return cmp(a, b) == 0;
}

Table eval_join(const query::HashJoinNode& n, const std::map<std::string, Table>& tables) {
  Table l = eval(*n.left, tables);
  Table r = eval(*n.right, tables);
  size_t lk = column(l.schema, n.left_key);
  size_t rk = column(r.schema, n.right_key);
  if (!comparable(l.schema.fields[lk].dtype, r.schema.fields[rk].dtype)) throw Invalid{};
  Table out{l.schema, {}};
  for (Field f : r.schema.fields) {
    while (has_column(out.schema, f.name)) f.name += "_right";
    out.schema.fields.push_back(f);
  }
  for (const auto& lrow : l.rows) {
    for (const auto& rrow : r.rows) {
      if (!keys_equal(lrow[lk], rrow[rk])) continue;
      Row joined = lrow;
      for (const auto& v : rrow) joined.push_back(v);
      out.rows.push_back(joined);
    }
  }
  return out;
}

Table eval_group(const query::GroupAggNode& n, const std::map<std::string, Table>& tables) {
  Table in = eval(*n.input, tables);
  Table out;
  std::vector<size_t> key_idx;
  for (const auto& k : n.keys) {
    if (has_column(out.schema, k)) throw Invalid{};
    key_idx.push_back(column(in.schema, k));
    out.schema.fields.push_back(in.schema.fields[key_idx.back()]);
  }
  std::vector<size_t> agg_idx;
  for (const auto& a : n.aggs) {
    Field f{a.output, DType::kInt, false};
    agg_idx.push_back(0);
    if (a.kind == query::AggKind::kSum) {
      agg_idx.back() = column(in.schema, a.column);
      f.dtype = in.schema.fields[agg_idx.back()].dtype;
      if (!numeric(f.dtype)) throw Invalid{};
    }
    if (has_column(out.schema, f.name)) throw Invalid{};
    out.schema.fields.push_back(f);
  }

  struct Acc {
    Row keys;
    int64_t count = 0;
    std::vector<int64_t> isum;
    std::vector<double> fsum;
  };
  std::vector<Acc> groups;
  auto fresh = [&](Row keys) {
    groups.push_back(Acc{keys, 0, std::vector<int64_t>(n.aggs.size(), 0), std::vector<double>(n.aggs.size(), 0.0)});
  };
  if (n.keys.empty()) fresh({});

  for (const auto& row : in.rows) {
    Row keys;
    for (size_t k : key_idx) keys.push_back(row[k]);
    size_t g = groups.size();
    for (size_t i = 0; i < groups.size(); ++i) {
      bool same = true;
      for (size_t k = 0; k < keys.size(); ++k) {
        if (cmp(groups[i].keys[k], keys[k]) != 0) same = false;
      }
      if (same) {
        g = i;
        break;
      }
    }
    if (g == groups.size()) fresh(keys);
    Acc& acc = groups[g];
    acc.count += 1;
    for (size_t a = 0; a < n.aggs.size(); ++a) {
      if (n.aggs[a].kind != query::AggKind::kSum) continue;
      const Value& v = row[agg_idx[a]];
      if (v.is_null()) continue;
      if (v.dtype() == DType::kInt) {
        __int128 s = static_cast<__int128>(acc.isum[a]) + v.as_int();
        if (s > std::numeric_limits<int64_t>::max() || s < std::numeric_limits<int64_t>::min()) throw Invalid{};
        acc.isum[a] = static_cast<int64_t>(s);
      } else {
        acc.fsum[a] = acc.fsum[a] + v.as_float();
      }
    }
  }

  for (const auto& acc : groups) {
    Row r = acc.keys;
    for (size_t a = 0; a < n.aggs.size(); ++a) {
      if (n.aggs[a].kind == query::AggKind::kCount) {
        r.push_back(Value(acc.count));
      } else if (out.schema.fields[n.keys.size() + a].dtype == DType::kInt) {
        r.push_back(Value(acc.isum[a]));
      } else {
        r.push_back(Value(acc.fsum[a]));
      }
    }
    out.rows.push_back(r);
  }
  return out;
}

Table eval_sort(const query::SortNode& n, const std::map<std::string, Table>& tables) {
  Table t = eval(*n.input, tables);
  std::vector<size_t> idx;
  for (const auto& k : n.keys) idx.push_back(column(t.schema, k.column));
  auto before = [&](const Row& a, const Row& b) {
    for (size_t i = 0; i < idx.size(); ++i) {
      int c = cmp(a[idx[i]], b[idx[i]]);
      if (c == 0) continue;
      return n.keys[i].dir == query::SortDir::kAsc ? c < 0 : c > 0;
    }
    return false;
  };
  // Insertion sort: strictly-before moves left, so equal rows keep their order.
  for (size_t i = 1; i < t.rows.size(); ++i) {
    Row cur = t.rows[i];
    size_t j = i;
    while (j > 0 && before(cur, t.rows[j - 1])) {
      t.rows[j] = t.rows[j - 1];
      --j;
    }
    t.rows[j] = cur;
  }
  return t;
}

Table eval_limit(const query::LimitNode& n, const std::map<std::string, Table>& tables) {
  Table t = eval(*n.input, tables);
  Table out{t.schema, {}};
  for (size_t i = 0; i < t.rows.size() && i < n.k; ++i) out.rows.push_back(t.rows[i]);
  return out;
}

Table eval(const query::LogicalPlan& plan, const std::map<std::string, Table>& tables) {
  const auto& node = plan.node();
  if (auto* n = std::get_if<query::ScanNode>(&node)) return eval_scan(*n, tables);
  if (auto* n = std::get_if<query::FilterNode>(&node)) return eval_filter(*n, tables);
  if (auto* n = std::get_if<query::ProjectNode>(&node)) return eval_project(*n, tables);
  if (auto* n = std::get_if<query::HashJoinNode>(&node)) return eval_join(*n, tables);
  if (auto* n = std::get_if<query::GroupAggNode>(&node)) return eval_group(*n, tables);
  if (auto* n = std::get_if<query::SortNode>(&node)) return eval_sort(*n, tables);
  return eval_limit(std::get<query::LimitNode>(node), tables);
}

}  // namespace

std::optional<query::Table> evaluate(const query::LogicalPlan& plan, const std::map<std::string, Table>& tables) {
  try {
    return eval(plan, tables);
  } catch (const Invalid&) {
    return std::nullopt;
  }
}

std::vector<Row> sorted_rows(std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace lakelet::reference
