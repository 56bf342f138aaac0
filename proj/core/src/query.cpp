#include "lakelet/query.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lakelet/error.hpp"

namespace lakelet::query {

namespace {

[[noreturn]] void plan_error(const std::string& msg) { throw_error(ErrorCode::kPlanError, msg); }

std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "?";
}

bool types_comparable(DType a, DType b) { return a == b || (is_numeric(a) && is_numeric(b)); }

size_t resolve(const SchemaDescriptor& schema, const std::string& column, std::string_view where) {
  auto idx = schema.index_of(column);
  if (!idx) {
    plan_error(std::string(where) + ": unknown column '" + column + "' (have: " + [&] {
      std::string s;
      for (const auto& f : schema.fields) s += (s.empty() ? "" : ", ") + f.name;
      return s;
    }() + ")");
  }
  return *idx;
}

/// Canonical hash-key text; int and integral float encode identically so a
/// 3 joins a 3.0.
void append_key(std::string& out, const Value& v) {
  switch (v.storage().index()) {
    case 0: out += "n;"; return;
    case 1: out += v.as_bool() ? "b1;" : "b0;"; return;
    case 2: out += "i" + std::to_string(v.as_int()) + ";"; return;
    case 3: {
      double d = v.as_float();
      if (std::trunc(d) == d && std::fabs(d) < 9.0e18) {
        out += "i" + std::to_string(static_cast<int64_t>(d)) + ";";
      } else {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
        out += "f";
        out.append(buf, end);
        out += ";";
      }
      return;
    }
    default: {
      const auto& s = v.as_string();
      out += "s" + std::to_string(s.size()) + ":" + s;
      return;
    }
  }
}

bool eval_predicate(const Predicate& p, const SchemaDescriptor& schema, const Row& row) {
  switch (p.kind()) {
    case Predicate::Kind::kTrue: return true;
    case Predicate::Kind::kIsNull: return row[*schema.index_of(p.column())].is_null();
    case Predicate::Kind::kAnd: return eval_predicate(p.lhs(), schema, row) && eval_predicate(p.rhs(), schema, row);
    case Predicate::Kind::kOr: return eval_predicate(p.lhs(), schema, row) || eval_predicate(p.rhs(), schema, row);
    case Predicate::Kind::kNot: return !eval_predicate(p.lhs(), schema, row);
    case Predicate::Kind::kCompare: {
      const Value& v = row[*schema.index_of(p.column())];
      if (v.is_null() || p.literal().is_null()) return false;
      auto c = compare_values(v, p.literal());
      switch (p.op()) {
        case CompareOp::kEq: return c == 0;
        case CompareOp::kNe: return c != 0;
        case CompareOp::kLt: return c < 0;
        case CompareOp::kLe: return c <= 0;
        case CompareOp::kGt: return c > 0;
        case CompareOp::kGe: return c >= 0;
      }
    }
  }
  return false;
}

void check_predicate(const Predicate& p, const SchemaDescriptor& schema) {
  switch (p.kind()) {
    case Predicate::Kind::kTrue: return;
    case Predicate::Kind::kIsNull: resolve(schema, p.column(), "filter"); return;
    case Predicate::Kind::kAnd:
    case Predicate::Kind::kOr:
      check_predicate(p.lhs(), schema);
      check_predicate(p.rhs(), schema);
      return;
    case Predicate::Kind::kNot: check_predicate(p.lhs(), schema); return;
    case Predicate::Kind::kCompare: {
      size_t idx = resolve(schema, p.column(), "filter");
      auto lit = p.literal().dtype();
      if (lit && !types_comparable(schema.fields[idx].dtype, *lit)) {
        plan_error("filter: cannot compare " + std::string(to_string(schema.fields[idx].dtype)) +
                   " column '" + p.column() + "' with " + std::string(to_string(*lit)) + " literal");
      }
      return;
    }
  }
}

class Executor {
 public:
  explicit Executor(const ScanProvider& provider) : provider_(provider) {}

  // Schema-only pass; scans are fetched once and cached for the run.
  SchemaDescriptor schema_of(const LogicalPlan& plan) {
    return std::visit([&](const auto& n) { return schema_node(n); }, plan.node());
  }

  Table run(const LogicalPlan& plan) {
    return std::visit([&](const auto& n) { return run_node(n); }, plan.node());
  }

  ExecStats stats;

 private:
  const Table& scanned(const ScanNode& n) {
    std::string key = n.dataset + (n.dedup ? "#dedup" : "");
    auto it = scans_.find(key);
    if (it != scans_.end()) return it->second;
    ScanResult r = provider_.scan(n.dataset);
    stats.malformed_values += r.malformed;
    Table t = n.dedup ? dedup_by_uuid(std::move(r.table)) : std::move(r.table);
    stats.rows_scanned += t.rows.size();
    return scans_.emplace(key, std::move(t)).first->second;
  }

  SchemaDescriptor schema_node(const ScanNode& n) { return scanned(n).schema; }

  SchemaDescriptor schema_node(const FilterNode& n) {
    SchemaDescriptor s = schema_of(*n.input);
    check_predicate(n.predicate, s);
    return s;
  }

  SchemaDescriptor schema_node(const ProjectNode& n) {
    SchemaDescriptor in = schema_of(*n.input);
    SchemaDescriptor out;
    std::set<std::string> seen;
    for (const auto& c : n.columns) {
      if (!seen.insert(c).second) plan_error("project: column '" + c + "' listed twice");
      out.fields.push_back(in.fields[resolve(in, c, "project")]);
    }
    return out;
  }

  SchemaDescriptor schema_node(const HashJoinNode& n) {
    SchemaDescriptor l = schema_of(*n.left);
    SchemaDescriptor r = schema_of(*n.right);
    const Field& lk = l.fields[resolve(l, n.left_key, "join left key")];
    const Field& rk = r.fields[resolve(r, n.right_key, "join right key")];
    if (!types_comparable(lk.dtype, rk.dtype)) {
      plan_error("join: key types " + std::string(to_string(lk.dtype)) + " and " +
                 std::string(to_string(rk.dtype)) + " are incompatible");
    }
    SchemaDescriptor out = l;
    for (Field f : r.fields) {
      while (out.index_of(f.name)) f.name += "_right";
      out.fields.push_back(std::move(f));
    }
    return out;
  }

  SchemaDescriptor schema_node(const GroupAggNode& n) {
    SchemaDescriptor in = schema_of(*n.input);
    SchemaDescriptor out;
    for (const auto& k : n.keys) {
      if (out.index_of(k)) plan_error("group: key '" + k + "' listed twice");
      out.fields.push_back(in.fields[resolve(in, k, "group key")]);
    }
    for (const auto& a : n.aggs) {
      Field f{a.output, DType::kInt, false};
      if (a.kind == AggKind::kSum) {
        const Field& src = in.fields[resolve(in, a.column, "sum")];
        if (!is_numeric(src.dtype)) {
          plan_error("sum: column '" + a.column + "' is " + std::string(to_string(src.dtype)));
        }
        f.dtype = src.dtype;
      }
      if (out.index_of(f.name)) plan_error("group: output column '" + f.name + "' is ambiguous");
      out.fields.push_back(std::move(f));
    }
    return out;
  }

  SchemaDescriptor schema_node(const SortNode& n) {
    SchemaDescriptor s = schema_of(*n.input);
    for (const auto& k : n.keys) resolve(s, k.column, "sort");
    return s;
  }

  SchemaDescriptor schema_node(const LimitNode& n) { return schema_of(*n.input); }

  Table run_node(const ScanNode& n) { return scanned(n); }

  Table run_node(const FilterNode& n) {
    Table in = run(*n.input);
    Table out{in.schema, {}};
    for (auto& row : in.rows) {
      if (eval_predicate(n.predicate, in.schema, row)) out.rows.push_back(std::move(row));
    }
    return out;
  }

  Table run_node(const ProjectNode& n) {
    Table in = run(*n.input);
    Table out{schema_node(n), {}};
    std::vector<size_t> idx;
    for (const auto& c : n.columns) idx.push_back(*in.schema.index_of(c));
    out.rows.reserve(in.rows.size());
    for (auto& row : in.rows) {
      Row r;
      r.reserve(idx.size());
      for (size_t i : idx) r.push_back(row[i]);
      out.rows.push_back(std::move(r));
    }
    return out;
  }

  Table run_node(const HashJoinNode& n) {
    Table left = run(*n.left);
    Table right = run(*n.right);
    Table out{schema_node(n), {}};
    size_t lk = *left.schema.index_of(n.left_key);
    size_t rk = *right.schema.index_of(n.right_key);

    std::unordered_map<std::string, std::vector<size_t>> build;
    for (size_t i = 0; i < right.rows.size(); ++i) {
      const Value& v = right.rows[i][rk];
      if (v.is_null()) continue;
      std::string key;
      append_key(key, v);
      build[key].push_back(i);
    }
    for (const auto& lrow : left.rows) {
      const Value& v = lrow[lk];
      if (v.is_null()) continue;
      std::string key;
      append_key(key, v);
      auto it = build.find(key);
      if (it == build.end()) continue;
      for (size_t ri : it->second) {
        Row r = lrow;
        r.insert(r.end(), right.rows[ri].begin(), right.rows[ri].end());
        out.rows.push_back(std::move(r));
      }
    }
    return out;
  }

  Table run_node(const GroupAggNode& n) {
    Table in = run(*n.input);
    Table out{schema_node(n), {}};
    std::vector<size_t> key_idx;
    for (const auto& k : n.keys) key_idx.push_back(*in.schema.index_of(k));
    std::vector<std::optional<size_t>> agg_idx;
    for (const auto& a : n.aggs) {
      agg_idx.push_back(a.kind == AggKind::kSum ? in.schema.index_of(a.column) : std::nullopt);
    }

    struct Group {
      Row keys;
      std::vector<int64_t> isum;
      std::vector<double> fsum;
      int64_t count = 0;
    };
    std::vector<Group> groups;
    std::unordered_map<std::string, size_t> index;
    auto new_group = [&](Row keys) {
      groups.push_back(Group{std::move(keys), std::vector<int64_t>(n.aggs.size(), 0),
                             std::vector<double>(n.aggs.size(), 0.0), 0});
      return groups.size() - 1;
    };
    if (n.keys.empty()) new_group({});

    for (const auto& row : in.rows) {
      size_t g = 0;
      if (!n.keys.empty()) {
        std::string key;
        for (size_t k : key_idx) append_key(key, row[k]);
        auto [it, fresh] = index.emplace(std::move(key), groups.size());
        if (fresh) {
          Row keys;
          for (size_t k : key_idx) keys.push_back(row[k]);
          new_group(std::move(keys));
        }
        g = it->second;
      }
      Group& grp = groups[g];
      ++grp.count;
      for (size_t a = 0; a < n.aggs.size(); ++a) {
        if (!agg_idx[a]) continue;
        const Value& v = row[*agg_idx[a]];
        if (v.is_null()) {
          ++stats.null_sum_inputs;
        } else if (v.dtype() == DType::kInt) {
          if (__builtin_add_overflow(grp.isum[a], v.as_int(), &grp.isum[a])) {
            plan_error("sum(" + n.aggs[a].column + ") overflows int64");
          }
        } else {
          grp.fsum[a] += v.as_float();
        }
      }
    }

    for (auto& grp : groups) {
      Row r = std::move(grp.keys);
      for (size_t a = 0; a < n.aggs.size(); ++a) {
        if (n.aggs[a].kind == AggKind::kCount) {
          r.emplace_back(grp.count);
        } else if (out.schema.fields[n.keys.size() + a].dtype == DType::kInt) {
          r.emplace_back(grp.isum[a]);
        } else {
          r.emplace_back(grp.fsum[a]);
        }
      }
      out.rows.push_back(std::move(r));
    }
    return out;
  }

  Table run_node(const SortNode& n) {
    Table t = run(*n.input);
    std::vector<std::pair<size_t, SortDir>> keys;
    for (const auto& k : n.keys) keys.emplace_back(*t.schema.index_of(k.column), k.dir);
    std::stable_sort(t.rows.begin(), t.rows.end(), [&](const Row& a, const Row& b) {
      for (const auto& [i, dir] : keys) {
        auto c = compare_values(a[i], b[i]);
        if (c == 0) continue;
        return dir == SortDir::kAsc ? c < 0 : c > 0;
      }
      return false;
    });
    return t;
  }

  Table run_node(const LimitNode& n) {
    Table t = run(*n.input);
    if (t.rows.size() > n.k) t.rows.resize(n.k);
    return t;
  }

  const ScanProvider& provider_;
  std::map<std::string, Table> scans_;
};

void describe_into(const LogicalPlan& plan, std::ostringstream& os, int depth) {
  std::string pad(static_cast<size_t>(depth) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ScanNode>) {
          os << pad << "Scan(" << n.dataset << (n.dedup ? ", dedup" : "") << ")\n";
        } else if constexpr (std::is_same_v<T, FilterNode>) {
          os << pad << "Filter(" << n.predicate.describe() << ")\n";
          describe_into(*n.input, os, depth + 1);
        } else if constexpr (std::is_same_v<T, ProjectNode>) {
          os << pad << "Project(";
          for (size_t i = 0; i < n.columns.size(); ++i) os << (i ? ", " : "") << n.columns[i];
          os << ")\n";
          describe_into(*n.input, os, depth + 1);
        } else if constexpr (std::is_same_v<T, HashJoinNode>) {
          os << pad << "HashJoin(" << n.left_key << " = " << n.right_key << ")\n";
          describe_into(*n.left, os, depth + 1);
          describe_into(*n.right, os, depth + 1);
        } else if constexpr (std::is_same_v<T, GroupAggNode>) {
          os << pad << "GroupAgg(keys=[";
          for (size_t i = 0; i < n.keys.size(); ++i) os << (i ? ", " : "") << n.keys[i];
          os << "], aggs=[";
          for (size_t i = 0; i < n.aggs.size(); ++i) os << (i ? ", " : "") << n.aggs[i].output;
          os << "])\n";
          describe_into(*n.input, os, depth + 1);
        } else if constexpr (std::is_same_v<T, SortNode>) {
          os << pad << "Sort(";
          for (size_t i = 0; i < n.keys.size(); ++i) {
            os << (i ? ", " : "") << n.keys[i].column
               << (n.keys[i].dir == SortDir::kAsc ? " asc" : " desc");
          }
          os << ")\n";
          describe_into(*n.input, os, depth + 1);
        } else {
          os << pad << "Limit(" << n.k << ")\n";
          describe_into(*n.input, os, depth + 1);
        }
      },
      plan.node());
}

}  // namespace

Predicate Predicate::always() { return Predicate(); }

Predicate Predicate::compare(std::string column, CompareOp op, Value literal) {
  Predicate p;
  p.kind_ = Kind::kCompare;
  p.column_ = std::move(column);
  p.op_ = op;
  p.literal_ = std::move(literal);
  return p;
}

Predicate Predicate::is_null(std::string column) {
  Predicate p;
  p.kind_ = Kind::kIsNull;
  p.column_ = std::move(column);
  return p;
}

Predicate operator&&(Predicate a, Predicate b) {
  Predicate p;
  p.kind_ = Predicate::Kind::kAnd;
  p.lhs_ = std::make_shared<const Predicate>(std::move(a));
  p.rhs_ = std::make_shared<const Predicate>(std::move(b));
  return p;
}

Predicate operator||(Predicate a, Predicate b) {
  Predicate p;
  p.kind_ = Predicate::Kind::kOr;
  p.lhs_ = std::make_shared<const Predicate>(std::move(a));
  p.rhs_ = std::make_shared<const Predicate>(std::move(b));
  return p;
}

Predicate operator!(Predicate a) {
  Predicate p;
  p.kind_ = Predicate::Kind::kNot;
  p.lhs_ = std::make_shared<const Predicate>(std::move(a));
  return p;
}

std::string Predicate::describe() const {
  switch (kind_) {
    case Kind::kTrue: return "true";
    case Kind::kIsNull: return column_ + " is null";
    case Kind::kAnd: return "(" + lhs_->describe() + " and " + rhs_->describe() + ")";
    case Kind::kOr: return "(" + lhs_->describe() + " or " + rhs_->describe() + ")";
    case Kind::kNot: return "not " + lhs_->describe();
    case Kind::kCompare: {
      std::string lit = literal_.dtype() == DType::kString ? "'" + literal_.to_text() + "'"
                                                           : (literal_.is_null() ? "null" : literal_.to_text());
      return column_ + " " + std::string(op_symbol(op_)) + " " + lit;
    }
  }
  return "?";
}

Aggregate Aggregate::count(std::string output) { return Aggregate{AggKind::kCount, "", std::move(output)}; }

Aggregate Aggregate::sum(std::string column, std::string output) {
  if (output.empty()) output = "sum_" + column;
  return Aggregate{AggKind::kSum, std::move(column), std::move(output)};
}

LogicalPlan LogicalPlan::scan(std::string dataset, bool dedup) {
  return LogicalPlan(ScanNode{std::move(dataset), dedup});
}

LogicalPlan LogicalPlan::filter(Predicate predicate) const {
  return LogicalPlan(FilterNode{share(), std::move(predicate)});
}

LogicalPlan LogicalPlan::project(std::vector<std::string> columns) const {
  return LogicalPlan(ProjectNode{share(), std::move(columns)});
}

LogicalPlan LogicalPlan::join(const LogicalPlan& right, std::string left_key,
                              std::string right_key) const {
  return LogicalPlan(HashJoinNode{share(), right.share(), std::move(left_key), std::move(right_key)});
}

LogicalPlan LogicalPlan::group_by(std::vector<std::string> keys, std::vector<Aggregate> aggs) const {
  return LogicalPlan(GroupAggNode{share(), std::move(keys), std::move(aggs)});
}

LogicalPlan LogicalPlan::sort(std::vector<SortKey> keys) const {
  return LogicalPlan(SortNode{share(), std::move(keys)});
}

LogicalPlan LogicalPlan::limit(size_t k) const { return LogicalPlan(LimitNode{share(), k}); }

std::string LogicalPlan::describe() const {
  std::ostringstream os;
  describe_into(*this, os, 0);
  return os.str();
}

ScanResult LakeScanProvider::scan(const std::string& dataset) const {
  DatasetId id = DatasetId::parse(dataset);
  if (store_.current_version(id) == 0) {
    auto known = catalog_ ? catalog_->find_dataset(id) : std::nullopt;
    if (!known) throw_error(ErrorCode::kUnknownDataset, "unknown dataset " + dataset);
    return ScanResult{Table{known->schema_hint.value_or(SchemaDescriptor{}), {}}, 0};
  }
  TypedTable t = read_dataset(store_, id, mode_);
  return ScanResult{Table{std::move(t.schema), std::move(t.rows)}, t.malformed};
}

ScanResult MemoryScanProvider::scan(const std::string& dataset) const {
  auto it = tables_.find(dataset);
  if (it == tables_.end()) throw_error(ErrorCode::kUnknownDataset, "unknown dataset " + dataset);
  return ScanResult{it->second, 0};
}

Table dedup_by_uuid(Table table) {
  auto idx = table.schema.index_of(kUuidColumn);
  if (!idx) return table;
  std::unordered_set<std::string> seen;
  std::vector<Row> kept;
  kept.reserve(table.rows.size());
  for (auto& row : table.rows) {
    const Value& id = row[*idx];
    if (id.is_null() || seen.insert(id.to_text()).second) kept.push_back(std::move(row));
  }
  table.rows = std::move(kept);
  return table;
}

QueryResult execute(const LogicalPlan& plan, const ScanProvider& provider) {
  Executor ex(provider);
  ex.schema_of(plan);
  Table t = ex.run(plan);
  return QueryResult{std::move(t), ex.stats};
}

SchemaDescriptor output_schema(const LogicalPlan& plan, const ScanProvider& provider) {
  Executor ex(provider);
  return ex.schema_of(plan);
}

}  // namespace lakelet::query
