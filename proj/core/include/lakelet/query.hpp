#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lakelet/catalog.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/schema.hpp"
#include "lakelet/schema_read.hpp"

namespace lakelet::query {

struct Table {
  SchemaDescriptor schema;
  std::vector<Row> rows;
};

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

/// Boolean row predicate. Comparisons involving null are false; Not is plain
/// negation (two-valued logic).
class Predicate {
 public:
  enum class Kind { kTrue, kCompare, kIsNull, kAnd, kOr, kNot };

  static Predicate always();
  static Predicate compare(std::string column, CompareOp op, Value literal);
  static Predicate is_null(std::string column);

  friend Predicate operator&&(Predicate a, Predicate b);
  friend Predicate operator||(Predicate a, Predicate b);
  friend Predicate operator!(Predicate a);

  Kind kind() const { return kind_; }
  const std::string& column() const { return column_; }
  CompareOp op() const { return op_; }
  const Value& literal() const { return literal_; }
  const Predicate& lhs() const { return *lhs_; }
  const Predicate& rhs() const { return *rhs_; }

  std::string describe() const;

 private:
  Predicate() = default;

  Kind kind_ = Kind::kTrue;
  std::string column_;
  CompareOp op_ = CompareOp::kEq;
  Value literal_;
  std::shared_ptr<const Predicate> lhs_;
  std::shared_ptr<const Predicate> rhs_;
};

enum class AggKind { kCount, kSum };

struct Aggregate {
  AggKind kind = AggKind::kCount;
  std::string column;  // empty for count
  std::string output;  // "count" / "sum_<column>" unless overridden

  static Aggregate count(std::string output = "count");
  static Aggregate sum(std::string column, std::string output = "");
};

enum class SortDir { kAsc, kDesc };

struct SortKey {
  std::string column;
  SortDir dir = SortDir::kAsc;
};

class LogicalPlan;

struct ScanNode {
  std::string dataset;
  bool dedup = false;
};
struct FilterNode {
  std::shared_ptr<const LogicalPlan> input;
  Predicate predicate;
};
struct ProjectNode {
  std::shared_ptr<const LogicalPlan> input;
  std::vector<std::string> columns;
};
/// Inner equi-join. Right-side columns whose names collide with the left
/// are renamed with a "_right" suffix.
struct HashJoinNode {
  std::shared_ptr<const LogicalPlan> left;
  std::shared_ptr<const LogicalPlan> right;
  std::string left_key;
  std::string right_key;
};
/// Output: key columns then one column per aggregate, groups in first-seen
/// order. No keys means one global row, even over empty input.
struct GroupAggNode {
  std::shared_ptr<const LogicalPlan> input;
  std::vector<std::string> keys;
  std::vector<Aggregate> aggs;
};
/// Stable; nulls order first ascending.
struct SortNode {
  std::shared_ptr<const LogicalPlan> input;
  std::vector<SortKey> keys;
};
struct LimitNode {
  std::shared_ptr<const LogicalPlan> input;
  size_t k = 0;
};

using PlanNode =
    std::variant<ScanNode, FilterNode, ProjectNode, HashJoinNode, GroupAggNode, SortNode, LimitNode>;

/// Immutable operator tree, built fluently:
///   LogicalPlan::scan("raw/sales").join(LogicalPlan::scan("raw/product"), "product_id", "product_id")
class LogicalPlan {
 public:
  explicit LogicalPlan(PlanNode node) : node_(std::move(node)) {}

  static LogicalPlan scan(std::string dataset, bool dedup = false);

  LogicalPlan filter(Predicate predicate) const;
  LogicalPlan project(std::vector<std::string> columns) const;
  LogicalPlan join(const LogicalPlan& right, std::string left_key, std::string right_key) const;
  LogicalPlan group_by(std::vector<std::string> keys, std::vector<Aggregate> aggs) const;
  LogicalPlan sort(std::vector<SortKey> keys) const;
  LogicalPlan limit(size_t k) const;

  const PlanNode& node() const { return node_; }
  std::string describe() const;

 private:
  std::shared_ptr<const LogicalPlan> share() const { return std::make_shared<LogicalPlan>(*this); }

  PlanNode node_;
};

struct ScanResult {
  Table table;
  uint64_t malformed = 0;
};

/// Resolves a Scan's dataset name to rows.
class ScanProvider {
 public:
  virtual ~ScanProvider() = default;
  virtual ScanResult scan(const std::string& dataset) const = 0;
};

/// Schema-on-read over the lake: infer from the latest manifest, then read.
/// A dataset with no commit scans as empty when the catalog knows it and
/// throws kUnknownDataset otherwise.
class LakeScanProvider : public ScanProvider {
 public:
  explicit LakeScanProvider(const LakeStore& store, ReadMode mode = ReadMode::kLenient,
                            const Catalog* catalog = nullptr)
      : store_(store), mode_(mode), catalog_(catalog) {}

  ScanResult scan(const std::string& dataset) const override;

 private:
  const LakeStore& store_;
  ReadMode mode_;
  const Catalog* catalog_;
};

class MemoryScanProvider : public ScanProvider {
 public:
  void add(std::string dataset, Table table) { tables_[std::move(dataset)] = std::move(table); }
  ScanResult scan(const std::string& dataset) const override;

 private:
  std::map<std::string, Table> tables_;
};

struct ExecStats {
  uint64_t null_sum_inputs = 0;   // nulls treated as 0 by sum()
  uint64_t malformed_values = 0;  // lenient-read coercion failures behind scans
  uint64_t rows_scanned = 0;
};

struct QueryResult {
  Table table;
  ExecStats stats;
};

/// Throws LakeError(kPlanError) for unresolvable columns or incompatible types.
QueryResult execute(const LogicalPlan& plan, const ScanProvider& provider);

/// Output schema without executing the operators (scans still run).
SchemaDescriptor output_schema(const LogicalPlan& plan, const ScanProvider& provider);

/// Keeps the first row per `_uuid` value; rows with a null `_uuid` all stay.
/// Tables without a `_uuid` column are returned unchanged.
Table dedup_by_uuid(Table table);

inline constexpr std::string_view kUuidColumn = "_uuid";

}  // namespace lakelet::query
