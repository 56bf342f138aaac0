#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakelet/catalog.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/uuid.hpp"

namespace lakelet {

// ---------------------------------------------------------------------------
// Records and provenance

struct FlowRecord {
  Uuid uuid;
  std::map<std::string, std::string> attributes;
  std::string payload;
  int64_t entry_time = 0;  // unix ms
};

/// Attributes stamped by the runtime on every source record.
inline constexpr std::string_view kAttrSource = "source";
inline constexpr std::string_view kAttrOffset = "source.offset";

enum class EventKind { kCreate, kTransform, kRoute, kDrop, kSend };
std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct ProvenanceEvent {
  Uuid record_uuid;
  std::string processor;
  EventKind kind = EventKind::kCreate;
  int64_t at = 0;  // unix ms
  std::string detail;
  uint64_t seq = 0;  // append order within one run
};

nlohmann::json to_json(const ProvenanceEvent& e);
ProvenanceEvent provenance_event_from_json(const nlohmann::json& j);

/// Append-only, thread-safe event log for one run, optionally mirrored to a
/// JSON-lines file by flush().
class ProvenanceLog {
 public:
  ProvenanceLog() = default;
  explicit ProvenanceLog(std::filesystem::path file) : file_(std::move(file)) {}

  void append(ProvenanceEvent e);
  /// Durably appends events not yet written. No-op without a file.
  void flush();

  std::vector<ProvenanceEvent> events() const;
  /// Events for one record in append order. Throws kUnknownRecord.
  std::vector<ProvenanceEvent> query(const Uuid& uuid) const;
  uint64_t count(EventKind k) const;
  const std::optional<std::filesystem::path>& file() const { return file_; }

 private:
  mutable std::mutex mu_;
  std::vector<ProvenanceEvent> events_;
  size_t flushed_ = 0;
  std::optional<std::filesystem::path> file_;
};

/// Events for `uuid` across every persisted run under `lake_root`, runs in
/// id order. Throws kUnknownRecord.
std::vector<ProvenanceEvent> provenance_query(const std::filesystem::path& lake_root, const Uuid& uuid);

// ---------------------------------------------------------------------------
// Graph specification

struct ProcessorSpec {
  std::string name;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

/// Endpoints are written "processor" or "processor:port"; the default output
/// port is "out".
struct ConnectionSpec {
  std::string from;
  std::string to;
  size_t capacity = 64;
};

struct FlowGraphSpec {
  std::string name = "flow";
  std::vector<ProcessorSpec> processors;
  std::vector<ConnectionSpec> connections;

  /// Throws kInvalidSpec on structural problems in the document.
  static FlowGraphSpec from_json(const nlohmann::json& j);
  static FlowGraphSpec parse(std::string_view text);
  static FlowGraphSpec load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Processors

struct RunOptions;
class ProcessContext;

enum class Role { kSource, kTransform, kSink };

/// A processor instance lives for one run. Transforms and sinks are driven by
/// on_record on their own thread; sources are pulled through next_payload.
class Processor {
 public:
  virtual ~Processor() = default;

  virtual Role role() const = 0;
  /// Defaults: {"out"} for sources and transforms, none for sinks.
  virtual std::vector<std::string> output_ports() const;

  virtual void on_record(ProcessContext& ctx, FlowRecord record);
  /// Called whenever deadline() has passed.
  virtual void on_deadline(ProcessContext& ctx);
  virtual std::optional<std::chrono::steady_clock::time_point> deadline() const { return std::nullopt; }
  /// End of input; sinks flush here.
  virtual void on_finish(ProcessContext& ctx);

  // Sources.
  virtual bool finite() const { return true; }
  /// Part of every record uuid, so a different identity gives a disjoint
  /// id space (e.g. the seed).
  virtual std::string identity(const RunOptions& options) const;
  virtual std::string lineage_label() const;
  virtual void start_at(const RunOptions& options, uint64_t offset);
  virtual std::optional<std::string> next_payload();

  // Sinks.
  virtual std::optional<DatasetId> target_dataset() const { return std::nullopt; }
};

using ProcessorFactory = std::function<std::unique_ptr<Processor>(const ProcessorSpec&)>;

class ProcessorRegistry {
 public:
  /// tweet_source, file_source, parse_tweet, filter_lang, micro_batch_sink.
  static ProcessorRegistry with_builtins();

  void add(std::string kind, ProcessorFactory factory);
  bool contains(std::string_view kind) const;
  /// Throws kUnknownProcessorKind; factories throw kInvalidSpec on bad params.
  std::unique_ptr<Processor> create(const ProcessorSpec& spec) const;

 private:
  std::map<std::string, ProcessorFactory, std::less<>> factories_;
};

// ---------------------------------------------------------------------------
// Validated graph

struct PortRef {
  size_t node = 0;
  std::string port;
};

struct GraphEdge {
  PortRef from;
  size_t to = 0;
  size_t capacity = 0;
  std::string label;  // "from:port->to"
};

class FlowGraph {
 public:
  const FlowGraphSpec& spec() const { return spec_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<Role>& roles() const { return roles_; }
  /// Node indices in a topological order.
  const std::vector<size_t>& topo_order() const { return topo_; }
  /// Sink indices reachable from each source index.
  const std::map<size_t, std::vector<size_t>>& reachable_sinks() const { return reachable_; }
  std::unique_ptr<Processor> instantiate(size_t node) const;

 private:
  friend FlowGraph build_graph(FlowGraphSpec spec, const ProcessorRegistry& registry);

  FlowGraphSpec spec_;
  std::shared_ptr<const ProcessorRegistry> registry_;
  std::vector<GraphEdge> edges_;
  std::vector<Role> roles_;
  std::vector<size_t> topo_;
  std::map<size_t, std::vector<size_t>> reachable_;
};

/// Throws kInvalidSpec, kCycleDetected, kDanglingPort, kUnknownProcessorKind.
FlowGraph build_graph(FlowGraphSpec spec,
                      const ProcessorRegistry& registry = ProcessorRegistry::with_builtins());

/// Sink line for a payload: a JSON object gains a sibling "_uuid" field
/// (spliced in, so the original bytes are retained); anything else is wrapped
/// as {"_raw": payload, "_uuid": ...}.
std::string inject_uuid(std::string_view payload, const Uuid& uuid);

// ---------------------------------------------------------------------------
// Running

/// Simulated process death: the run stops at once without flushing buffers,
/// writing checkpoints or recording lineage, and run_flow throws kFlowFailed.
struct CrashInjection {
  enum class Point { kNone, kBeforeCommit, kAfterCommit, kAtRecord };
  Point point = Point::kNone;
  /// 0-based index of the sink commit, or of the record created this run.
  uint64_t nth = 0;
};

struct RunOptions {
  /// Sources stop before this offset.
  std::optional<uint64_t> record_limit;
  std::optional<std::chrono::milliseconds> duration;
  /// Overrides every tweet_source seed.
  std::optional<uint64_t> seed;
  /// Continue each source from its checkpoint instead of offset 0.
  bool resume = false;
  /// Register missing sink datasets as jsonl.
  bool auto_register = true;
  CrashInjection crash;
  /// The first N commit attempts fail with kIoError.
  uint64_t fail_commits = 0;
};

struct FlowReport {
  std::string run_id;
  uint64_t records_in = 0;       // CREATE events
  uint64_t records_out = 0;      // SEND events
  uint64_t records_dropped = 0;  // DROP events
  std::map<std::string, size_t> max_queue_depths;  // by edge label
  uint64_t files_committed = 0;
  std::map<std::string, uint64_t> start_offsets;  // by source name
  std::map<std::string, uint64_t> end_offsets;
  std::chrono::milliseconds elapsed{0};
  std::shared_ptr<const ProvenanceLog> provenance;
  std::filesystem::path provenance_file;
};

/// Runs the graph to end of stream (or the stop condition). Throws
/// kFlowFailed naming the processor on a processor error, an unrecoverable
/// sink commit, or an injected crash.
FlowReport run_flow(const FlowGraph& graph, LakeStore& store, Catalog& catalog,
                    const RunOptions& options = {});

std::filesystem::path checkpoint_path(const std::filesystem::path& lake_root, std::string_view flow_name);

/// Runtime services for one processor. Only valid during run_flow.
class ProcessContext {
 public:
  struct Impl;
  ProcessContext(Impl& impl, size_t node) : impl_(impl), node_(node) {}

  const std::string& name() const;
  const std::string& run_id() const;
  const RunOptions& options() const;
  LakeStore& store();

  /// Blocks while the downstream queue is full. Emitting on an unconnected
  /// port drops the record. A second connection on the same port receives a
  /// child record with a fresh uuid.
  void emit(std::string_view port, FlowRecord record);
  bool port_connected(std::string_view port) const;
  void record_event(const Uuid& uuid, EventKind kind, std::string detail = {});

  /// Sink hooks. commit_batch applies fault/crash injection; batch_committed
  /// records SEND events, flushes provenance and advances checkpoints.
  DatasetManifest commit_batch(const DatasetId& dataset, const ObjectRef& ref);
  void batch_committed(const std::vector<FlowRecord>& batch, const std::string& detail);

 private:
  Impl& impl_;
  size_t node_;
};

}  // namespace lakelet
