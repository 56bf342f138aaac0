#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <thread>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/flow.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

/// Unwinds a processor thread once the run is cancelled.
struct Cancelled {};

/// Raised at an injected crash point; deliberately not a LakeError so sink
/// retry logic cannot swallow it.
struct CrashSignal {
  std::string where;
};

/// Wakes a consumer when any of its inputs changes.
class Notifier {
 public:
  uint64_t generation() {
    std::lock_guard lock(mu_);
    return gen_;
  }
  void notify() {
    {
      std::lock_guard lock(mu_);
      ++gen_;
    }
    cv_.notify_all();
  }
  void wait(uint64_t seen, std::optional<Clock::time_point> deadline, const std::atomic<bool>& cancel) {
    std::unique_lock lock(mu_);
    auto ready = [&] { return gen_ != seen || cancel.load(); };
    if (deadline) {
      cv_.wait_until(lock, *deadline, ready);
    } else {
      cv_.wait(lock, ready);
    }
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  uint64_t gen_ = 0;
};

/// Bounded FIFO; push blocks while full.
class Connection {
 public:
  Connection(size_t capacity, Notifier& consumer) : capacity_(capacity), consumer_(consumer) {}

  bool push(FlowRecord&& r, const std::atomic<bool>& cancel) {
    {
      std::unique_lock lock(mu_);
      not_full_.wait(lock, [&] { return q_.size() < capacity_ || cancel.load(); });
      if (cancel.load()) return false;
      q_.push_back(std::move(r));
      max_depth_ = std::max(max_depth_, q_.size());
    }
    consumer_.notify();
    return true;
  }

  bool try_pop(FlowRecord& out) {
    {
      std::lock_guard lock(mu_);
      if (q_.empty()) return false;
      out = std::move(q_.front());
      q_.pop_front();
    }
    not_full_.notify_one();
    return true;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    consumer_.notify();
  }

  bool drained() {
    std::lock_guard lock(mu_);
    return closed_ && q_.empty();
  }

  void wake() {
    { std::lock_guard lock(mu_); }
    not_full_.notify_all();
  }

  size_t max_depth() {
    std::lock_guard lock(mu_);
    return max_depth_;
  }

 private:
  const size_t capacity_;
  Notifier& consumer_;
  std::mutex mu_;
  std::condition_variable not_full_;
  std::deque<FlowRecord> q_;
  size_t max_depth_ = 0;
  bool closed_ = false;
};

std::string make_run_id() {
  std::string ts;
  for (char c : iso8601_now()) {
    if (c != '-' && c != ':' && c != '.') ts.push_back(c);
  }
  return ts + "-" + Uuid::random().to_string().substr(0, 8);
}

json load_checkpoint(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return json::object();
  auto j = json::parse(fs_util::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw_error(ErrorCode::kFlowFailed, "checkpoint " + path.string() + " is unreadable");
  }
  return j;
}

}  // namespace

fs::path checkpoint_path(const fs::path& lake_root, std::string_view flow_name) {
  return lake_root / "checkpoints" / (std::string(flow_name) + ".json");
}

struct ProcessContext::Impl {
  Impl(const FlowGraph& g, LakeStore& s, Catalog& c, const RunOptions& o)
      : graph(g), store(s), catalog(c), options(o), faults_left(o.fail_commits) {}

  const FlowGraph& graph;
  LakeStore& store;
  Catalog& catalog;
  const RunOptions& options;
  std::string run_id;

  std::vector<std::unique_ptr<Processor>> procs;
  std::vector<std::unique_ptr<Notifier>> notifiers;
  std::vector<std::unique_ptr<Connection>> conns;
  std::vector<std::map<std::string, std::vector<size_t>, std::less<>>> out_edges;
  std::vector<std::vector<size_t>> in_edges;

  std::atomic<bool> cancel{false};
  std::atomic<bool> crashed{false};
  std::shared_ptr<ProvenanceLog> prov;
  std::atomic<uint64_t> commit_attempts{0};
  std::atomic<uint64_t> records_created{0};
  std::atomic<uint64_t> faults_left;
  std::atomic<uint64_t> files_committed{0};

  std::mutex fail_mu;
  std::optional<std::string> failure;
  std::string crash_where;

  std::mutex ckpt_mu;
  json checkpoint = json::object();
  fs::path ckpt_path;

  const std::string& name_of(size_t node) const { return graph.spec().processors[node].name; }

  void cancel_all() {
    cancel.store(true);
    for (auto& n : notifiers) n->notify();
    for (auto& c : conns) c->wake();
  }

  void fail(size_t node, const std::string& what) {
    {
      std::lock_guard lock(fail_mu);
      if (!failure) failure = "processor '" + name_of(node) + "' failed: " + what;
    }
    cancel_all();
  }

  void crash(const std::string& where) {
    {
      std::lock_guard lock(fail_mu);
      if (!crashed.exchange(true)) crash_where = where;
    }
    cancel_all();
  }

  void event(const Uuid& uuid, size_t node, EventKind kind, std::string detail) {
    prov->append(ProvenanceEvent{uuid, name_of(node), kind, unix_millis_now(), std::move(detail), 0});
  }

  void write_checkpoint() { fs_util::write_atomic(ckpt_path, checkpoint.dump(2)); }

  void close_outputs(size_t node) {
    for (auto& [port, edges] : out_edges[node]) {
      for (size_t e : edges) conns[e]->close();
    }
  }

  void run_source(size_t node, uint64_t start, uint64_t& end) {
    ProcessContext ctx(*this, node);
    Processor& p = *procs[node];
    const std::string identity = p.identity(options);
    const auto started = Clock::now();
    uint64_t off = start;
    p.start_at(options, off);
    while (!cancel.load()) {
      if (options.record_limit && off >= *options.record_limit) break;
      if (options.duration && Clock::now() - started >= *options.duration) break;
      auto payload = p.next_payload();
      if (!payload) break;
      const uint64_t nth = records_created.fetch_add(1);
      if (options.crash.point == CrashInjection::Point::kAtRecord && nth == options.crash.nth) {
        throw CrashSignal{"record " + std::to_string(nth)};
      }
      FlowRecord r;
      r.uuid = Uuid::from_name(graph.spec().name + "/" + name_of(node) + "/" + identity + "/" + std::to_string(off));
      r.attributes.emplace(kAttrSource, name_of(node));
      r.attributes.emplace(kAttrOffset, std::to_string(off));
      r.payload = std::move(*payload);
      r.entry_time = unix_millis_now();
      event(r.uuid, node, EventKind::kCreate, "offset=" + std::to_string(off));
      ctx.emit("out", std::move(r));
      ++off;
      end = off;
    }
    if (cancel.load()) throw Cancelled{};
    end = off;
  }

  void run_consumer(size_t node) {
    ProcessContext ctx(*this, node);
    Processor& p = *procs[node];
    const auto& inputs = in_edges[node];
    size_t rr = 0;
    for (;;) {
      if (cancel.load()) throw Cancelled{};
      auto dl = p.deadline();
      if (dl && Clock::now() >= *dl) {
        p.on_deadline(ctx);
        continue;
      }
      const uint64_t seen = notifiers[node]->generation();
      FlowRecord rec;
      bool got = false;
      for (size_t k = 0; k < inputs.size() && !got; ++k) {
        size_t idx = (rr + k) % inputs.size();
        if (conns[inputs[idx]]->try_pop(rec)) {
          got = true;
          rr = idx + 1;
        }
      }
      if (got) {
        p.on_record(ctx, std::move(rec));
        continue;
      }
      bool done = std::all_of(inputs.begin(), inputs.end(), [&](size_t e) { return conns[e]->drained(); });
      if (done) break;
      notifiers[node]->wait(seen, dl, cancel);
    }
    p.on_finish(ctx);
    if (cancel.load()) throw Cancelled{};
  }
};

const std::string& ProcessContext::name() const { return impl_.name_of(node_); }
const std::string& ProcessContext::run_id() const { return impl_.run_id; }
const RunOptions& ProcessContext::options() const { return impl_.options; }
LakeStore& ProcessContext::store() { return impl_.store; }

bool ProcessContext::port_connected(std::string_view port) const {
  const auto& ports = impl_.out_edges[node_];
  auto it = ports.find(port);
  return it != ports.end() && !it->second.empty();
}

void ProcessContext::record_event(const Uuid& uuid, EventKind kind, std::string detail) {
  impl_.event(uuid, node_, kind, std::move(detail));
}

void ProcessContext::emit(std::string_view port, FlowRecord record) {
  const auto& ports = impl_.out_edges[node_];
  auto it = ports.find(port);
  if (it == ports.end()) {
    throw_error(ErrorCode::kInvalidArgument, "processor '" + name() + "' has no port '" + std::string(port) + "'");
  }
  const auto& edges = it->second;
  if (edges.empty()) {
    record_event(record.uuid, EventKind::kDrop, "unconnected-port:" + std::string(port));
    return;
  }
  for (size_t k = 0; k < edges.size(); ++k) {
    FlowRecord copy = k + 1 == edges.size() ? std::move(record) : record;
    if (k > 0) {
      const Uuid parent = copy.uuid;
      copy.uuid = Uuid::from_name(parent.to_string() + "/" + impl_.graph.edges()[edges[k]].label);
      record_event(copy.uuid, EventKind::kCreate, "parent_uuid=" + parent.to_string());
    }
    if (!impl_.conns[edges[k]]->push(std::move(copy), impl_.cancel)) throw Cancelled{};
  }
}

DatasetManifest ProcessContext::commit_batch(const DatasetId& dataset, const ObjectRef& ref) {
  if (impl_.cancel.load()) throw Cancelled{};
  const uint64_t nth = impl_.commit_attempts.fetch_add(1);
  const auto& crash = impl_.options.crash;
  if (crash.point == CrashInjection::Point::kBeforeCommit && nth == crash.nth) {
    throw CrashSignal{"before commit " + std::to_string(nth)};
  }
  uint64_t left = impl_.faults_left.load();
  while (left > 0 && !impl_.faults_left.compare_exchange_weak(left, left - 1)) {
  }
  if (left > 0) throw_error(ErrorCode::kIoError, "injected commit failure");
  DatasetManifest m = impl_.store.commit_manifest(dataset, {ref});
  if (crash.point == CrashInjection::Point::kAfterCommit && nth == crash.nth) {
    throw CrashSignal{"after commit " + std::to_string(nth)};
  }
  impl_.files_committed.fetch_add(1);
  return m;
}

void ProcessContext::batch_committed(const std::vector<FlowRecord>& batch, const std::string& detail) {
  if (impl_.crashed.load()) throw Cancelled{};
  std::map<std::string, uint64_t> next;
  for (const auto& r : batch) {
    record_event(r.uuid, EventKind::kSend, detail);
    auto s = r.attributes.find(std::string(kAttrSource));
    auto o = r.attributes.find(std::string(kAttrOffset));
    if (s == r.attributes.end() || o == r.attributes.end()) continue;
    uint64_t off = std::stoull(o->second) + 1;
    auto& slot = next[s->second];
    slot = std::max(slot, off);
  }
  impl_.prov->flush();
  std::lock_guard lock(impl_.ckpt_mu);
  auto& mine = impl_.checkpoint["sinks"][name()];
  if (!mine.is_object()) mine = json::object();
  for (const auto& [src, off] : next) {
    mine[src] = std::max<uint64_t>(mine.value(src, uint64_t{0}), off);
  }
  impl_.write_checkpoint();
}

FlowReport run_flow(const FlowGraph& graph, LakeStore& store, Catalog& catalog, const RunOptions& options) {
  const auto started = Clock::now();
  const auto& spec = graph.spec();
  const size_t n = spec.processors.size();

  ProcessContext::Impl impl(graph, store, catalog, options);
  for (size_t i = 0; i < n; ++i) impl.procs.push_back(graph.instantiate(i));

  // Sinks name their files per run, so two sinks on one dataset would collide.
  std::map<DatasetId, std::string> sink_of;
  for (size_t i = 0; i < n; ++i) {
    auto target = impl.procs[i]->target_dataset();
    if (!target) continue;
    auto [it, fresh] = sink_of.emplace(*target, spec.processors[i].name);
    if (!fresh) {
      throw_error(ErrorCode::kInvalidSpec, "sinks '" + it->second + "' and '" + spec.processors[i].name +
                                               "' both write " + target->to_string());
    }
  }

  for (size_t i = 0; i < n; ++i) {
    if (graph.roles()[i] == Role::kSource && !impl.procs[i]->finite() && !options.record_limit &&
        !options.duration) {
      throw_error(ErrorCode::kInvalidArgument,
                  "source '" + spec.processors[i].name + "' is unbounded; set a record limit or duration");
    }
    auto target = impl.procs[i]->target_dataset();
    if (!target) continue;
    auto desc = catalog.find_dataset(*target);
    if (!desc) {
      if (!options.auto_register) {
        throw_error(ErrorCode::kUnknownDataset, "sink target " + target->to_string() + " is not registered");
      }
      catalog.register_dataset(DatasetDescriptor{target->name, target->zone, DataFormat::kJsonl, iso8601_now(),
                                                 "flow:" + spec.name, std::nullopt});
    } else if (desc->format != DataFormat::kJsonl) {
      throw_error(ErrorCode::kInvalidArgument, "sink target " + target->to_string() + " is not jsonl");
    }
  }

  impl.run_id = make_run_id();
  const fs::path prov_file = store.root() / "provenance" / (impl.run_id + ".jsonl");
  impl.prov = std::make_shared<ProvenanceLog>(prov_file);

  impl.ckpt_path = checkpoint_path(store.root(), spec.name);
  fs::create_directories(impl.ckpt_path.parent_path());
  std::map<size_t, uint64_t> start;
  if (options.resume) {
    impl.checkpoint = load_checkpoint(impl.ckpt_path);
    for (const auto& [src, sinks] : graph.reachable_sinks()) {
      std::optional<uint64_t> lowest;
      for (size_t sink : sinks) {
        uint64_t v = 0;
        const auto& all = impl.checkpoint.value("sinks", json::object());
        if (all.contains(impl.name_of(sink))) v = all[impl.name_of(sink)].value(impl.name_of(src), uint64_t{0});
        lowest = std::min(lowest.value_or(v), v);
      }
      start[src] = lowest.value_or(0);
    }
  } else {
    impl.checkpoint = json{{"flow", spec.name}, {"sinks", json::object()}};
    impl.write_checkpoint();
  }

  impl.out_edges.resize(n);
  impl.in_edges.resize(n);
  for (size_t i = 0; i < n; ++i) {
    impl.notifiers.push_back(std::make_unique<Notifier>());
    for (const auto& port : impl.procs[i]->output_ports()) impl.out_edges[i][port];
  }
  const auto& edges = graph.edges();
  for (size_t e = 0; e < edges.size(); ++e) {
    impl.conns.push_back(std::make_unique<Connection>(edges[e].capacity, *impl.notifiers[edges[e].to]));
    impl.out_edges[edges[e].from.node][edges[e].from.port].push_back(e);
    impl.in_edges[edges[e].to].push_back(e);
  }

  std::map<size_t, uint64_t> end;
  for (size_t i = 0; i < n; ++i) {
    if (graph.roles()[i] == Role::kSource) end[i] = start[i];
  }
  {
    std::vector<std::jthread> workers;
    workers.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      uint64_t* end_slot = graph.roles()[i] == Role::kSource ? &end[i] : nullptr;
      workers.emplace_back([&impl, &start, i, end_slot] {
        try {
          if (end_slot) {
            impl.run_source(i, start[i], *end_slot);
          } else {
            impl.run_consumer(i);
          }
        } catch (const Cancelled&) {
        } catch (const CrashSignal& c) {
          impl.crash(c.where);
        } catch (const std::exception& e) {
          impl.fail(i, e.what());
        } catch (...) {
          impl.fail(i, "unknown exception");
        }
        impl.close_outputs(i);
      });
    }
  }

  if (impl.crashed.load()) {
    throw_error(ErrorCode::kFlowFailed, "injected crash " + impl.crash_where + " in run " + impl.run_id);
  }
  if (impl.failure) {
    try {
      impl.prov->flush();
    } catch (const LakeError&) {
    }
    throw_error(ErrorCode::kFlowFailed, *impl.failure);
  }

  // Everything reachable has been committed or dropped, so every sink is
  // caught up with every source feeding it.
  for (const auto& [src, sinks] : graph.reachable_sinks()) {
    for (size_t sink : sinks) {
      auto& slot = impl.checkpoint["sinks"][impl.name_of(sink)];
      if (!slot.is_object()) slot = json::object();
      slot[impl.name_of(src)] = std::max<uint64_t>(slot.value(impl.name_of(src), uint64_t{0}), end[src]);
    }
  }
  impl.write_checkpoint();
  impl.prov->flush();
  if (!fs::exists(prov_file)) fs_util::write_atomic(prov_file, "");

  const std::string job = job_node(impl.run_id);
  for (const auto& [src, sinks] : graph.reachable_sinks()) {
    const std::string from = source_node(impl.procs[src]->lineage_label());
    catalog.record_lineage(LineageEdge{from, job, JobKind::kFlowRun, iso8601_now()});
    for (size_t sink : sinks) {
      auto target = impl.procs[sink]->target_dataset();
      if (!target) continue;
      const std::string to = dataset_node(*target);
      catalog.record_lineage(LineageEdge{job, to, JobKind::kFlowRun, iso8601_now()});
      catalog.record_lineage(LineageEdge{from, to, JobKind::kFlowRun, iso8601_now()});
    }
  }

  FlowReport report;
  report.run_id = impl.run_id;
  report.records_in = impl.prov->count(EventKind::kCreate);
  report.records_out = impl.prov->count(EventKind::kSend);
  report.records_dropped = impl.prov->count(EventKind::kDrop);
  for (size_t e = 0; e < edges.size(); ++e) report.max_queue_depths[edges[e].label] = impl.conns[e]->max_depth();
  report.files_committed = impl.files_committed.load();
  for (const auto& [src, off] : start) report.start_offsets[impl.name_of(src)] = off;
  for (const auto& [src, off] : end) report.end_offsets[impl.name_of(src)] = off;
  report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  report.provenance = impl.prov;
  report.provenance_file = prov_file;
  return report;
}

}  // namespace lakelet
