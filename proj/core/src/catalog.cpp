#include "lakelet/catalog.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/json_codec.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(DataFormat f) { return f == DataFormat::kCsv ? "csv" : "jsonl"; }

DataFormat format_from_string(std::string_view s) {
  if (s == "csv") return DataFormat::kCsv;
  if (s == "jsonl") return DataFormat::kJsonl;
  throw_error(ErrorCode::kInvalidArgument, "unknown format '" + std::string(s) + "'");
}

std::string_view file_extension(DataFormat f) { return f == DataFormat::kCsv ? ".csv" : ".jsonl"; }

std::string_view to_string(JobKind k) {
  switch (k) {
    case JobKind::kBatchImport: return "batch_import";
    case JobKind::kFlowRun: return "flow_run";
    case JobKind::kQuery: return "query";
  }
  return "query";
}

JobKind job_kind_from_string(std::string_view s) {
  if (s == "batch_import") return JobKind::kBatchImport;
  if (s == "flow_run") return JobKind::kFlowRun;
  if (s == "query") return JobKind::kQuery;
  throw_error(ErrorCode::kInvalidArgument, "unknown job kind '" + std::string(s) + "'");
}

std::string source_node(std::string_view label) { return "source:" + std::string(label); }
std::string dataset_node(const DatasetId& id) { return "dataset:" + id.to_string(); }
std::string job_node(std::string_view job_id) { return "job:" + std::string(job_id); }

namespace {

std::optional<DatasetId> as_dataset(std::string_view node) {
  constexpr std::string_view kPrefix = "dataset:";
  if (!node.starts_with(kPrefix)) return std::nullopt;
  return DatasetId::parse(node.substr(kPrefix.size()));
}

bool valid_node_id(std::string_view node) {
  for (std::string_view prefix : {"source:", "dataset:", "job:"}) {
    if (node.starts_with(prefix) && node.size() > prefix.size()) return true;
  }
  return false;
}

}  // namespace

Catalog::Catalog(fs::path lake_root) : path_(std::move(lake_root) / std::string(kFileName)) {}

Catalog::State Catalog::load() const {
  State state;
  std::error_code ec;
  if (!fs::exists(path_, ec)) return state;
  json j;
  try {
    j = json::parse(fs_util::read_file(path_));
    state.datasets = j.at("datasets").get<std::vector<DatasetDescriptor>>();
    state.lineage = j.at("lineage").get<std::vector<LineageEdge>>();
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kParseError, "unreadable catalog " + path_.string() + ": " + e.what());
  }
  return state;
}

void Catalog::store(const State& state) const {
  json j{{"datasets", state.datasets}, {"lineage", state.lineage}};
  fs::create_directories(path_.parent_path());
  fs_util::write_atomic(path_, j.dump(2) + "\n");
}

void Catalog::ensure_file() const {
  std::lock_guard guard(mu_);
  std::error_code ec;
  if (!fs::exists(path_, ec)) store(State{});
}

void Catalog::register_dataset(DatasetDescriptor desc) {
  if (!is_valid_name(desc.name)) {
    throw_error(ErrorCode::kInvalidKey, "invalid dataset name '" + desc.name + "'");
  }
  if (desc.created_at.empty()) desc.created_at = iso8601_now();
  std::lock_guard guard(mu_);
  State state = load();
  for (const auto& d : state.datasets) {
    if (d.zone == desc.zone && d.name == desc.name) {
      throw_error(ErrorCode::kAlreadyRegistered, desc.id().to_string() + " is already registered");
    }
  }
  state.datasets.push_back(std::move(desc));
  std::sort(state.datasets.begin(), state.datasets.end(),
            [](const auto& a, const auto& b) { return a.id() < b.id(); });
  store(state);
}

std::optional<DatasetDescriptor> Catalog::find_dataset(const DatasetId& id) const {
  std::lock_guard guard(mu_);
  for (auto& d : load().datasets) {
    if (d.id() == id) return d;
  }
  return std::nullopt;
}

DatasetDescriptor Catalog::get_dataset(const DatasetId& id) const {
  auto d = find_dataset(id);
  if (!d) throw_error(ErrorCode::kUnknownDataset, "unknown dataset " + id.to_string());
  return *d;
}

std::vector<DatasetDescriptor> Catalog::datasets() const {
  std::lock_guard guard(mu_);
  return load().datasets;
}

std::vector<LineageEdge> Catalog::edges() const {
  std::lock_guard guard(mu_);
  return load().lineage;
}

bool Catalog::node_known(const State& state, std::string_view node_id) {
  if (auto ds = as_dataset(node_id)) {
    return std::any_of(state.datasets.begin(), state.datasets.end(),
                       [&](const auto& d) { return d.id() == *ds; });
  }
  return std::any_of(state.lineage.begin(), state.lineage.end(), [&](const auto& e) {
    return e.from_node == node_id || e.to_node == node_id;
  });
}

bool Catalog::node_exists(std::string_view node_id) const {
  std::lock_guard guard(mu_);
  return node_known(load(), node_id);
}

bool Catalog::has_edge(std::string_view from_node, std::string_view to_node) const {
  std::lock_guard guard(mu_);
  for (const auto& e : load().lineage) {
    if (e.from_node == from_node && e.to_node == to_node) return true;
  }
  return false;
}

bool Catalog::record_lineage(LineageEdge edge) {
  if (!valid_node_id(edge.from_node) || !valid_node_id(edge.to_node)) {
    throw_error(ErrorCode::kInvalidArgument,
                "malformed lineage node id in " + edge.from_node + " -> " + edge.to_node);
  }
  if (edge.at.empty()) edge.at = iso8601_now();

  std::lock_guard guard(mu_);
  State state = load();
  for (const auto* node : {&edge.from_node, &edge.to_node}) {
    if (as_dataset(*node) && !node_known(state, *node)) {
      throw_error(ErrorCode::kUnknownDataset, "lineage references unregistered " + *node);
    }
  }
  for (const auto& e : state.lineage) {
    if (e.from_node == edge.from_node && e.to_node == edge.to_node && e.job_kind == edge.job_kind) {
      return false;
    }
  }

  // The new edge closes a cycle iff from_node is reachable from to_node.
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& e : state.lineage) out[e.from_node].push_back(e.to_node);
  std::set<std::string> seen{edge.to_node};
  std::deque<std::string> frontier{edge.to_node};
  while (!frontier.empty()) {
    std::string n = std::move(frontier.front());
    frontier.pop_front();
    if (n == edge.from_node) {
      throw_error(ErrorCode::kCycleDetected,
                  "edge " + edge.from_node + " -> " + edge.to_node + " would create a cycle");
    }
    for (const auto& next : out[n]) {
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }

  state.lineage.push_back(std::move(edge));
  store(state);
  return true;
}

std::vector<LineageEdge> Catalog::lineage_of(std::string_view node_id) const {
  State state;
  {
    std::lock_guard guard(mu_);
    state = load();
  }
  if (!node_known(state, node_id)) {
    throw_error(ErrorCode::kUnknownDataset, "unknown lineage node " + std::string(node_id));
  }

  std::map<std::string, std::vector<const LineageEdge*>> incoming;
  for (const auto& e : state.lineage) incoming[e.to_node].push_back(&e);

  std::vector<const LineageEdge*> upstream;
  std::set<std::string> nodes{std::string(node_id)};
  std::deque<std::string> frontier{std::string(node_id)};
  while (!frontier.empty()) {
    std::string n = std::move(frontier.front());
    frontier.pop_front();
    for (const auto* e : incoming[n]) {
      upstream.push_back(e);
      if (nodes.insert(e->from_node).second) frontier.push_back(e->from_node);
    }
  }

  // Kahn's algorithm over the upstream subgraph; the min-heap makes ties
  // resolve by node id.
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : nodes) indegree[n] = 0;
  for (const auto* e : upstream) {
    ++indegree[e->to_node];
    succ[e->from_node].push_back(e->to_node);
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push(n);
  }
  std::map<std::string, size_t> position;
  while (!ready.empty()) {
    std::string n = ready.top();
    ready.pop();
    position[n] = position.size();
    for (const auto& s : succ[n]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }

  std::sort(upstream.begin(), upstream.end(), [&](const LineageEdge* a, const LineageEdge* b) {
    return std::make_tuple(position[a->from_node], position[a->to_node], a->job_kind, a->at) <
           std::make_tuple(position[b->from_node], position[b->to_node], b->job_kind, b->at);
  });
  std::vector<LineageEdge> out;
  out.reserve(upstream.size());
  for (const auto* e : upstream) out.push_back(*e);
  return out;
}

}  // namespace lakelet
