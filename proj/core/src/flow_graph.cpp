#include <algorithm>
#include <queue>
#include <set>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/flow.hpp"

namespace lakelet {

using nlohmann::json;

namespace {

bool valid_processor_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  });
}

std::pair<std::string, std::string> split_endpoint(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return {std::string(text), ""};
  return {std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

}  // namespace

// --- Processor defaults ----------------------------------------------------

std::vector<std::string> Processor::output_ports() const {
  if (role() == Role::kSink) return {};
  return {"out"};
}

void Processor::on_record(ProcessContext&, FlowRecord) {}
void Processor::on_deadline(ProcessContext&) {}
void Processor::on_finish(ProcessContext&) {}
std::string Processor::identity(const RunOptions&) const { return ""; }
std::string Processor::lineage_label() const { return "unnamed"; }
void Processor::start_at(const RunOptions&, uint64_t) {}
std::optional<std::string> Processor::next_payload() { return std::nullopt; }

// --- Spec ------------------------------------------------------------------

FlowGraphSpec FlowGraphSpec::from_json(const json& j) {
  try {
    if (!j.is_object()) throw_error(ErrorCode::kInvalidSpec, "flow spec must be a JSON object");
    FlowGraphSpec spec;
    spec.name = j.value("name", std::string("flow"));
    if (!valid_processor_name(spec.name)) {
      throw_error(ErrorCode::kInvalidSpec, "invalid flow name '" + spec.name + "'");
    }
    for (const auto& p : j.at("processors")) {
      ProcessorSpec ps;
      ps.name = p.at("name").get<std::string>();
      ps.kind = p.at("kind").get<std::string>();
      if (p.contains("params")) {
        ps.params = p.at("params");
        if (!ps.params.is_object()) {
          throw_error(ErrorCode::kInvalidSpec, "params of '" + ps.name + "' must be an object");
        }
      }
      spec.processors.push_back(std::move(ps));
    }
    for (const auto& c : j.value("connections", json::array())) {
      ConnectionSpec cs;
      cs.from = c.at("from").get<std::string>();
      cs.to = c.at("to").get<std::string>();
      if (c.contains("capacity")) {
        auto cap = c.at("capacity").get<int64_t>();
        if (cap <= 0) {
          throw_error(ErrorCode::kInvalidSpec, "capacity of " + cs.from + "->" + cs.to + " must be positive");
        }
        cs.capacity = static_cast<size_t>(cap);
      }
      spec.connections.push_back(std::move(cs));
    }
    return spec;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kInvalidSpec, std::string("malformed flow spec: ") + e.what());
  }
}

FlowGraphSpec FlowGraphSpec::parse(std::string_view text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw_error(ErrorCode::kInvalidSpec, "flow spec is not valid JSON");
  return from_json(j);
}

FlowGraphSpec FlowGraphSpec::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = fs_util::read_file(path);
  } catch (const LakeError&) {
    throw_error(ErrorCode::kInvalidSpec, "cannot read flow spec " + path.string());
  }
  return parse(text);
}

json FlowGraphSpec::to_json() const {
  json procs = json::array();
  for (const auto& p : processors) procs.push_back({{"name", p.name}, {"kind", p.kind}, {"params", p.params}});
  json conns = json::array();
  for (const auto& c : connections) conns.push_back({{"from", c.from}, {"to", c.to}, {"capacity", c.capacity}});
  return json{{"name", name}, {"processors", procs}, {"connections", conns}};
}

// --- Registry --------------------------------------------------------------

void ProcessorRegistry::add(std::string kind, ProcessorFactory factory) {
  factories_[std::move(kind)] = std::move(factory);
}

bool ProcessorRegistry::contains(std::string_view kind) const { return factories_.find(kind) != factories_.end(); }

std::unique_ptr<Processor> ProcessorRegistry::create(const ProcessorSpec& spec) const {
  auto it = factories_.find(spec.kind);
  if (it == factories_.end()) {
    throw_error(ErrorCode::kUnknownProcessorKind,
                "processor '" + spec.name + "' has unknown kind '" + spec.kind + "'");
  }
  try {
    auto p = it->second(spec);
    if (!p) throw_error(ErrorCode::kInvalidSpec, "factory for '" + spec.kind + "' returned nothing");
    return p;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kInvalidSpec, "bad params for '" + spec.name + "': " + e.what());
  }
}

// --- Graph -----------------------------------------------------------------

std::unique_ptr<Processor> FlowGraph::instantiate(size_t node) const {
  return registry_->create(spec_.processors.at(node));
}

FlowGraph build_graph(FlowGraphSpec spec, const ProcessorRegistry& registry) {
  FlowGraph g;
  const size_t n = spec.processors.size();
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n; ++i) {
    const auto& p = spec.processors[i];
    if (!valid_processor_name(p.name)) {
      throw_error(ErrorCode::kInvalidSpec, "invalid processor name '" + p.name + "'");
    }
    if (!index.emplace(p.name, i).second) {
      throw_error(ErrorCode::kInvalidSpec, "duplicate processor name '" + p.name + "'");
    }
  }

  std::vector<std::unique_ptr<Processor>> probes;
  for (const auto& p : spec.processors) probes.push_back(registry.create(p));
  for (const auto& p : probes) g.roles_.push_back(p->role());

  struct Raw {
    size_t from;
    std::string port;
    size_t to;
    std::string to_port;
    size_t capacity;
  };
  std::vector<Raw> raw;
  for (const auto& c : spec.connections) {
    auto [from_name, from_port] = split_endpoint(c.from);
    auto [to_name, to_port] = split_endpoint(c.to);
    auto fi = index.find(from_name);
    auto ti = index.find(to_name);
    if (fi == index.end()) throw_error(ErrorCode::kDanglingPort, "connection from unknown processor '" + from_name + "'");
    if (ti == index.end()) throw_error(ErrorCode::kDanglingPort, "connection to unknown processor '" + to_name + "'");
    if (c.capacity == 0) throw_error(ErrorCode::kInvalidSpec, "connection capacity must be positive");
    raw.push_back({fi->second, from_port.empty() ? "out" : from_port, ti->second, to_port, c.capacity});
  }

  // Kahn's algorithm; leftovers sit on a cycle (self-loops included).
  std::vector<std::vector<size_t>> adj(n);
  std::vector<size_t> indeg(n, 0);
  for (const auto& r : raw) {
    adj[r.from].push_back(r.to);
    ++indeg[r.to];
  }
  std::priority_queue<size_t, std::vector<size_t>, std::greater<>> ready;
  for (size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    size_t u = ready.top();
    ready.pop();
    g.topo_.push_back(u);
    for (size_t v : adj[u]) {
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  if (g.topo_.size() != n) {
    for (size_t i = 0; i < n; ++i) {
      if (indeg[i] > 0) {
        throw_error(ErrorCode::kCycleDetected, "flow graph has a cycle through '" + spec.processors[i].name + "'");
      }
    }
  }

  std::set<std::tuple<size_t, std::string, size_t>> seen;
  for (const auto& r : raw) {
    const auto& from = spec.processors[r.from];
    const auto& to = spec.processors[r.to];
    auto ports = probes[r.from]->output_ports();
    if (std::find(ports.begin(), ports.end(), r.port) == ports.end()) {
      throw_error(ErrorCode::kDanglingPort, "processor '" + from.name + "' has no output port '" + r.port + "'");
    }
    if (g.roles_[r.to] == Role::kSource || (!r.to_port.empty() && r.to_port != "in")) {
      throw_error(ErrorCode::kDanglingPort,
                  "processor '" + to.name + "' has no input port" + (r.to_port.empty() ? "" : " '" + r.to_port + "'"));
    }
    if (!seen.emplace(r.from, r.port, r.to).second) {
      throw_error(ErrorCode::kInvalidSpec, "duplicate connection " + from.name + ":" + r.port + "->" + to.name);
    }
    g.edges_.push_back(GraphEdge{PortRef{r.from, r.port}, r.to, r.capacity, from.name + ":" + r.port + "->" + to.name});
  }

  bool has_source = false, has_sink = false;
  for (auto role : g.roles_) {
    has_source |= role == Role::kSource;
    has_sink |= role == Role::kSink;
  }
  std::map<DatasetId, std::string> targets;
  for (size_t i = 0; i < n; ++i) {
    auto t = probes[i]->target_dataset();
    if (!t) continue;
    auto [it, fresh] = targets.emplace(*t, spec.processors[i].name);
    if (!fresh) {
      throw_error(ErrorCode::kInvalidSpec, "sinks '" + it->second + "' and '" + spec.processors[i].name +
                                               "' both write " + t->to_string());
    }
  }
  if (!has_source) throw_error(ErrorCode::kInvalidSpec, "flow graph has no source");
  if (!has_sink) throw_error(ErrorCode::kInvalidSpec, "flow graph has no sink");

  for (size_t s = 0; s < n; ++s) {
    if (g.roles_[s] != Role::kSource) continue;
    std::vector<bool> seen_node(n, false);
    std::vector<size_t> stack{s};
    seen_node[s] = true;
    std::vector<size_t> sinks;
    while (!stack.empty()) {
      size_t u = stack.back();
      stack.pop_back();
      if (g.roles_[u] == Role::kSink) sinks.push_back(u);
      for (size_t v : adj[u]) {
        if (!seen_node[v]) {
          seen_node[v] = true;
          stack.push_back(v);
        }
      }
    }
    std::sort(sinks.begin(), sinks.end());
    g.reachable_[s] = std::move(sinks);
  }

  g.spec_ = std::move(spec);
  g.registry_ = std::make_shared<const ProcessorRegistry>(registry);
  return g;
}

}  // namespace lakelet
