#include "lakelet/json_codec.hpp"

namespace lakelet {

using nlohmann::json;

void to_json(json& j, const Field& f) {
  j = json{{"name", f.name}, {"dtype", to_string(f.dtype)}, {"nullable", f.nullable}};
}

void from_json(const json& j, Field& f) {
  f.name = j.at("name").get<std::string>();
  f.dtype = dtype_from_string(j.at("dtype").get<std::string>());
  f.nullable = j.at("nullable").get<bool>();
}

void to_json(json& j, const SchemaDescriptor& s) { j = json{{"fields", s.fields}}; }

void from_json(const json& j, SchemaDescriptor& s) {
  s.fields = j.at("fields").get<std::vector<Field>>();
}

void to_json(json& j, const ObjectKey& k) {
  j = json{{"zone", to_string(k.zone)},
           {"dataset", k.dataset},
           {"partition", k.partition},
           {"filename", k.filename}};
}

void from_json(const json& j, ObjectKey& k) {
  k.zone = zone_from_string(j.at("zone").get<std::string>());
  k.dataset = j.at("dataset").get<std::string>();
  k.partition = j.value("partition", std::string());
  k.filename = j.at("filename").get<std::string>();
}

void to_json(json& j, const ObjectRef& r) {
  j = json{{"key", r.key}, {"size_bytes", r.size_bytes}, {"content_hash", r.content_hash}};
  j["record_count"] = r.record_count ? json(*r.record_count) : json(nullptr);
}

void from_json(const json& j, ObjectRef& r) {
  r.key = j.at("key").get<ObjectKey>();
  r.size_bytes = j.at("size_bytes").get<uint64_t>();
  r.content_hash = j.at("content_hash").get<std::string>();
  const auto& rc = j.at("record_count");
  r.record_count = rc.is_null() ? std::nullopt : std::optional<uint64_t>(rc.get<uint64_t>());
}

void to_json(json& j, const DatasetManifest& m) {
  j = json{{"dataset", m.dataset},
           {"zone", to_string(m.zone)},
           {"version", m.version},
           {"files", m.files},
           {"committed_at", m.committed_at},
           {"hash_algo", m.hash_algo}};
  j["schema_hint"] = m.schema_hint ? json(*m.schema_hint) : json(nullptr);
}

void from_json(const json& j, DatasetManifest& m) {
  m.dataset = j.at("dataset").get<std::string>();
  m.zone = zone_from_string(j.at("zone").get<std::string>());
  m.version = j.at("version").get<uint64_t>();
  m.files = j.at("files").get<std::vector<ObjectRef>>();
  m.committed_at = j.at("committed_at").get<std::string>();
  m.hash_algo = j.at("hash_algo").get<std::string>();
  auto it = j.find("schema_hint");
  if (it != j.end() && !it->is_null()) {
    m.schema_hint = it->get<SchemaDescriptor>();
  } else {
    m.schema_hint.reset();
  }
}

void to_json(json& j, const DatasetDescriptor& d) {
  j = json{{"name", d.name},
           {"zone", to_string(d.zone)},
           {"format", to_string(d.format)},
           {"created_at", d.created_at},
           {"source", d.source}};
  j["schema_hint"] = d.schema_hint ? json(*d.schema_hint) : json(nullptr);
}

void from_json(const json& j, DatasetDescriptor& d) {
  d.name = j.at("name").get<std::string>();
  d.zone = zone_from_string(j.at("zone").get<std::string>());
  d.format = format_from_string(j.at("format").get<std::string>());
  d.created_at = j.at("created_at").get<std::string>();
  d.source = j.at("source").get<std::string>();
  auto it = j.find("schema_hint");
  if (it != j.end() && !it->is_null()) {
    d.schema_hint = it->get<SchemaDescriptor>();
  } else {
    d.schema_hint.reset();
  }
}

void to_json(json& j, const LineageEdge& e) {
  j = json{{"from_node", e.from_node},
           {"to_node", e.to_node},
           {"job_kind", to_string(e.job_kind)},
           {"at", e.at}};
}

void from_json(const json& j, LineageEdge& e) {
  e.from_node = j.at("from_node").get<std::string>();
  e.to_node = j.at("to_node").get<std::string>();
  e.job_kind = job_kind_from_string(j.at("job_kind").get<std::string>());
  e.at = j.at("at").get<std::string>();
}

}  // namespace lakelet
