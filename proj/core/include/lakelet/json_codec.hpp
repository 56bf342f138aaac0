#pragma once

// nlohmann::json adapters for the lake's persisted types. Field names match
// the on-disk formats (manifests, catalog.json) exactly.

#include <nlohmann/json.hpp>

#include "lakelet/catalog.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/schema.hpp"

namespace lakelet {

void to_json(nlohmann::json& j, const Field& f);
void from_json(const nlohmann::json& j, Field& f);
void to_json(nlohmann::json& j, const SchemaDescriptor& s);
void from_json(const nlohmann::json& j, SchemaDescriptor& s);

void to_json(nlohmann::json& j, const ObjectKey& k);
void from_json(const nlohmann::json& j, ObjectKey& k);
void to_json(nlohmann::json& j, const ObjectRef& r);
void from_json(const nlohmann::json& j, ObjectRef& r);
void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

void to_json(nlohmann::json& j, const DatasetDescriptor& d);
void from_json(const nlohmann::json& j, DatasetDescriptor& d);
void to_json(nlohmann::json& j, const LineageEdge& e);
void from_json(const nlohmann::json& j, LineageEdge& e);

}  // namespace lakelet
