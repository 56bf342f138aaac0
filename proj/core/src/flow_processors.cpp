#include <cstdio>
#include <thread>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/flow.hpp"
#include "lakelet/hash.hpp"
#include "lakelet/tweets.hpp"

namespace lakelet {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

uint64_t param_u64(const ProcessorSpec& spec, const char* key, uint64_t fallback) {
  if (!spec.params.contains(key)) return fallback;
  const auto& v = spec.params.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)) {
    throw_error(ErrorCode::kInvalidSpec, spec.name + "." + key + " must be a non-negative integer");
  }
  return v.get<uint64_t>();
}

std::string param_str(const ProcessorSpec& spec, const char* key, std::optional<std::string> fallback) {
  if (!spec.params.contains(key)) {
    if (!fallback) throw_error(ErrorCode::kInvalidSpec, spec.name + " requires param '" + key + "'");
    return *fallback;
  }
  const auto& v = spec.params.at(key);
  if (!v.is_string()) throw_error(ErrorCode::kInvalidSpec, spec.name + "." + key + " must be a string");
  return v.get<std::string>();
}

class TweetSource final : public Processor {
 public:
  explicit TweetSource(const ProcessorSpec& spec)
      : seed_(param_u64(spec, "seed", 0)), label_(param_str(spec, "label", "twitter-sim")) {
    if (spec.params.contains("brand_weights")) {
      const auto& w = spec.params.at("brand_weights");
      if (!w.is_object()) throw_error(ErrorCode::kInvalidSpec, spec.name + ".brand_weights must be an object");
      for (const auto& [brand, weight] : w.items()) {
        if (!weight.is_number()) throw_error(ErrorCode::kInvalidSpec, "weight for '" + brand + "' must be a number");
        weights_[brand] = weight.get<double>();
      }
    } else {
      weights_ = uniform_brand_weights();
    }
    TweetGenerator probe(seed_, weights_);  // validates weights
  }

  Role role() const override { return Role::kSource; }
  bool finite() const override { return false; }
  std::string identity(const RunOptions& options) const override {
    return "seed=" + std::to_string(options.seed.value_or(seed_));
  }
  std::string lineage_label() const override { return label_; }
  void start_at(const RunOptions& options, uint64_t offset) override {
    gen_.emplace(options.seed.value_or(seed_), weights_);
    gen_->skip(offset);
  }
  std::optional<std::string> next_payload() override { return to_json_line(gen_->next()); }

 private:
  uint64_t seed_;
  std::string label_;
  BrandWeights weights_;
  std::optional<TweetGenerator> gen_;
};

/// One record per non-empty line of a file.
class FileSource final : public Processor {
 public:
  explicit FileSource(const ProcessorSpec& spec) : path_(param_str(spec, "path", std::nullopt)) {
    try {
      text_ = fs_util::read_file(path_);
    } catch (const LakeError&) {
      throw_error(ErrorCode::kInvalidSpec, spec.name + ": cannot read " + path_.string());
    }
    hash_ = sha256_hex(text_).substr(0, 16);
  }

  Role role() const override { return Role::kSource; }
  std::string identity(const RunOptions&) const override { return "sha256=" + hash_; }
  std::string lineage_label() const override { return path_.filename().string() + "@" + hash_; }
  void start_at(const RunOptions&, uint64_t offset) override {
    pos_ = 0;
    for (uint64_t i = 0; i < offset && read_line(); ++i) {
    }
  }
  std::optional<std::string> next_payload() override { return read_line(); }

 private:
  std::optional<std::string> read_line() {
    while (pos_ < text_.size()) {
      size_t nl = text_.find('\n', pos_);
      if (nl == std::string::npos) nl = text_.size();
      std::string line = text_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    return std::nullopt;
  }

  std::filesystem::path path_;
  std::string text_;
  std::string hash_;
  size_t pos_ = 0;
};

class ParseTweet final : public Processor {
 public:
  explicit ParseTweet(const ProcessorSpec&) {}

  Role role() const override { return Role::kTransform; }
  std::vector<std::string> output_ports() const override { return {"out", "quarantine"}; }

  void on_record(ProcessContext& ctx, FlowRecord record) override {
    auto j = json::parse(record.payload, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      if (ctx.port_connected("quarantine")) {
        ctx.record_event(record.uuid, EventKind::kRoute, "quarantine: malformed-json");
        ctx.emit("quarantine", std::move(record));
      } else {
        ctx.record_event(record.uuid, EventKind::kDrop, "malformed-json");
      }
      return;
    }
    auto text_of = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (j.contains("tweet_id")) record.attributes["tweet_id"] = text_of(j["tweet_id"]);
    if (j.contains("lang") && !j["lang"].is_null()) record.attributes["lang"] = text_of(j["lang"]);
    record.attributes["msg"] = j.contains("msg") && !j["msg"].is_null() ? text_of(j["msg"]) : "";
    ctx.record_event(record.uuid, EventKind::kTransform, "parse_tweet");
    ctx.emit("out", std::move(record));
  }
};

class FilterLang final : public Processor {
 public:
  explicit FilterLang(const ProcessorSpec& spec) : keep_(param_str(spec, "keep", "en")) {}

  Role role() const override { return Role::kTransform; }

  void on_record(ProcessContext& ctx, FlowRecord record) override {
    auto it = record.attributes.find("lang");
    if (it == record.attributes.end()) {
      ctx.record_event(record.uuid, EventKind::kDrop, "missing-attribute");
      return;
    }
    if (it->second != keep_) {
      ctx.record_event(record.uuid, EventKind::kDrop, "lang=" + it->second);
      return;
    }
    ctx.record_event(record.uuid, EventKind::kRoute, "lang=" + keep_);
    ctx.emit("out", std::move(record));
  }

 private:
  std::string keep_;
};

class MicroBatchSink final : public Processor {
 public:
  explicit MicroBatchSink(const ProcessorSpec& spec)
      : name_(spec.name),
        dataset_(DatasetId::parse(param_str(spec, "dataset", std::nullopt))),
        batch_max_(param_u64(spec, "batch_max", 100)),
        flush_interval_(param_u64(spec, "flush_interval_ms", 1000)),
        delay_(param_u64(spec, "delay_ms", 0)) {
    if (batch_max_ == 0) throw_error(ErrorCode::kInvalidSpec, spec.name + ".batch_max must be positive");
  }

  Role role() const override { return Role::kSink; }
  std::optional<DatasetId> target_dataset() const override { return dataset_; }

  void on_record(ProcessContext& ctx, FlowRecord record) override {
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    if (buffer_.empty()) first_at_ = Clock::now();
    buffer_.push_back(std::move(record));
    if (buffer_.size() >= batch_max_) flush(ctx);
  }

  std::optional<Clock::time_point> deadline() const override {
    if (buffer_.empty() || flush_interval_.count() == 0) return std::nullopt;
    return first_at_ + flush_interval_;
  }
  void on_deadline(ProcessContext& ctx) override { flush(ctx); }
  void on_finish(ProcessContext& ctx) override { flush(ctx); }

 private:
  void flush(ProcessContext& ctx) {
    if (buffer_.empty()) return;
    std::string payload;
    for (const auto& r : buffer_) {
      payload += inject_uuid(r.payload, r.uuid);
      payload.push_back('\n');
    }
    char filename[32];
    std::snprintf(filename, sizeof(filename), "part-%05llu.jsonl", static_cast<unsigned long long>(batch_));
    ObjectKey key{dataset_.zone, dataset_.name, "run-" + ctx.run_id(), filename};
    ObjectRef ref = ctx.store().put_object(key, payload, buffer_.size());
    try {
      ctx.commit_batch(dataset_, ref);
    } catch (const LakeError&) {
      try {
        ctx.commit_batch(dataset_, ref);
      } catch (const LakeError& second) {
        throw_error(ErrorCode::kFlowFailed, "sink '" + name_ + "' could not commit " + key.relative_path().string() +
                                                " after retry: " + second.what());
      }
    }
    ctx.batch_committed(buffer_, dataset_.to_string() + "/" + key.partition + "/" + filename);
    buffer_.clear();
    ++batch_;
  }

  std::string name_;
  DatasetId dataset_;
  uint64_t batch_max_;
  std::chrono::milliseconds flush_interval_;
  std::chrono::milliseconds delay_;
  std::vector<FlowRecord> buffer_;
  Clock::time_point first_at_{};
  uint64_t batch_ = 0;
};

template <typename T>
ProcessorFactory factory_of() {
  return [](const ProcessorSpec& spec) -> std::unique_ptr<Processor> { return std::make_unique<T>(spec); };
}

}  // namespace

std::string inject_uuid(std::string_view payload, const Uuid& uuid) {
  const std::string id = uuid.to_string();
  auto j = json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return json{{"_raw", std::string(payload)}, {"_uuid", id}}.dump();
  }
  // Splicing keeps the source bytes; re-serialise only when that would
  // produce a duplicate key or a multi-line record.
  if (j.contains("_uuid") || payload.find('\n') != std::string_view::npos) {
    j["_uuid"] = id;
    return j.dump();
  }
  size_t end = payload.find_last_not_of(" \t\r");
  std::string out(payload.substr(0, end));  // drop the closing brace
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
  if (j.empty()) {
    return "{\"_uuid\":\"" + id + "\"}";
  }
  out += ",\"_uuid\":\"" + id + "\"}";
  return out;
}

ProcessorRegistry ProcessorRegistry::with_builtins() {
  ProcessorRegistry r;
  r.add("tweet_source", factory_of<TweetSource>());
  r.add("file_source", factory_of<FileSource>());
  r.add("parse_tweet", factory_of<ParseTweet>());
  r.add("filter_lang", factory_of<FilterLang>());
  r.add("micro_batch_sink", factory_of<MicroBatchSink>());
  return r;
}

}  // namespace lakelet
