#include <algorithm>
#include <cerrno>

#include <fcntl.h>
#include <unistd.h>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/flow.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_synced(const fs::path& path, std::string_view data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw_error(ErrorCode::kIoError, "cannot open " + path.string());
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw_error(ErrorCode::kIoError, "write failed on " + path.string());
    }
    off += static_cast<size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw_error(ErrorCode::kIoError, "fsync failed on " + path.string());
  }
  ::close(fd);
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kCreate: return "CREATE";
    case EventKind::kTransform: return "TRANSFORM";
    case EventKind::kRoute: return "ROUTE";
    case EventKind::kDrop: return "DROP";
    case EventKind::kSend: return "SEND";
  }
  return "CREATE";
}

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::kCreate, EventKind::kTransform, EventKind::kRoute, EventKind::kDrop,
                 EventKind::kSend}) {
    if (to_string(k) == s) return k;
  }
  throw_error(ErrorCode::kParseError, "unknown provenance kind '" + std::string(s) + "'");
}

json to_json(const ProvenanceEvent& e) {
  return json{{"record_uuid", e.record_uuid.to_string()},
              {"processor", e.processor},
              {"kind", to_string(e.kind)},
              {"at", iso8601_utc(e.at)},
              {"at_ms", e.at},
              {"detail", e.detail},
              {"seq", e.seq}};
}

ProvenanceEvent provenance_event_from_json(const json& j) {
  try {
    ProvenanceEvent e;
    auto u = Uuid::parse(j.at("record_uuid").get<std::string>());
    if (!u) throw_error(ErrorCode::kParseError, "bad record_uuid");
    e.record_uuid = *u;
    e.processor = j.at("processor").get<std::string>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.at = j.at("at_ms").get<int64_t>();
    e.detail = j.value("detail", "");
    e.seq = j.at("seq").get<uint64_t>();
    return e;
  } catch (const json::exception& ex) {
    throw_error(ErrorCode::kParseError, std::string("bad provenance event: ") + ex.what());
  }
}

void ProvenanceLog::append(ProvenanceEvent e) {
  std::lock_guard lock(mu_);
  e.seq = events_.size();
  events_.push_back(std::move(e));
}

void ProvenanceLog::flush() {
  if (!file_) return;
  std::lock_guard lock(mu_);
  if (flushed_ == events_.size()) return;
  std::string out;
  for (size_t i = flushed_; i < events_.size(); ++i) {
    out += to_json(events_[i]).dump();
    out.push_back('\n');
  }
  fs::create_directories(file_->parent_path());
  append_synced(*file_, out);
  flushed_ = events_.size();
}

std::vector<ProvenanceEvent> ProvenanceLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<ProvenanceEvent> ProvenanceLog::query(const Uuid& uuid) const {
  std::lock_guard lock(mu_);
  std::vector<ProvenanceEvent> out;
  for (const auto& e : events_) {
    if (e.record_uuid == uuid) out.push_back(e);
  }
  if (out.empty()) throw_error(ErrorCode::kUnknownRecord, "no provenance for " + uuid.to_string());
  return out;
}

uint64_t ProvenanceLog::count(EventKind k) const {
  std::lock_guard lock(mu_);
  return static_cast<uint64_t>(
      std::count_if(events_.begin(), events_.end(), [k](const auto& e) { return e.kind == k; }));
}

std::vector<ProvenanceEvent> provenance_query(const fs::path& lake_root, const Uuid& uuid) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(lake_root / "provenance", ec)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".jsonl") && !fs_util::is_temp_name(name)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  const std::string needle = uuid.to_string();
  std::vector<ProvenanceEvent> out;
  for (const auto& f : files) {
    std::string text = fs_util::read_file(f);
    size_t pos = 0;
    while (pos < text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::string_view line(text.data() + pos, nl - pos);
      pos = nl + 1;
      // Cheap prefilter; a torn last line is ignored.
      if (line.find(needle) == std::string_view::npos) continue;
      auto j = json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      auto e = provenance_event_from_json(j);
      if (e.record_uuid == uuid) out.push_back(std::move(e));
    }
  }
  if (out.empty()) throw_error(ErrorCode::kUnknownRecord, "no provenance for " + needle);
  return out;
}

}  // namespace lakelet
