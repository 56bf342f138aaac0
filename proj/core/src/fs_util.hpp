#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lakelet::fs_util {

/// Marker embedded in every staged file name; recovery deletes matches.
inline constexpr std::string_view kTempMarker = ".tmp-";

bool is_temp_name(std::string_view filename);

/// Unique staging path next to `target` (same directory, so rename is atomic).
std::filesystem::path staging_path(const std::filesystem::path& target);

/// Writes and fsyncs `data` to `path`, truncating any previous content.
void write_synced(const std::filesystem::path& path, std::string_view data);

/// Stage-then-rename. Replaces `target` if it exists.
void write_atomic(const std::filesystem::path& target, std::string_view data);

/// Stage-then-link. Returns false (and leaves `target` untouched) when
/// `target` already exists.
bool write_atomic_no_replace(const std::filesystem::path& target, std::string_view data);

std::string read_file(const std::filesystem::path& path);

void fsync_dir(const std::filesystem::path& dir);

}  // namespace lakelet::fs_util
