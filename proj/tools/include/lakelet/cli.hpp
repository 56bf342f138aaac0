#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakelet/error.hpp"

namespace lakelet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
/// Library errors map to kExitErrorBase + the ErrorCode's ordinal.
inline constexpr int kExitErrorBase = 10;

int exit_code_for(ErrorCode code);

/// Per-lake settings in `<root>/lake.json`; its presence marks a lake.
struct LakeConfig {
  std::filesystem::path lake_root;
  uint64_t default_seed = 42;
  bool strict_mode = false;

  nlohmann::json to_json() const;
  static LakeConfig from_json(const nlohmann::json& j);
  /// Throws kNotALake when `<root>/lake.json` is missing or unreadable.
  static LakeConfig load(const std::filesystem::path& root);
  void save() const;

  bool operator==(const LakeConfig&) const = default;
};

std::filesystem::path config_path(const std::filesystem::path& root);

/// Creates the lake layout. Idempotent on a valid lake; throws kNotALake on a
/// non-empty directory that is not one. Returns false if already initialised.
bool init_lake(const std::filesystem::path& root);

/// Runs one command. `args` excludes the program name. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lakelet::cli
