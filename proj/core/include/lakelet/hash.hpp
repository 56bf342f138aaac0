#pragma once

#include <string>
#include <string_view>

namespace lakelet {

/// Name recorded in manifests as `hash_algo`.
inline constexpr std::string_view kContentHashAlgo = "sha256";

/// Lower-case hex SHA-256 digest of `bytes`.
std::string sha256_hex(std::string_view bytes);

}  // namespace lakelet
