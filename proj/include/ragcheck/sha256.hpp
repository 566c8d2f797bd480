#pragma once

#include <string>
#include <string_view>

namespace ragcheck {

// SHA-256 digest as a lowercase hex string. Used for content-addressed cache
// keys and input hashes in run manifests.
std::string sha256_hex(std::string_view data);

} // namespace ragcheck
