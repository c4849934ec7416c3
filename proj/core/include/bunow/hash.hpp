#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bunow {

// FNV-1a 64-bit. Integrity tag for artifact provenance, not a security hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

}  // namespace bunow
