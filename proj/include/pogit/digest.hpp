#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pogit {

// FNV-1a 64-bit; used for config fingerprints and input-file digests in
// run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Digest of a file's bytes; throws DataError if unreadable.
std::string file_digest(const std::string& path);

}  // namespace pogit
