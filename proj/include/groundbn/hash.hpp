#pragma once
// Stable 64-bit FNV-1a, used for stream ids and content hashes.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace groundbn {

inline constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace groundbn
