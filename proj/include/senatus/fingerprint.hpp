// fingerprint.hpp - stable 64-bit hashing primitives
//
// Everything here is platform-independent and fixed for the life of an index
// format version: fingerprints are persisted (indirectly, through MinHash
// signatures and bucket digests), so they must never depend on std::hash or
// on endianness.
#pragma once

#include <cstdint>
#include <string_view>

namespace senatus {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x00000100000001b3ULL;

// FNV-1a over raw bytes.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    return fnv1a64(s.data(), s.size(), h);
}

// Identifier of the term fingerprint function, recorded in index manifests.
inline constexpr const char* kFingerprintAlgorithm = "fnv1a64";

// Stable 64-bit id of a structural term string.
inline std::uint64_t term_fingerprint(std::string_view term) {
    return fnv1a64(term);
}

// splitmix64, used to derive hash-function parameters from a seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mix a 64-bit value into another (for digesting fixed-width integers).
inline std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t h) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
    return fnv1a64(bytes, 8, h);
}

} // namespace senatus
