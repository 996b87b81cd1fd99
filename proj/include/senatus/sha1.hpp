// sha1.hpp - minimal SHA-1 for feature-vector dedup digests
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace senatus {

class Sha1 {
public:
    Sha1() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    // Finalizes and returns the 20-byte digest. The object must be reset()
    // before further use.
    std::array<std::uint8_t, 20> digest();

    // Lowercase 40-char hex digest.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t h_[5];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffered_ = 0;
};

// One-shot convenience.
std::string sha1_hex(std::string_view data);

} // namespace senatus
