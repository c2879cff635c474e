#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>

#include <openssl/evp.h>

namespace startrail {

// 256-bit digest, big-endian byte order for all comparisons.
using Hash256 = std::array<std::uint8_t, 32>;

inline Hash256 sha256(std::span<const std::uint8_t> data) {
    Hash256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256: digest failed");
    }
    return out;
}

inline Hash256 sha256(const std::string& s) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

inline std::string to_hex(const Hash256& h) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : h) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline Hash256 xor_bytes(const Hash256& a, const Hash256& b) {
    Hash256 out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

// Number of leading zero bits; 256 when a == b. Determines the k-bucket index.
inline int shared_prefix_bits(const Hash256& a, const Hash256& b) {
    int bits = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint8_t x = a[i] ^ b[i];
        if (x == 0) {
            bits += 8;
            continue;
        }
        for (int j = 7; j >= 0; --j) {
            if (x & (1u << j)) return bits;
            ++bits;
        }
    }
    return bits;
}

}  // namespace startrail
