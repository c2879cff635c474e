#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "startrail/hash.hpp"

namespace startrail {

// Node identity. Lives in the same 256-bit key space as content ids so XOR
// distance between a peer and a cid is well defined.
struct PeerId {
    Hash256 id{};

    auto operator<=>(const PeerId&) const = default;

    std::string hex() const { return to_hex(id); }
    std::string short_hex() const { return to_hex(id).substr(0, 8); }
};

// Content address: digest of the block payload bytes.
struct ContentId {
    Hash256 digest{};

    auto operator<=>(const ContentId&) const = default;

    std::string hex() const { return to_hex(digest); }
    // Rendering used in logs and CSV output.
    std::string display() const { return "Qm-sim:" + to_hex(digest); }
};

// Deterministic identity for simulated nodes: any two runs with the same seed
// place every node at the same point of the key space.
inline PeerId peer_id_for_node(std::size_t index, std::uint64_t run_seed) {
    return PeerId{sha256("node-" + std::to_string(index) + "-" + std::to_string(run_seed))};
}

inline Hash256 distance(const PeerId& a, const ContentId& b) { return xor_bytes(a.id, b.digest); }
inline Hash256 distance(const PeerId& a, const PeerId& b) { return xor_bytes(a.id, b.id); }

}  // namespace startrail

template <>
struct std::hash<startrail::PeerId> {
    std::size_t operator()(const startrail::PeerId& p) const noexcept {
        std::size_t v;
        std::memcpy(&v, p.id.data(), sizeof(v));
        return v;
    }
};

template <>
struct std::hash<startrail::ContentId> {
    std::size_t operator()(const startrail::ContentId& c) const noexcept {
        std::size_t v;
        std::memcpy(&v, c.digest.data(), sizeof(v));
        return v;
    }
};
