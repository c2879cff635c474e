#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "startrail/ids.hpp"

namespace startrail {

using Bytes = std::vector<std::uint8_t>;

// Default ceiling on payload length, matching the usual 256 KiB block limit.
constexpr std::size_t kDefaultMaxBlockSize = 262144;

inline ContentId compute_cid(std::span<const std::uint8_t> payload,
                             std::size_t max_size = kDefaultMaxBlockSize) {
    if (payload.size() > max_size) {
        throw std::invalid_argument("compute_cid: payload exceeds max block size");
    }
    return ContentId{sha256(payload)};
}

// Immutable content block. The payload is shared so copies (messages, stores)
// do not duplicate the bytes.
struct Block {
    ContentId cid{};
    std::shared_ptr<const Bytes> payload;
    std::vector<ContentId> links;

    std::size_t size() const { return payload ? payload->size() : 0; }
};

inline Block make_block(Bytes payload, std::vector<ContentId> links = {},
                        std::size_t max_size = kDefaultMaxBlockSize) {
    auto shared = std::make_shared<const Bytes>(std::move(payload));
    ContentId cid = compute_cid(*shared, max_size);
    return Block{cid, std::move(shared), std::move(links)};
}

// True iff the advertised cid matches the payload digest and the size limit
// holds. Tampered blocks must never enter a blockstore.
inline bool verify_block(const Block& b, std::size_t max_size = kDefaultMaxBlockSize) {
    if (!b.payload || b.payload->size() > max_size) return false;
    return ContentId{sha256(*b.payload)} == b.cid;
}

}  // namespace startrail
