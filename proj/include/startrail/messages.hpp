#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "startrail/block.hpp"
#include "startrail/ids.hpp"

namespace startrail {

// Accounting weights for simulated traffic. Values approximate the wire cost
// of each message kind; every field can be overridden from a scenario file.
struct SizeModel {
    std::int64_t overhead_bytes = 80;       // fixed per-message framing
    std::int64_t cid_field_bytes = 64;      // a cid carried in a query or want list
    std::int64_t entry_bytes = 32;          // one provider/closer list entry
    std::int64_t provide_bytes = 96;        // PROVIDE body
    std::int64_t block_overhead_bytes = 128;  // block framing, replaces overhead_bytes
};

struct GetProvider {
    std::uint64_t lookup_id = 0;
    ContentId cid;
};

struct ProvidersReply {
    std::uint64_t lookup_id = 0;
    ContentId cid;
    std::vector<PeerId> providers;
    std::vector<PeerId> closer;
};

struct FindNode {
    std::uint64_t lookup_id = 0;
    Hash256 target{};
};

struct NodesReply {
    std::uint64_t lookup_id = 0;
    std::vector<PeerId> closer;
};

struct Provide {
    ContentId cid;
    PeerId provider;
};

struct Want {
    std::vector<ContentId> cids;
};

struct BlockMsg {
    Block block;
};

using Message =
    std::variant<GetProvider, ProvidersReply, FindNode, NodesReply, Provide, Want, BlockMsg>;

inline std::int64_t message_size(const Message& m, const SizeModel& s) {
    struct Sizer {
        const SizeModel& s;
        std::int64_t operator()(const GetProvider&) const {
            return s.cid_field_bytes + s.overhead_bytes;
        }
        std::int64_t operator()(const ProvidersReply& r) const {
            return s.entry_bytes *
                       static_cast<std::int64_t>(r.providers.size() + r.closer.size()) +
                   s.overhead_bytes;
        }
        std::int64_t operator()(const FindNode&) const {
            return s.cid_field_bytes + s.overhead_bytes;
        }
        std::int64_t operator()(const NodesReply& r) const {
            return s.entry_bytes * static_cast<std::int64_t>(r.closer.size()) + s.overhead_bytes;
        }
        std::int64_t operator()(const Provide&) const {
            return s.provide_bytes + s.overhead_bytes;
        }
        std::int64_t operator()(const Want& w) const {
            return s.cid_field_bytes * static_cast<std::int64_t>(w.cids.size()) +
                   s.overhead_bytes;
        }
        std::int64_t operator()(const BlockMsg& b) const {
            return static_cast<std::int64_t>(b.block.size()) + s.block_overhead_bytes;
        }
    };
    return std::visit(Sizer{s}, m);
}

}  // namespace startrail
