#pragma once

// Shared test scaffolding: an inert NodeEnv that records everything a node
// does, plus small factories for blocks and ids.

#include <cstdint>
#include <tuple>
#include <vector>

#include "startrail/startrail.hpp"

namespace test_support {

struct FakeEnv final : startrail::NodeEnv {
    startrail::SimTime clock = 0;

    struct Sent {
        int from;
        startrail::PeerId to;
        startrail::Message msg;
    };
    struct Timer {
        int node;
        startrail::SimTime at;
        startrail::ContentId cid;
        std::uint64_t token;
    };

    std::vector<Sent> sent;
    std::vector<Timer> timers;
    std::vector<startrail::LoggedStartrailEvent> events;
    std::vector<std::tuple<int, std::uint64_t, bool>> finished;
    int joins = 0;

    startrail::SimTime now() const override { return clock; }
    void send_message(int from, const startrail::PeerId& to, startrail::Message msg) override {
        sent.push_back({from, to, std::move(msg)});
    }
    void schedule_fetch_deadline(int node, startrail::SimTime at, startrail::ContentId cid,
                                 std::uint64_t token) override {
        timers.push_back({node, at, cid, token});
    }
    void log_startrail(int node, const startrail::StartrailEvent& ev) override {
        events.push_back({node, ev});
    }
    void request_finished(int node, std::uint64_t id, bool success) override {
        finished.emplace_back(node, id, success);
    }
    void join_finished(int /*node*/) override { ++joins; }
};

inline startrail::Bytes make_payload(std::size_t n, std::uint8_t fill) {
    return startrail::Bytes(n, fill);
}

inline startrail::Block make_test_block(std::size_t n, std::uint8_t fill) {
    return startrail::make_block(make_payload(n, fill));
}

// A peer id with a chosen leading byte; the tail spreads by index.
inline startrail::PeerId peer_with_lead(std::uint8_t lead, std::uint8_t index = 0) {
    startrail::Hash256 h{};
    h[0] = lead;
    h[31] = index;
    return startrail::PeerId{h};
}

inline startrail::ContentId cid_with_lead(std::uint8_t lead, std::uint8_t index = 0) {
    startrail::Hash256 h{};
    h[0] = lead;
    h[31] = index;
    return startrail::ContentId{h};
}

}  // namespace test_support
