#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace startrail {

// splitmix64: tiny, well-known 64-bit mixer. Used only to derive independent
// seeds for named streams; actual draws go through std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed: fold a label and an index into the run seed so that
// every consumer (per-node workload stream, jitter stream, shuffle, ...) gets
// an independent stream that never depends on call order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(base);
    for (char c : label) h = splitmix64(h ^ static_cast<std::uint8_t>(c));
    return splitmix64(h ^ index);
}

inline std::mt19937_64 make_stream(std::uint64_t base, std::string_view label,
                                   std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(base, label, index));
}

}  // namespace startrail
