#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "startrail/block.hpp"
#include "startrail/rng.hpp"

namespace startrail {

enum class PolicyKind { RA, PR, FR };

inline const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::RA: return "RA";
        case PolicyKind::PR: return "PR";
        case PolicyKind::FR: return "FR";
    }
    return "?";
}

// RA: uniform over blocks. PR: Pareto-ranked single blocks. FR: Pareto-ranked
// file groups, fetching every block of the chosen group.
struct AccessPolicy {
    PolicyKind kind = PolicyKind::RA;
    double pareto_alpha = 0.3;
};

struct Dataset {
    std::vector<Block> blocks;
    std::vector<std::vector<ContentId>> groups;  // consecutive blocks; last may be partial
    std::vector<std::uint32_t> rank_permutation;  // rank r maps to blocks[perm[r-1]]
    std::int64_t block_size = 0;

    std::int64_t total_bytes() const {
        std::int64_t sum = 0;
        for (const auto& b : blocks) sum += static_cast<std::int64_t>(b.size());
        return sum;
    }
};

// Deterministic dataset: payload bytes, group layout and the rank permutation
// all derive from the seed alone.
inline Dataset build_dataset(std::int64_t block_count, std::int64_t block_size,
                             std::int64_t group_bytes, std::uint64_t seed) {
    if (block_count < 1 || block_size < 1 || group_bytes < 1) {
        throw std::invalid_argument("build_dataset: counts and sizes must be >= 1");
    }
    Dataset d;
    d.block_size = block_size;
    d.blocks.reserve(static_cast<std::size_t>(block_count));
    for (std::int64_t i = 0; i < block_count; ++i) {
        auto rng = make_stream(seed, "block-payload", static_cast<std::uint64_t>(i));
        Bytes payload(static_cast<std::size_t>(block_size));
        for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng() & 0xff);
        d.blocks.push_back(make_block(std::move(payload)));
    }

    std::int64_t per_group = (group_bytes + block_size - 1) / block_size;
    for (std::int64_t start = 0; start < block_count; start += per_group) {
        std::vector<ContentId> group;
        for (std::int64_t i = start; i < std::min(start + per_group, block_count); ++i) {
            group.push_back(d.blocks[static_cast<std::size_t>(i)].cid);
        }
        d.groups.push_back(std::move(group));
    }

    d.rank_permutation.resize(static_cast<std::size_t>(block_count));
    std::iota(d.rank_permutation.begin(), d.rank_permutation.end(), 0u);
    auto perm_rng = make_stream(seed, "rank-permutation");
    std::shuffle(d.rank_permutation.begin(), d.rank_permutation.end(), perm_rng);
    return d;
}

// Pareto rank draw: u in (0, 1], x = u^(-1/alpha), rank = min(floor(x), n).
// Small ranks soak up most of the mass; the clamp folds the far tail onto
// rank n.
inline std::int64_t pareto_rank(double u, double alpha, std::int64_t n) {
    if (u <= 0.0 || u > 1.0) throw std::invalid_argument("pareto_rank: u must be in (0, 1]");
    double x = std::pow(u, -1.0 / alpha);
    double floored = std::floor(x);
    if (floored >= static_cast<double>(n)) return n;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(floored));
}

// Draws the cids one application-level request asks for. RA and PR return a
// single block; FR returns a whole file group.
inline std::vector<ContentId> next_request(const AccessPolicy& policy, const Dataset& dataset,
                                           std::mt19937_64& rng) {
    if (dataset.blocks.empty()) throw std::invalid_argument("next_request: empty dataset");
    switch (policy.kind) {
        case PolicyKind::RA: {
            std::uniform_int_distribution<std::size_t> pick(0, dataset.blocks.size() - 1);
            return {dataset.blocks[pick(rng)].cid};
        }
        case PolicyKind::PR: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double u = 1.0 - unit(rng);  // (0, 1]
            std::int64_t n = static_cast<std::int64_t>(dataset.blocks.size());
            std::int64_t rank = pareto_rank(u, policy.pareto_alpha, n);
            std::uint32_t index = dataset.rank_permutation[static_cast<std::size_t>(rank - 1)];
            return {dataset.blocks[index].cid};
        }
        case PolicyKind::FR: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double u = 1.0 - unit(rng);
            std::int64_t n = static_cast<std::int64_t>(dataset.groups.size());
            std::int64_t rank = pareto_rank(u, policy.pareto_alpha, n);
            return dataset.groups[static_cast<std::size_t>(rank - 1)];
        }
    }
    throw std::logic_error("next_request: unknown policy");
}

}  // namespace startrail
