#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chronocache/types.hpp"

namespace chronocache::tree {

// Complete binary tree over 2^m leaves, one leaf per time period.
// Node ids are 1..2^{m+1}-1; period t lives at leaf 2^m + t - 1.
struct TreeParams {
    std::uint32_t m;

    explicit TreeParams(std::uint32_t depth_exponent);

    TimePeriod t_max() const { return TimePeriod{1} << m; }
    NodeId node_count() const { return (NodeId{1} << (m + 1)) - 1; }
    NodeId first_leaf() const { return NodeId{1} << m; }
    NodeId leaf_of(TimePeriod t) const;

    bool valid_period(TimePeriod t) const { return t >= 1 && t <= t_max(); }
    bool valid_node(NodeId n) const { return n >= 1 && n <= node_count(); }
};

// Disjoint subtree roots whose leaves are exactly the non-revoked periods.
struct CoverSet {
    std::vector<NodeId> nodes; // sorted ascending

    bool contains(NodeId n) const;
    std::size_t size() const { return nodes.size(); }
    bool operator==(const CoverSet&) const = default;
};

// Nodes from the period's leaf up to the root, leaf first, m+1 entries.
std::vector<NodeId> path(const TreeParams& params, TimePeriod t);

// CompSubTree over an arbitrary revoked-leaf set, steps as in the
// subset-cover method: X = union of revoked paths, Y = children hanging
// off X, root alone when nothing is revoked.
CoverSet comp_subtree_rset(const TreeParams& params,
                           std::span<const TimePeriod> revoked_periods);

// Prefix revocation of periods [1, r]; the only pattern the protocol uses.
// r = 0 covers everyone ({root}), r = t_max covers no one (empty set).
CoverSet comp_subtree(const TreeParams& params, std::uint32_t r);

// The unique cover node on the user's path at the current period, or
// nothing once the user's period has passed.
std::optional<NodeId> eligible_node(const TreeParams& params,
                                    TimePeriod t_user, TimePeriod t_curr);

} // namespace chronocache::tree
