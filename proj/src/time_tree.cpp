#include "chronocache/time_tree.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace chronocache::tree {

TreeParams::TreeParams(std::uint32_t depth_exponent) : m(depth_exponent) {
    if (m < 1 || m > 30)
        throw std::out_of_range("tree depth exponent m must be in [1, 30]");
}

NodeId TreeParams::leaf_of(TimePeriod t) const {
    if (!valid_period(t))
        throw std::out_of_range("time period out of range");
    return first_leaf() + t - 1;
}

bool CoverSet::contains(NodeId n) const {
    return std::binary_search(nodes.begin(), nodes.end(), n);
}

std::vector<NodeId> path(const TreeParams& params, TimePeriod t) {
    std::vector<NodeId> nodes;
    nodes.reserve(params.m + 1);
    for (NodeId n = params.leaf_of(t); n >= 1; n >>= 1)
        nodes.push_back(n);
    return nodes;
}

CoverSet comp_subtree_rset(const TreeParams& params,
                           std::span<const TimePeriod> revoked_periods) {
    if (revoked_periods.empty())
        return CoverSet{{NodeId{1}}};

    // X = union of Path(i) over revoked leaves, as a mark array plus a
    // visit list so we can walk X without scanning the whole tree.
    std::vector<std::uint8_t> in_x(params.node_count() + 1, 0);
    std::vector<NodeId> x_nodes;
    x_nodes.reserve(revoked_periods.size() + params.m + 1);
    for (TimePeriod t : revoked_periods) {
        for (NodeId n = params.leaf_of(t); n >= 1; n >>= 1) {
            if (in_x[n])
                break; // ancestors already marked by an earlier leaf
            in_x[n] = 1;
            x_nodes.push_back(n);
        }
    }

    CoverSet cover;
    const NodeId first_leaf = params.first_leaf();
    for (NodeId x : x_nodes) {
        if (x >= first_leaf)
            continue;
        for (NodeId child : {2 * x, 2 * x + 1})
            if (!in_x[child])
                cover.nodes.push_back(child);
    }
    std::sort(cover.nodes.begin(), cover.nodes.end());
    return cover;
}

CoverSet comp_subtree(const TreeParams& params, std::uint32_t r) {
    if (r > params.t_max())
        throw std::out_of_range("revoked prefix out of range");
    std::vector<TimePeriod> revoked(r);
    for (std::uint32_t i = 0; i < r; ++i)
        revoked[i] = i + 1;
    return comp_subtree_rset(params, revoked);
}

std::optional<NodeId> eligible_node(const TreeParams& params,
                                    TimePeriod t_user, TimePeriod t_curr) {
    if (!params.valid_period(t_user) || !params.valid_period(t_curr))
        throw std::out_of_range("time period out of range");
    if (t_user < t_curr)
        return std::nullopt;

    const CoverSet cover = comp_subtree(params, t_curr - 1);
    std::optional<NodeId> found;
    for (NodeId n = params.leaf_of(t_user); n >= 1; n >>= 1) {
        if (cover.contains(n)) {
            assert(!found && "cover subtrees overlap a path twice");
            found = n;
        }
    }
    assert(found && "unexpired path must meet the cover");
    return found;
}

} // namespace chronocache::tree
