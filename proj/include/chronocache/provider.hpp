#pragma once

#include <cstdint>
#include <functional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chronocache/crypto.hpp"
#include "chronocache/time_tree.hpp"
#include "chronocache/types.hpp"

namespace chronocache {

// Service provider: content catalog plus the ConTbl memo of per-node
// (tag, ciphertext) entries. Entries are materialized lazily on the first
// request for a (content, node) pair and kept for later periods; tags are
// period-independent so nodes that reappear in a later cover stay valid.
class Provider {
public:
    struct ContentInput {
        std::string c_name;
        Bytes content;
        TimePeriod t = 1; // release period, entries go under cover(t-1)
    };

    Provider(tree::TreeParams params, crypto::NodeKeySet keys,
             crypto::MacKey mac_key,
             crypto::NonceBits nonce_bits = crypto::NonceBits::n128);

    const tree::TreeParams& params() const { return params_; }
    crypto::NonceBits nonce_bits() const { return nonce_bits_; }
    const crypto::NodeKeySet& keyset() const { return keys_; }

    // Catalog registration without encryption; entries appear on demand.
    void register_content(std::string c_name, Bytes content);

    // Eager table generation: encrypt each content under every node of its
    // release-period cover. Throws std::invalid_argument on duplicates.
    void gen_table(std::vector<ContentInput> contents);

    // Path keys for the user's leaf, ordered leaf to root. user_id only
    // exists on this bootstrap surface; content requests never carry it.
    std::vector<std::pair<NodeId, crypto::ContentKey>>
    send_key(std::string_view user_id, TimePeriod t) const;

    // Returns the tag for (c_name, node), creating the entry if the node
    // belongs to the current cover. NO_ENTRY errors carry t_curr so a
    // stale client can resync.
    Result<crypto::Tag> handle_content_request(std::string_view c_name,
                                               NodeId node);

    Result<Bytes> handle_cache_request(const crypto::Tag& tag);

    // t_curr is provider-owned and never decreases.
    void advance_period(TimePeriod t_new);
    TimePeriod current_period() const;

    std::size_t total_entries() const;
    std::size_t content_count() const;

    // Introspection for audits: (c_name, node, tag, ciphertext) walk and
    // per-content entry counts.
    void for_each_entry(
        const std::function<void(const std::string&, NodeId, const crypto::Tag&,
                                 const Bytes&)>& fn) const;
    std::vector<std::pair<std::string, std::size_t>> entry_counts() const;

private:
    struct Entry {
        crypto::Tag tag;
        Bytes ciphertext;
    };
    struct ContentRecord {
        Bytes content;
        std::unordered_map<NodeId, Entry> entries;
    };

    // caller holds mu_ exclusively
    const Entry& materialize_locked(const std::string& c_name,
                                    ContentRecord& record, NodeId node);
    void set_period_locked(TimePeriod t);

    tree::TreeParams params_;
    crypto::NodeKeySet keys_;
    crypto::MacKey mac_key_;
    crypto::NonceBits nonce_bits_;

    mutable std::shared_mutex mu_;
    TimePeriod t_curr_ = 1;
    tree::CoverSet current_cover_;
    std::unordered_map<std::string, ContentRecord> by_name_;
    std::unordered_map<crypto::Tag, std::pair<std::string, NodeId>,
                       crypto::TagHash>
        by_tag_;
    std::size_t entry_count_ = 0;
};

} // namespace chronocache
