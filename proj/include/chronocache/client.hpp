#pragma once

#include <map>
#include <string_view>

#include "chronocache/api.hpp"
#include "chronocache/crypto.hpp"
#include "chronocache/time_tree.hpp"
#include "chronocache/types.hpp"

namespace chronocache {

// A user's path keys plus the leaf their access rights expire at. The key
// domain is exactly Path(t_user): m+1 nodes, leaf to root.
struct KeyRing {
    tree::TreeParams params{1};
    TimePeriod t_user = 1;
    std::map<NodeId, crypto::ContentKey> keys;
};

KeyRing ring_from_keys_response(const wire::KeysResponse& resp);

bool verify_ring(const KeyRing& ring);

// Full fetch flow: pick the unique cover node on our path, ask the SP for
// the tag, pull the ciphertext through the cache server, decrypt.
//
// REVOKED aborts locally before any message is sent. An SP NO_ENTRY whose
// body names a newer period triggers one retry against that period;
// anything else stale maps to STALE_PERIOD.
Result<Bytes> request_content(const KeyRing& ring, std::string_view c_name,
                              TimePeriod t_curr, SpApi& sp, CsApi& cs,
                              crypto::NonceBits nb = crypto::NonceBits::n128);

} // namespace chronocache
