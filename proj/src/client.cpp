#include "chronocache/client.hpp"

#include <algorithm>

namespace chronocache {

namespace {

Result<Bytes> fetch_via(const KeyRing& ring, std::string_view c_name,
                        NodeId node, SpApi& sp, CsApi& cs,
                        crypto::NonceBits nb, Error* no_entry_out) {
    Result<crypto::Tag> tag = sp.content_request(c_name, node);
    if (!tag.ok()) {
        if (tag.code() == ErrorCode::no_entry && no_entry_out)
            *no_entry_out = tag.error();
        return tag.error();
    }

    Result<CacheServer::Served> served = cs.content(tag.value());
    if (!served.ok())
        return served.error();

    auto plaintext = crypto::decrypt(ring.keys.at(node), tag.value(),
                                     served.value().ciphertext, nb);
    if (!plaintext)
        return Result<Bytes>::failure(
            ErrorCode::decrypt_fail,
            "ciphertext does not verify under the path key");
    return std::move(*plaintext);
}

} // namespace

KeyRing ring_from_keys_response(const wire::KeysResponse& resp) {
    KeyRing ring{tree::TreeParams(resp.m), resp.t, {}};
    for (const auto& entry : resp.keys)
        ring.keys.emplace(entry.node, entry.key);
    return ring;
}

bool verify_ring(const KeyRing& ring) {
    if (!ring.params.valid_period(ring.t_user))
        return false;
    const auto expected = tree::path(ring.params, ring.t_user);
    if (ring.keys.size() != expected.size())
        return false;
    return std::all_of(expected.begin(), expected.end(),
                       [&](NodeId n) { return ring.keys.contains(n); });
}

Result<Bytes> request_content(const KeyRing& ring, std::string_view c_name,
                              TimePeriod t_curr, SpApi& sp, CsApi& cs,
                              crypto::NonceBits nb) {
    const auto node = tree::eligible_node(ring.params, ring.t_user, t_curr);
    if (!node)
        return Result<Bytes>::failure(ErrorCode::revoked,
                                      "access rights expired");

    Error no_entry{ErrorCode::validation, {}, std::nullopt};
    Result<Bytes> out = fetch_via(ring, c_name, *node, sp, cs, nb, &no_entry);
    if (out.ok() || out.code() != ErrorCode::no_entry)
        return out;

    // The SP is ahead of our notion of the current period. Recompute from
    // the period it reported and retry once.
    if (!no_entry.t_curr || *no_entry.t_curr <= t_curr)
        return Result<Bytes>::failure(ErrorCode::stale_period,
                                      "provider rejected node for period");
    const auto fresh = tree::eligible_node(ring.params, ring.t_user,
                                           *no_entry.t_curr);
    if (!fresh)
        return Result<Bytes>::failure(ErrorCode::revoked,
                                      "access rights expired");
    Result<Bytes> retry = fetch_via(ring, c_name, *fresh, sp, cs, nb, nullptr);
    if (!retry.ok() && retry.code() == ErrorCode::no_entry)
        return Result<Bytes>::failure(ErrorCode::stale_period,
                                      "provider advanced during retry");
    return retry;
}

} // namespace chronocache
