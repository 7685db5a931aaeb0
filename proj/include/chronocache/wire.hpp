#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chronocache/crypto.hpp"
#include "chronocache/types.hpp"

// HTTP/JSON message surface shared by the provider, the cache server and
// clients. Byte strings ride as base64url without padding, tags as 64
// lowercase hex chars. Decoders ignore unknown fields and answer
// VALIDATION for anything malformed.
namespace chronocache::wire {

struct KeysRequest {
    std::string user_id;
    TimePeriod t = 0;
    bool operator==(const KeysRequest&) const = default;
};

struct NodeKeyEntry {
    NodeId node = 0;
    crypto::ContentKey key;
    bool operator==(const NodeKeyEntry&) const = default;
};

struct KeysResponse {
    std::uint32_t m = 0;
    TimePeriod t = 0;
    std::vector<NodeKeyEntry> keys; // leaf to root
    bool operator==(const KeysResponse&) const = default;
};

struct ContentRequest {
    std::string c_name;
    NodeId node = 0;
    bool operator==(const ContentRequest&) const = default;
};

struct TagResponse {
    crypto::Tag tag;
    bool operator==(const TagResponse&) const = default;
};

struct CacheRequest {
    crypto::Tag tag;
    bool operator==(const CacheRequest&) const = default;
};

struct CiphertextResponse {
    Bytes ciphertext;
    bool operator==(const CiphertextResponse&) const = default;
};

// Client -> cache server. Deliberately carries nothing but the tag.
struct ContentFetch {
    crypto::Tag tag;
    bool operator==(const ContentFetch&) const = default;
};

struct ContentResponse {
    Bytes ciphertext;
    bool hit = false;
    bool operator==(const ContentResponse&) const = default;
};

struct StatsResponse {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    double hit_ratio = 0.0;
    std::uint64_t upstream_bytes = 0;
    bool operator==(const StatsResponse&) const = default;
};

struct AdvanceRequest {
    TimePeriod t = 0;
    bool operator==(const AdvanceRequest&) const = default;
};

struct AdvanceResponse {
    TimePeriod t_curr = 0;
    bool operator==(const AdvanceResponse&) const = default;
};

struct TableStats {
    std::uint64_t entries = 0;
    TimePeriod t_curr = 0;
    bool operator==(const TableStats&) const = default;
};

std::string encode(const KeysRequest&);
std::string encode(const KeysResponse&);
std::string encode(const ContentRequest&);
std::string encode(const TagResponse&);
std::string encode(const CacheRequest&);
std::string encode(const CiphertextResponse&);
std::string encode(const ContentFetch&);
std::string encode(const ContentResponse&);
std::string encode(const StatsResponse&);
std::string encode(const AdvanceRequest&);
std::string encode(const AdvanceResponse&);
std::string encode(const TableStats&);

Result<KeysRequest> decode_keys_request(std::string_view json_text);
Result<KeysResponse> decode_keys_response(std::string_view json_text);
Result<ContentRequest> decode_content_request(std::string_view json_text);
Result<TagResponse> decode_tag_response(std::string_view json_text);
Result<CacheRequest> decode_cache_request(std::string_view json_text);
Result<CiphertextResponse> decode_ciphertext_response(std::string_view json_text);
Result<ContentFetch> decode_content_fetch(std::string_view json_text);
Result<ContentResponse> decode_content_response(std::string_view json_text);
Result<StatsResponse> decode_stats_response(std::string_view json_text);
Result<AdvanceRequest> decode_advance_request(std::string_view json_text);
Result<AdvanceResponse> decode_advance_response(std::string_view json_text);
Result<TableStats> decode_table_stats(std::string_view json_text);

// Error bodies: {"error": "<CODE>"} plus "t_curr" on NO_ENTRY. Only
// NOT_FOUND, NO_ENTRY, UPSTREAM_ERROR and VALIDATION ever cross the wire;
// REVOKED and STALE_PERIOD are client-local outcomes.
std::string encode_error(const Error& err);
Error decode_error(std::string_view json_text); // best effort, never throws

int http_status_for(ErrorCode code);

} // namespace chronocache::wire
