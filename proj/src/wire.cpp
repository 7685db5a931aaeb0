#include "chronocache/wire.hpp"

#include <json.hpp>

#include "chronocache/encoding.hpp"

namespace chronocache::wire {

namespace {

using nlohmann::json;

Error validation(std::string message) {
    return Error{ErrorCode::validation, std::move(message), std::nullopt};
}

// json::parse with exceptions disabled; discarded value on bad input.
json parse(std::string_view text) {
    return json::parse(text, nullptr, false);
}

bool get_u32(const json& obj, const char* field, std::uint32_t& out) {
    const auto it = obj.find(field);
    if (it == obj.end() || !it->is_number_unsigned())
        return false;
    const auto v = it->get<std::uint64_t>();
    if (v > 0xffffffffull)
        return false;
    out = static_cast<std::uint32_t>(v);
    return true;
}

bool get_u64(const json& obj, const char* field, std::uint64_t& out) {
    const auto it = obj.find(field);
    if (it == obj.end() || !it->is_number_unsigned())
        return false;
    out = it->get<std::uint64_t>();
    return true;
}

bool get_string(const json& obj, const char* field, std::string& out) {
    const auto it = obj.find(field);
    if (it == obj.end() || !it->is_string())
        return false;
    out = it->get<std::string>();
    return true;
}

bool get_tag(const json& obj, const char* field, crypto::Tag& out) {
    std::string hex;
    if (!get_string(obj, field, hex))
        return false;
    const auto tag = crypto::Tag::from_hex(hex);
    if (!tag)
        return false;
    out = *tag;
    return true;
}

bool get_bytes(const json& obj, const char* field, Bytes& out) {
    std::string b64;
    if (!get_string(obj, field, b64))
        return false;
    auto raw = enc::b64url_decode(b64);
    if (!raw)
        return false;
    out = std::move(*raw);
    return true;
}

} // namespace

std::string encode(const KeysRequest& msg) {
    return json{{"user_id", msg.user_id}, {"t", msg.t}}.dump();
}

std::string encode(const KeysResponse& msg) {
    json keys = json::array();
    for (const auto& entry : msg.keys)
        keys.push_back({{"node", entry.node},
                        {"key", enc::b64url_encode(entry.key.bytes)}});
    return json{{"m", msg.m}, {"t", msg.t}, {"keys", std::move(keys)}}.dump();
}

std::string encode(const ContentRequest& msg) {
    return json{{"c_name", msg.c_name}, {"node", msg.node}}.dump();
}

std::string encode(const TagResponse& msg) {
    return json{{"tag", msg.tag.hex()}}.dump();
}

std::string encode(const CacheRequest& msg) {
    return json{{"tag", msg.tag.hex()}}.dump();
}

std::string encode(const CiphertextResponse& msg) {
    return json{{"ciphertext", enc::b64url_encode(msg.ciphertext)}}.dump();
}

std::string encode(const ContentFetch& msg) {
    return json{{"tag", msg.tag.hex()}}.dump();
}

std::string encode(const ContentResponse& msg) {
    return json{{"ciphertext", enc::b64url_encode(msg.ciphertext)},
                {"hit", msg.hit}}.dump();
}

std::string encode(const StatsResponse& msg) {
    return json{{"hits", msg.hits},
                {"misses", msg.misses},
                {"hit_ratio", msg.hit_ratio},
                {"upstream_bytes", msg.upstream_bytes}}.dump();
}

std::string encode(const AdvanceRequest& msg) {
    return json{{"t", msg.t}}.dump();
}

std::string encode(const AdvanceResponse& msg) {
    return json{{"t_curr", msg.t_curr}}.dump();
}

std::string encode(const TableStats& msg) {
    return json{{"entries", msg.entries}, {"t_curr", msg.t_curr}}.dump();
}

Result<KeysRequest> decode_keys_request(std::string_view text) {
    const json obj = parse(text);
    KeysRequest msg;
    if (!obj.is_object() || !get_string(obj, "user_id", msg.user_id))
        return validation("keys request: bad user_id");
    if (!get_u32(obj, "t", msg.t) || msg.t < 1)
        return validation("keys request: bad t");
    return msg;
}

Result<KeysResponse> decode_keys_response(std::string_view text) {
    const json obj = parse(text);
    KeysResponse msg;
    if (!obj.is_object() || !get_u32(obj, "m", msg.m) ||
        !get_u32(obj, "t", msg.t) || msg.t < 1)
        return validation("keys response: bad header");
    const auto it = obj.find("keys");
    if (it == obj.end() || !it->is_array())
        return validation("keys response: bad keys");
    for (const auto& item : *it) {
        NodeKeyEntry entry;
        if (!item.is_object() || !get_u32(item, "node", entry.node) ||
            entry.node < 1)
            return validation("keys response: bad node");
        Bytes raw;
        if (!get_bytes(item, "key", raw) || raw.size() != crypto::kKeyBytes)
            return validation("keys response: bad key material");
        std::copy(raw.begin(), raw.end(), entry.key.bytes.begin());
        msg.keys.push_back(entry);
    }
    return msg;
}

Result<ContentRequest> decode_content_request(std::string_view text) {
    const json obj = parse(text);
    ContentRequest msg;
    if (!obj.is_object() || !get_string(obj, "c_name", msg.c_name) ||
        msg.c_name.empty())
        return validation("content request: bad c_name");
    if (!get_u32(obj, "node", msg.node) || msg.node < 1)
        return validation("content request: bad node");
    return msg;
}

Result<TagResponse> decode_tag_response(std::string_view text) {
    const json obj = parse(text);
    TagResponse msg;
    if (!obj.is_object() || !get_tag(obj, "tag", msg.tag))
        return validation("tag response: bad tag");
    return msg;
}

Result<CacheRequest> decode_cache_request(std::string_view text) {
    const json obj = parse(text);
    CacheRequest msg;
    if (!obj.is_object() || !get_tag(obj, "tag", msg.tag))
        return validation("cache request: bad tag");
    return msg;
}

Result<CiphertextResponse> decode_ciphertext_response(std::string_view text) {
    const json obj = parse(text);
    CiphertextResponse msg;
    if (!obj.is_object() || !get_bytes(obj, "ciphertext", msg.ciphertext))
        return validation("ciphertext response: bad ciphertext");
    return msg;
}

Result<ContentFetch> decode_content_fetch(std::string_view text) {
    const json obj = parse(text);
    ContentFetch msg;
    if (!obj.is_object() || !get_tag(obj, "tag", msg.tag))
        return validation("content fetch: bad tag");
    return msg;
}

Result<ContentResponse> decode_content_response(std::string_view text) {
    const json obj = parse(text);
    ContentResponse msg;
    if (!obj.is_object() || !get_bytes(obj, "ciphertext", msg.ciphertext))
        return validation("content response: bad ciphertext");
    const auto it = obj.find("hit");
    if (it == obj.end() || !it->is_boolean())
        return validation("content response: bad hit");
    msg.hit = it->get<bool>();
    return msg;
}

Result<StatsResponse> decode_stats_response(std::string_view text) {
    const json obj = parse(text);
    StatsResponse msg;
    if (!obj.is_object() || !get_u64(obj, "hits", msg.hits) ||
        !get_u64(obj, "misses", msg.misses) ||
        !get_u64(obj, "upstream_bytes", msg.upstream_bytes))
        return validation("stats response: bad counters");
    const auto it = obj.find("hit_ratio");
    if (it == obj.end() || !it->is_number())
        return validation("stats response: bad hit_ratio");
    msg.hit_ratio = it->get<double>();
    return msg;
}

Result<AdvanceRequest> decode_advance_request(std::string_view text) {
    const json obj = parse(text);
    AdvanceRequest msg;
    if (!obj.is_object() || !get_u32(obj, "t", msg.t) || msg.t < 1)
        return validation("advance request: bad t");
    return msg;
}

Result<AdvanceResponse> decode_advance_response(std::string_view text) {
    const json obj = parse(text);
    AdvanceResponse msg;
    if (!obj.is_object() || !get_u32(obj, "t_curr", msg.t_curr) || msg.t_curr < 1)
        return validation("advance response: bad t_curr");
    return msg;
}

Result<TableStats> decode_table_stats(std::string_view text) {
    const json obj = parse(text);
    TableStats msg;
    if (!obj.is_object() || !get_u64(obj, "entries", msg.entries) ||
        !get_u32(obj, "t_curr", msg.t_curr))
        return validation("table stats: bad fields");
    return msg;
}

std::string encode_error(const Error& err) {
    json obj{{"error", to_string(err.code)}};
    if (err.t_curr)
        obj["t_curr"] = *err.t_curr;
    return obj.dump();
}

Error decode_error(std::string_view text) {
    Error err{ErrorCode::upstream_error, "unparseable error body", std::nullopt};
    const json obj = parse(text);
    if (!obj.is_object())
        return err;
    std::string name;
    if (!get_string(obj, "error", name))
        return err;
    for (ErrorCode code : {ErrorCode::not_found, ErrorCode::no_entry,
                           ErrorCode::upstream_error, ErrorCode::validation}) {
        if (name == to_string(code)) {
            err.code = code;
            err.message = name;
            break;
        }
    }
    std::uint32_t t_curr = 0;
    if (get_u32(obj, "t_curr", t_curr) && t_curr >= 1)
        err.t_curr = t_curr;
    return err;
}

int http_status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found:
    case ErrorCode::no_entry:
        return 404;
    case ErrorCode::validation:
        return 400;
    default:
        return 502;
    }
}

} // namespace chronocache::wire
