#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "chronocache/encoding.hpp"
#include "chronocache/wire.hpp"

using namespace chronocache;
using namespace chronocache::wire;

namespace {

crypto::Tag iota_tag() {
    crypto::Tag t;
    for (std::size_t i = 0; i < t.bytes.size(); ++i)
        t.bytes[i] = static_cast<std::uint8_t>(i);
    return t;
}

constexpr const char* kIotaTagHex =
    "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

} // namespace

TEST_CASE("hex and base64url codecs") {
    CHECK(enc::hex_encode(Bytes{0xde, 0xad, 0xbe, 0xef}) == "deadbeef");
    CHECK(enc::hex_decode("deadbeef") == Bytes{0xde, 0xad, 0xbe, 0xef});
    CHECK(!enc::hex_decode("DEADBEEF").has_value()); // uppercase rejected
    CHECK(!enc::hex_decode("abc").has_value());
    CHECK(!enc::hex_decode("zz").has_value());

    CHECK(enc::b64url_encode(Bytes{0xde, 0xad, 0xbe, 0xef}) == "3q2-7w");
    CHECK(enc::b64url_decode("3q2-7w") == Bytes{0xde, 0xad, 0xbe, 0xef});
    CHECK(enc::b64url_decode("") == Bytes{});
    CHECK(!enc::b64url_decode("3q2-7w==").has_value()); // no padding allowed
    CHECK(!enc::b64url_decode("a").has_value());
    CHECK(!enc::b64url_decode("a+/c").has_value()); // standard alphabet rejected
    CHECK(!enc::b64url_decode("3q2-7x").has_value()); // non-canonical trailer

    // round trip across lengths 0..64
    Bytes data;
    for (std::size_t n = 0; n <= 64; ++n) {
        CHECK(enc::b64url_decode(enc::b64url_encode(data)) == data);
        data.push_back(static_cast<std::uint8_t>(n * 37 + 5));
    }
}

TEST_CASE("golden message forms") {
    CHECK(encode(KeysRequest{"u1", 2}) == R"({"t":2,"user_id":"u1"})");

    KeysResponse keys;
    keys.m = 1;
    keys.t = 2;
    keys.keys.push_back({3, crypto::ContentKey{}});
    crypto::ContentKey ones;
    ones.bytes.fill(0x01);
    keys.keys.push_back({1, ones});
    CHECK(encode(keys) ==
          R"({"keys":[{"key":"AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA","node":3},)"
          R"({"key":"AQEBAQEBAQEBAQEBAQEBAQEBAQEBAQEBAQEBAQEBAQE","node":1}],"m":1,"t":2})");

    CHECK(encode(ContentRequest{"ep1", 9}) == R"({"c_name":"ep1","node":9})");
    CHECK(encode(TagResponse{iota_tag()}) ==
          std::string(R"({"tag":")") + kIotaTagHex + R"("})");
    CHECK(encode(CacheRequest{iota_tag()}) ==
          std::string(R"({"tag":")") + kIotaTagHex + R"("})");
    CHECK(encode(CiphertextResponse{Bytes{0xde, 0xad, 0xbe, 0xef}}) ==
          R"({"ciphertext":"3q2-7w"})");
    CHECK(encode(ContentFetch{iota_tag()}) ==
          std::string(R"({"tag":")") + kIotaTagHex + R"("})");
    CHECK(encode(ContentResponse{Bytes{0xde, 0xad, 0xbe, 0xef}, true}) ==
          R"({"ciphertext":"3q2-7w","hit":true})");
    CHECK(encode(StatsResponse{3, 1, 0.75, 1048576}) ==
          R"({"hit_ratio":0.75,"hits":3,"misses":1,"upstream_bytes":1048576})");
    CHECK(encode(AdvanceRequest{2}) == R"({"t":2})");
    CHECK(encode(AdvanceResponse{2}) == R"({"t_curr":2})");
    CHECK(encode(TableStats{5, 2}) == R"({"entries":5,"t_curr":2})");

    CHECK(encode_error(Error{ErrorCode::not_found, "x", std::nullopt}) ==
          R"({"error":"NOT_FOUND"})");
    CHECK(encode_error(Error{ErrorCode::no_entry, "x", 3}) ==
          R"({"error":"NO_ENTRY","t_curr":3})");
}

TEST_CASE("decode inverts encode") {
    const KeysRequest kr{"alice", 7};
    CHECK(decode_keys_request(encode(kr)).value() == kr);

    KeysResponse keys;
    keys.m = 2;
    keys.t = 3;
    crypto::ContentKey ck;
    ck.bytes.fill(0xab);
    keys.keys.push_back({10, ck});
    keys.keys.push_back({5, crypto::ContentKey{}});
    CHECK(decode_keys_response(encode(keys)).value() == keys);

    const ContentRequest cr{"name with spaces", 17};
    CHECK(decode_content_request(encode(cr)).value() == cr);
    CHECK(decode_tag_response(encode(TagResponse{iota_tag()})).value() ==
          TagResponse{iota_tag()});
    CHECK(decode_cache_request(encode(CacheRequest{iota_tag()})).value() ==
          CacheRequest{iota_tag()});
    const CiphertextResponse ct{Bytes{1, 2, 3}};
    CHECK(decode_ciphertext_response(encode(ct)).value() == ct);
    const ContentResponse resp{Bytes{9, 8}, false};
    CHECK(decode_content_response(encode(resp)).value() == resp);
    const StatsResponse st{10, 2, 10.0 / 12.0, 999};
    CHECK(decode_stats_response(encode(st)).value() == st);
    CHECK(decode_advance_request(encode(AdvanceRequest{4})).value() ==
          AdvanceRequest{4});
    CHECK(decode_advance_response(encode(AdvanceResponse{4})).value() ==
          AdvanceResponse{4});
    CHECK(decode_table_stats(encode(TableStats{123, 9})).value() ==
          TableStats{123, 9});
}

TEST_CASE("unknown fields are ignored, malformed fields rejected") {
    CHECK(decode_content_request(
              R"({"c_name":"a","node":1,"future_field":[1,2]})")
              .value() == ContentRequest{"a", 1});

    // node ids start at 1
    CHECK(decode_content_request(R"({"c_name":"a","node":0})").code() ==
          ErrorCode::validation);
    CHECK(decode_content_request(R"({"c_name":"a","node":-3})").code() ==
          ErrorCode::validation);
    CHECK(decode_content_request(R"({"c_name":"","node":1})").code() ==
          ErrorCode::validation);
    CHECK(decode_content_request("not json").code() == ErrorCode::validation);
    CHECK(decode_content_request("[1,2]").code() == ErrorCode::validation);

    // tags must be exactly 64 lowercase hex chars (32 bytes)
    const std::string short_tag(62, 'a');
    CHECK(decode_tag_response(R"({"tag":")" + short_tag + R"("})").code() ==
          ErrorCode::validation);
    const std::string upper_tag(64, 'A');
    CHECK(decode_tag_response(R"({"tag":")" + upper_tag + R"("})").code() ==
          ErrorCode::validation);

    CHECK(decode_keys_request(R"({"user_id":"u","t":0})").code() ==
          ErrorCode::validation);
    CHECK(decode_keys_request(R"({"user_id":"u","t":1.5})").code() ==
          ErrorCode::validation);
    CHECK(decode_keys_response(
              R"({"m":1,"t":1,"keys":[{"node":1,"key":"AAAA"}]})")
              .code() == ErrorCode::validation);
    CHECK(decode_content_response(R"({"ciphertext":"","hit":"yes"})").code() ==
          ErrorCode::validation);
    CHECK(decode_advance_request(R"({"t":"2"})").code() ==
          ErrorCode::validation);
}

TEST_CASE("client-facing request schemas carry no user identity") {
    using nlohmann::json;
    for (const std::string& body :
         {encode(ContentRequest{"ep1", 9}), encode(ContentFetch{iota_tag()}),
          encode(TagResponse{iota_tag()}),
          encode(ContentResponse{Bytes{1}, true})}) {
        const json obj = json::parse(body);
        CHECK(!obj.contains("user_id"));
        CHECK(!obj.contains("id"));
    }
}

TEST_CASE("error decoding and status mapping") {
    const Error e = decode_error(R"({"error":"NO_ENTRY","t_curr":5})");
    CHECK(e.code == ErrorCode::no_entry);
    CHECK(e.t_curr == TimePeriod{5});
    CHECK(decode_error(R"({"error":"NOT_FOUND"})").code ==
          ErrorCode::not_found);
    CHECK(decode_error("garbage").code == ErrorCode::upstream_error);
    // client-local outcomes are not part of the wire vocabulary
    CHECK(decode_error(R"({"error":"REVOKED"})").code ==
          ErrorCode::upstream_error);
    CHECK(decode_error(R"({"error":"STALE_PERIOD"})").code ==
          ErrorCode::upstream_error);

    CHECK(http_status_for(ErrorCode::not_found) == 404);
    CHECK(http_status_for(ErrorCode::no_entry) == 404);
    CHECK(http_status_for(ErrorCode::validation) == 400);
    CHECK(http_status_for(ErrorCode::upstream_error) == 502);
}
