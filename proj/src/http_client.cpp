#include "chronocache/http_client.hpp"

#include <httplib.h>

#include "chronocache/log.hpp"

namespace chronocache {

namespace {

constexpr const char* kJson = "application/json";

// httplib wants scheme://host:port; we accept bare host:port everywhere.
std::string with_scheme(const std::string& addr) {
    if (addr.rfind("http://", 0) == 0 || addr.rfind("https://", 0) == 0)
        return addr;
    return "http://" + addr;
}

Error transport_error(const httplib::Result& res) {
    return Error{ErrorCode::upstream_error,
                 "transport: " + httplib::to_string(res.error()), std::nullopt};
}

// POST and map the response: 2xx bodies decode as T, anything else decodes
// as a wire error body.
template <typename T, typename Decode>
Result<T> post_json(httplib::Client& cli, const char* path,
                    const std::string& body, Decode decode) {
    httplib::Result res = cli.Post(path, body, kJson);
    if (!res)
        return transport_error(res);
    if (res->status / 100 != 2)
        return wire::decode_error(res->body);
    return decode(res->body);
}

} // namespace

struct HttpSpClient::Impl {
    explicit Impl(const std::string& addr) : cli(with_scheme(addr)) {
        cli.set_keep_alive(true);
    }
    httplib::Client cli;
};

HttpSpClient::HttpSpClient(const std::string& addr)
    : impl_(std::make_unique<Impl>(addr)) {}
HttpSpClient::~HttpSpClient() = default;

Result<wire::KeysResponse> HttpSpClient::keys(const wire::KeysRequest& req) {
    return post_json<wire::KeysResponse>(
        impl_->cli, "/v1/keys", wire::encode(req),
        [](const std::string& body) { return wire::decode_keys_response(body); });
}

Result<crypto::Tag> HttpSpClient::content_request(std::string_view c_name,
                                                  NodeId node) {
    auto resp = post_json<wire::TagResponse>(
        impl_->cli, "/v1/content-request",
        wire::encode(wire::ContentRequest{std::string(c_name), node}),
        [](const std::string& body) { return wire::decode_tag_response(body); });
    if (!resp.ok())
        return resp.error();
    return resp.value().tag;
}

Result<Bytes> HttpSpClient::cache_request(const crypto::Tag& tag) {
    auto resp = post_json<wire::CiphertextResponse>(
        impl_->cli, "/v1/cache-request", wire::encode(wire::CacheRequest{tag}),
        [](const std::string& body) {
            return wire::decode_ciphertext_response(body);
        });
    if (!resp.ok())
        return resp.error();
    return std::move(resp.value().ciphertext);
}

Result<TimePeriod> HttpSpClient::advance(TimePeriod t) {
    auto resp = post_json<wire::AdvanceResponse>(
        impl_->cli, "/v1/admin/advance", wire::encode(wire::AdvanceRequest{t}),
        [](const std::string& body) { return wire::decode_advance_response(body); });
    if (!resp.ok())
        return resp.error();
    return resp.value().t_curr;
}

Result<wire::TableStats> HttpSpClient::table_stats() {
    httplib::Result res = impl_->cli.Get("/v1/admin/table-stats");
    if (!res)
        return transport_error(res);
    if (res->status / 100 != 2)
        return wire::decode_error(res->body);
    return wire::decode_table_stats(res->body);
}

struct HttpCsClient::Impl {
    explicit Impl(const std::string& addr) : cli(with_scheme(addr)) {
        cli.set_keep_alive(true);
    }
    httplib::Client cli;
};

HttpCsClient::HttpCsClient(const std::string& addr)
    : impl_(std::make_unique<Impl>(addr)) {}
HttpCsClient::~HttpCsClient() = default;

Result<CacheServer::Served> HttpCsClient::content(const crypto::Tag& tag) {
    auto resp = post_json<wire::ContentResponse>(
        impl_->cli, "/v1/content", wire::encode(wire::ContentFetch{tag}),
        [](const std::string& body) { return wire::decode_content_response(body); });
    if (!resp.ok())
        return resp.error();
    return CacheServer::Served{std::move(resp.value().ciphertext),
                               resp.value().hit};
}

Result<wire::StatsResponse> HttpCsClient::stats() {
    httplib::Result res = impl_->cli.Get("/v1/stats");
    if (!res)
        return transport_error(res);
    if (res->status / 100 != 2)
        return wire::decode_error(res->body);
    return wire::decode_stats_response(res->body);
}

VoidResult HttpCsClient::reset_stats() {
    httplib::Result res = impl_->cli.Post("/v1/admin/reset-stats", "{}", kJson);
    if (!res)
        return transport_error(res);
    if (res->status / 100 != 2)
        return wire::decode_error(res->body);
    return Unit{};
}

} // namespace chronocache
