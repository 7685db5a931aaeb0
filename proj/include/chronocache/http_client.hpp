#pragma once

#include <memory>
#include <string>

#include "chronocache/api.hpp"

namespace chronocache {

// SpApi over HTTP/1.1 + JSON. addr is "host:port". Transport failures
// surface as UPSTREAM_ERROR; wire-level rejections keep their own codes.
class HttpSpClient final : public SpApi {
public:
    explicit HttpSpClient(const std::string& addr);
    ~HttpSpClient() override;

    Result<wire::KeysResponse> keys(const wire::KeysRequest&) override;
    Result<crypto::Tag> content_request(std::string_view c_name,
                                        NodeId node) override;
    Result<Bytes> cache_request(const crypto::Tag& tag) override;
    Result<TimePeriod> advance(TimePeriod t) override;
    Result<wire::TableStats> table_stats() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpCsClient final : public CsApi {
public:
    explicit HttpCsClient(const std::string& addr);
    ~HttpCsClient() override;

    Result<CacheServer::Served> content(const crypto::Tag& tag) override;
    Result<wire::StatsResponse> stats() override;
    VoidResult reset_stats() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace chronocache
