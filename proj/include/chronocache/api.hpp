#pragma once

#include <string_view>

#include "chronocache/cache_server.hpp"
#include "chronocache/provider.hpp"
#include "chronocache/wire.hpp"

// Transport-neutral views of the two servers. The in-process adapters call
// straight into the state machines; the HTTP adapters in http_client.hpp
// speak the wire schemas. Client and simulator code only sees these.
namespace chronocache {

struct SpApi {
    virtual ~SpApi() = default;
    virtual Result<wire::KeysResponse> keys(const wire::KeysRequest&) = 0;
    virtual Result<crypto::Tag> content_request(std::string_view c_name,
                                                NodeId node) = 0;
    virtual Result<Bytes> cache_request(const crypto::Tag& tag) = 0;
    virtual Result<TimePeriod> advance(TimePeriod t) = 0;
    virtual Result<wire::TableStats> table_stats() = 0;
};

struct CsApi {
    virtual ~CsApi() = default;
    virtual Result<CacheServer::Served> content(const crypto::Tag& tag) = 0;
    virtual Result<wire::StatsResponse> stats() = 0;
    virtual VoidResult reset_stats() = 0;
};

class LocalSp final : public SpApi {
public:
    explicit LocalSp(Provider& provider) : provider_(provider) {}

    Result<wire::KeysResponse> keys(const wire::KeysRequest& req) override {
        wire::KeysResponse resp;
        resp.m = provider_.params().m;
        resp.t = req.t;
        for (const auto& [node, key] : provider_.send_key(req.user_id, req.t))
            resp.keys.push_back({node, key});
        return resp;
    }

    Result<crypto::Tag> content_request(std::string_view c_name,
                                        NodeId node) override {
        return provider_.handle_content_request(c_name, node);
    }

    Result<Bytes> cache_request(const crypto::Tag& tag) override {
        return provider_.handle_cache_request(tag);
    }

    Result<TimePeriod> advance(TimePeriod t) override {
        provider_.advance_period(t);
        return provider_.current_period();
    }

    Result<wire::TableStats> table_stats() override {
        return wire::TableStats{provider_.total_entries(),
                                provider_.current_period()};
    }

private:
    Provider& provider_;
};

class LocalCs final : public CsApi {
public:
    LocalCs(CacheServer& cache, SpApi& upstream)
        : cache_(cache), upstream_(upstream) {}

    Result<CacheServer::Served> content(const crypto::Tag& tag) override {
        return cache_.send_content(
            tag, [this](const crypto::Tag& t) { return upstream_.cache_request(t); });
    }

    Result<wire::StatsResponse> stats() override {
        const CacheStats s = cache_.stats_snapshot();
        return wire::StatsResponse{s.hits, s.misses, s.hit_ratio(),
                                   s.upstream_bytes};
    }

    VoidResult reset_stats() override {
        cache_.reset_stats();
        return Unit{};
    }

private:
    CacheServer& cache_;
    SpApi& upstream_;
};

} // namespace chronocache
