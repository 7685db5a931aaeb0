#include "chronocache/http_service.hpp"

#include <httplib.h>

#include <mutex>
#include <stdexcept>
#include <thread>

#include "chronocache/http_client.hpp"
#include "chronocache/log.hpp"
#include "chronocache/wire.hpp"

namespace chronocache {

namespace {

constexpr const char* kJson = "application/json";

void reply_error(httplib::Response& res, const Error& err) {
    res.status = wire::http_status_for(err.code);
    res.set_content(wire::encode_error(err), kJson);
}

void reply_validation(httplib::Response& res, const std::string& message) {
    reply_error(res, Error{ErrorCode::validation, message, std::nullopt});
}

// Runs a handler that may throw contract violations and maps them to 400s.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const std::out_of_range& e) {
        reply_validation(res, e.what());
    } catch (const std::invalid_argument& e) {
        reply_validation(res, e.what());
    } catch (const std::exception& e) {
        log::error("handler failure: %s", e.what());
        res.status = 500;
        res.set_content(wire::encode_error(Error{ErrorCode::upstream_error,
                                                 "internal error", std::nullopt}),
                        kJson);
    }
}

struct ServerRunner {
    httplib::Server server;
    std::thread thread;
    int port = -1;

    int start(const std::string& host, int port_hint) {
        if (port_hint > 0) {
            if (!server.bind_to_port(host, port_hint))
                throw std::runtime_error("cannot bind " + host + ":" +
                                         std::to_string(port_hint));
            port = port_hint;
        } else {
            port = server.bind_to_any_port(host);
            if (port <= 0)
                throw std::runtime_error("cannot bind " + host);
        }
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
        return port;
    }

    void stop() {
        if (thread.joinable()) {
            server.stop();
            thread.join();
        }
    }

    ~ServerRunner() { stop(); }
};

} // namespace

struct ProviderService::Impl {
    explicit Impl(Provider& provider) : provider(provider) { route(); }

    void route() {
        runner.server.Post("/v1/keys", [this](const httplib::Request& req,
                                              httplib::Response& res) {
            guarded(res, [&] {
                auto msg = wire::decode_keys_request(req.body);
                if (!msg.ok())
                    return reply_error(res, msg.error());
                wire::KeysResponse out;
                out.m = provider.params().m;
                out.t = msg.value().t;
                for (const auto& [node, key] :
                     provider.send_key(msg.value().user_id, msg.value().t))
                    out.keys.push_back({node, key});
                res.set_content(wire::encode(out), kJson);
            });
        });

        runner.server.Post("/v1/content-request",
                           [this](const httplib::Request& req,
                                  httplib::Response& res) {
            guarded(res, [&] {
                auto msg = wire::decode_content_request(req.body);
                if (!msg.ok())
                    return reply_error(res, msg.error());
                auto tag = provider.handle_content_request(msg.value().c_name,
                                                           msg.value().node);
                if (!tag.ok())
                    return reply_error(res, tag.error());
                res.set_content(wire::encode(wire::TagResponse{tag.value()}),
                                kJson);
            });
        });

        runner.server.Post("/v1/cache-request",
                           [this](const httplib::Request& req,
                                  httplib::Response& res) {
            guarded(res, [&] {
                auto msg = wire::decode_cache_request(req.body);
                if (!msg.ok())
                    return reply_error(res, msg.error());
                auto ct = provider.handle_cache_request(msg.value().tag);
                if (!ct.ok())
                    return reply_error(res, ct.error());
                res.set_content(
                    wire::encode(wire::CiphertextResponse{ct.take()}), kJson);
            });
        });

        runner.server.Post("/v1/admin/advance",
                           [this](const httplib::Request& req,
                                  httplib::Response& res) {
            guarded(res, [&] {
                auto msg = wire::decode_advance_request(req.body);
                if (!msg.ok())
                    return reply_error(res, msg.error());
                provider.advance_period(msg.value().t);
                res.set_content(wire::encode(wire::AdvanceResponse{
                                    provider.current_period()}),
                                kJson);
            });
        });

        runner.server.Get("/v1/admin/table-stats",
                          [this](const httplib::Request&,
                                 httplib::Response& res) {
            guarded(res, [&] {
                res.set_content(
                    wire::encode(wire::TableStats{provider.total_entries(),
                                                  provider.current_period()}),
                    kJson);
            });
        });
    }

    Provider& provider;
    ServerRunner runner;
};

ProviderService::ProviderService(Provider& provider)
    : impl_(std::make_unique<Impl>(provider)) {}
ProviderService::~ProviderService() = default;

int ProviderService::start(const std::string& host, int port) {
    const int bound = impl_->runner.start(host, port);
    log::info("provider listening on %s:%d", host.c_str(), bound);
    return bound;
}

void ProviderService::stop() { impl_->runner.stop(); }

struct CacheService::Impl {
    Impl(CacheServer& cache, const std::string& upstream_addr)
        : cache(cache), upstream(upstream_addr) {
        route();
    }

    // httplib clients only support one in-flight request per instance, so
    // upstream fetches from concurrent handler threads are serialized here.
    // Single-flight in CacheServer already collapses same-tag misses.
    Result<Bytes> fetch_upstream(const crypto::Tag& tag) {
        std::lock_guard<std::mutex> lock(upstream_mu);
        return upstream.cache_request(tag);
    }

    void route() {
        runner.server.Post("/v1/content", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
            guarded(res, [&] {
                auto msg = wire::decode_content_fetch(req.body);
                if (!msg.ok())
                    return reply_error(res, msg.error());
                auto served = cache.send_content(
                    msg.value().tag, [this](const crypto::Tag& tag) {
                        return fetch_upstream(tag);
                    });
                if (!served.ok())
                    return reply_error(res, served.error());
                res.set_content(
                    wire::encode(wire::ContentResponse{
                        std::move(served.value().ciphertext),
                        served.value().hit}),
                    kJson);
            });
        });

        runner.server.Get("/v1/stats", [this](const httplib::Request&,
                                              httplib::Response& res) {
            guarded(res, [&] {
                const CacheStats s = cache.stats_snapshot();
                res.set_content(
                    wire::encode(wire::StatsResponse{s.hits, s.misses,
                                                     s.hit_ratio(),
                                                     s.upstream_bytes}),
                    kJson);
            });
        });

        runner.server.Post("/v1/admin/reset-stats",
                           [this](const httplib::Request&,
                                  httplib::Response& res) {
            guarded(res, [&] {
                cache.reset_stats();
                res.set_content("{}", kJson);
            });
        });
    }

    CacheServer& cache;
    HttpSpClient upstream;
    std::mutex upstream_mu;
    ServerRunner runner;
};

CacheService::CacheService(CacheServer& cache, const std::string& upstream_addr)
    : impl_(std::make_unique<Impl>(cache, upstream_addr)) {}
CacheService::~CacheService() = default;

int CacheService::start(const std::string& host, int port) {
    const int bound = impl_->runner.start(host, port);
    log::info("cache server listening on %s:%d", host.c_str(), bound);
    return bound;
}

void CacheService::stop() { impl_->runner.stop(); }

} // namespace chronocache
