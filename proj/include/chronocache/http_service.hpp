#pragma once

#include <memory>
#include <string>

#include "chronocache/cache_server.hpp"
#include "chronocache/provider.hpp"

namespace chronocache {

// HTTP frontends. start() binds and serves on a background thread and
// returns the bound port (useful with port 0 in tests); stop() joins.

class ProviderService {
public:
    explicit ProviderService(Provider& provider);
    ~ProviderService();

    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class CacheService {
public:
    // upstream_addr is the provider's "host:port"
    CacheService(CacheServer& cache, const std::string& upstream_addr);
    ~CacheService();

    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace chronocache
