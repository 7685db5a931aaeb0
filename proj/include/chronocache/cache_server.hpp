#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <list>
#include <mutex>
#include <unordered_map>

#include "chronocache/crypto.hpp"
#include "chronocache/types.hpp"

namespace chronocache {

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t upstream_bytes = 0;
    std::uint64_t downstream_bytes = 0;

    double hit_ratio() const {
        const std::uint64_t total = hits + misses;
        return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
    }
};

// Tag-addressed LRU cache of ciphertexts. Knows nothing about contents
// or users: the only values it ever stores are AEAD ciphertexts keyed by
// pseudorandom tags.
class CacheServer {
public:
    struct Config {
        std::size_t capacity_entries = 0;
        // optional byte budget for unequal contents; 0 = entry counting
        std::size_t capacity_bytes = 0;
    };

    // Fetches a missing tag from the provider; NOT_FOUND for unknown tags,
    // UPSTREAM_ERROR when the provider is unreachable.
    using UpstreamFetch = std::function<Result<Bytes>(const crypto::Tag&)>;

    explicit CacheServer(Config config);

    struct Served {
        Bytes ciphertext;
        bool hit = false;
    };

    // Cache-or-fetch. Concurrent misses on one tag are collapsed into a
    // single upstream fetch; every caller still counts as the miss it saw.
    Result<Served> send_content(const crypto::Tag& tag,
                                const UpstreamFetch& upstream);

    CacheStats stats_snapshot() const;
    void reset_stats();

    std::size_t size() const;
    std::size_t stored_bytes() const;
    bool cached(const crypto::Tag& tag) const; // no recency touch

private:
    struct Slot {
        crypto::Tag tag;
        Bytes ciphertext;
    };
    using LruList = std::list<Slot>;

    void insert_locked(const crypto::Tag& tag, const Bytes& ciphertext);

    Config config_;
    mutable std::mutex mu_;
    LruList lru_; // front = most recently used
    std::unordered_map<crypto::Tag, LruList::iterator, crypto::TagHash> index_;
    std::unordered_map<crypto::Tag, std::shared_future<Result<Bytes>>,
                       crypto::TagHash>
        inflight_;
    std::size_t bytes_ = 0;
    CacheStats stats_;
};

} // namespace chronocache
